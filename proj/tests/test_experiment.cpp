#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dequant/experiment.hpp"
#include "dequant/metrics.hpp"
#include "dequant/report.hpp"
#include "dequant/synth.hpp"
#include "json.hpp"

using namespace dequant;

namespace
{
    ExperimentSpec small_spec()
    {
        ExperimentSpec spec;
        spec.inputs = {InputSpec{"tones", MultisineSpec{{440.0, 1000.0}, {1.0, 0.5}, 0.25, 8000.0}}};
        spec.word_lengths = {4};
        spec.algorithms = {Algorithm::DrConsSyn};
        spec.iteration_presets = {500};
        return spec;
    }

    std::string without_wall_time(const ResultRow& row)
    {
        ResultRow copy = row;
        copy.wall_time = 0.0;
        return csv_line(copy);
    }

    ResultRow make_row(Algorithm a, int w, double delta)
    {
        ResultRow row;
        row.input = "x";
        row.algorithm = a;
        row.w = w;
        row.iterations = 100;
        row.delta_sdr = delta;
        return row;
    }
}  // namespace

TEST_CASE("single-cell experiment")
{
    const auto rows = run_experiment(small_spec());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].consistent);
    CHECK_FALSE(rows[0].failed);
    CHECK(rows[0].input == "tones");
    CHECK(rows[0].delta_sdr > 0.0);
    CHECK(rows[0].params == "gamma=1");
}

TEST_CASE("experiment validation")
{
    auto spec = small_spec();
    spec.algorithms.clear();
    CHECK_THROWS_AS(run_experiment(spec), InvalidArgument);
    spec = small_spec();
    spec.word_lengths = {1};
    CHECK_THROWS_AS(run_experiment(spec), InvalidArgument);
    spec = small_spec();
    spec.inputs.clear();
    CHECK_THROWS_AS(run_experiment(spec), InvalidArgument);
}

TEST_CASE("reruns are identical apart from wall time, across worker counts")
{
    auto spec = small_spec();
    spec.word_lengths = {3, 5};
    spec.algorithms = {Algorithm::CpConsAna, Algorithm::FistaApproxAna, Algorithm::SSpadq};
    spec.iteration_presets = {20, 40};
    const auto first = run_experiment(spec);
    spec.workers = 3;
    std::vector<ResultRow> streamed;
    const auto second = run_experiment(spec, [&](const ResultRow& row) { streamed.push_back(row); });
    REQUIRE(first.size() == 12);
    REQUIRE(second.size() == first.size());
    REQUIRE(streamed.size() == first.size());
    for (std::size_t i = 0; i < first.size(); ++i)
    {
        CHECK(without_wall_time(first[i]) == without_wall_time(second[i]));
        CHECK(without_wall_time(streamed[i]) == without_wall_time(first[i]));
    }
    // Spec order: input, w, algorithm, preset.
    CHECK(first[0].w == 3);
    CHECK(first[0].algorithm == Algorithm::CpConsAna);
    CHECK(first[1].iterations == 40);
    CHECK(first[2].algorithm == Algorithm::FistaApproxAna);
    CHECK(first[6].w == 5);
}

TEST_CASE("failures are isolated to their cells")
{
    auto spec = small_spec();
    spec.inputs.push_back(InputSpec{"missing", std::filesystem::path("/nonexistent/file.wav")});
    spec.algorithms = {Algorithm::DrConsSyn, Algorithm::CpConsAna};
    spec.iteration_presets = {10};
    spec.overrides[Algorithm::CpConsAna] = nlohmann::json{{"zeta", 2.0}, {"sigma", 2.0}};
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    spec.overrides.clear();

    const auto rows = run_experiment(spec);
    REQUIRE(rows.size() == 4);
    CHECK_FALSE(rows[0].failed);
    CHECK_FALSE(rows[1].failed);
    CHECK(rows[2].failed);
    CHECK(rows[3].failed);
    CHECK(std::isnan(rows[2].delta_sdr));
    CHECK(csv_line(rows[2]).find("error=") != std::string::npos);
}

TEST_CASE("overrides and parameter strings")
{
    auto spec = small_spec();
    spec.algorithms = {Algorithm::DrConsSyn, Algorithm::DrInconsSyn};
    spec.iteration_presets = {5};
    spec.overrides[Algorithm::DrInconsSyn] = nlohmann::json{{"gamma", 4.0}, {"lambda", 0.5}};
    const auto rows = run_experiment(spec);
    CHECK(rows[0].params == "gamma=1");
    CHECK(rows[1].params == "gamma=4;lambda=0.5");

    SolverConfig cfg;
    CHECK_THROWS_AS(apply_overrides(cfg, nlohmann::json{{"gama", 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(apply_overrides(cfg, nlohmann::json{{"gamma", "big"}}), InvalidArgument);
}

TEST_CASE("experiment config file")
{
    const auto path = std::filesystem::temp_directory_path() / "dequant_spec.json";
    std::ofstream(path) << R"({
        "inputs": ["multisine:duration=0.5;rate=8000", "noise:seed=3;duration=0.5;rate=8000"],
        "word_lengths": [3, 4],
        "algorithms": ["CP_CONS_ANA", "A_SPADQ"],
        "iteration_presets": [50],
        "params": {"lambda": 0.001},
        "overrides": {"A_SPADQ": {"spadq_s": 8}},
        "output_dir": "out",
        "format": "json",
        "workers": 2
    })";
    const auto spec = load_experiment_spec(path);
    CHECK(spec.inputs.size() == 2);
    CHECK(spec.inputs[1].id == "noise:seed=3;duration=0.5;rate=8000");
    CHECK(spec.word_lengths == std::vector<int>{3, 4});
    CHECK(spec.algorithms == std::vector<Algorithm>{Algorithm::CpConsAna, Algorithm::ASpadq});
    CHECK(spec.base.lambda == 0.001);
    CHECK(spec.overrides.at(Algorithm::ASpadq).at("spadq_s") == 8);
    CHECK(spec.report_format == "json");
    CHECK(spec.workers == 2);

    CHECK_THROWS_AS(experiment_spec_from_json(nlohmann::json{{"inputz", 1}}), InvalidArgument);
    CHECK_THROWS_AS(experiment_spec_from_json(nlohmann::json{{"algorithms", {"NOPE"}}}), InvalidArgument);
}

TEST_CASE("summary")
{
    const std::vector<ResultRow> rows = {make_row(Algorithm::CpConsAna, 4, 6.0), make_row(Algorithm::CpConsAna, 4, 8.0),
                                         make_row(Algorithm::DrConsSyn, 4, 5.5)};
    const auto summary = summarize(rows);
    REQUIRE(summary.size() == 2);
    CHECK(summary[0].algorithm == Algorithm::DrConsSyn);
    CHECK(summary[0].mean_delta_sdr == 5.5);
    CHECK(summary[0].count == 1);
    CHECK(summary[1].mean_delta_sdr == 7.0);
    CHECK(summary[1].count == 2);

    auto failed = make_row(Algorithm::DrConsSyn, 4, std::nan(""));
    failed.failed = true;
    const auto with_failure = summarize({rows[2], failed});
    REQUIRE(with_failure.size() == 1);
    CHECK(with_failure[0].count == 1);
}

TEST_CASE("report files")
{
    std::vector<ResultRow> rows = {make_row(Algorithm::CpConsAna, 4, 6.25), make_row(Algorithm::ASpadq, 5, 1.0 / 3.0)};
    rows[1].delta_sdr = kPerfectSdr;
    const auto dir = std::filesystem::temp_directory_path() / "dequant_report_test";
    std::filesystem::remove_all(dir);

    SUBCASE("csv")
    {
        const auto files = emit_report(rows, ReportFormat::Csv, dir);
        REQUIRE(files.size() == 2);
        std::ifstream in(files[0]);
        std::string header, line;
        std::getline(in, header);
        CHECK(header == kCsvHeader);
        std::getline(in, line);
        CHECK(line.rfind("x,4,CP_CONS_ANA,100,6.25,", 0) == 0);
        std::getline(in, line);
        CHECK(line.find(",inf,") != std::string::npos);
    }
    SUBCASE("json round trip")
    {
        rows.push_back(make_row(Algorithm::ASpadq, 5, 2.0));
        rows.back().delta_sdr = 0.1 + 0.2;
        const auto files = emit_report(rows, ReportFormat::Json, dir);
        REQUIRE(files.size() == 1);
        std::ifstream in(files[0]);
        const auto parsed = nlohmann::json::parse(in);
        CHECK(parsed.at("rows").size() == 3);
        const auto summary = summary_from_json(parsed);
        const auto expected = summarize(rows);
        REQUIRE(summary.size() == expected.size());
        for (std::size_t i = 0; i < summary.size(); ++i)
        {
            CHECK(summary[i].algorithm == expected[i].algorithm);
            CHECK(summary[i].w == expected[i].w);
            CHECK(summary[i].count == expected[i].count);
            CHECK(summary[i].mean_delta_sdr == expected[i].mean_delta_sdr);
        }
    }
    CHECK_THROWS_AS(emit_report({}, ReportFormat::Csv, dir), InvalidArgument);
}

TEST_CASE("input parsing")
{
    CHECK(std::holds_alternative<SignalDescriptor>(parse_input("chirp:f0=50").source));
    const auto file = parse_input("/data/sqam/violin.wav");
    CHECK(file.id == "violin");
    CHECK(std::holds_alternative<std::filesystem::path>(file.source));
    CHECK(synthetic_corpus().size() == 3);
}
