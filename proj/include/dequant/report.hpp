#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dequant/experiment.hpp"

namespace dequant
{
    enum class ReportFormat
    {
        Csv,
        Json
    };

    ReportFormat parse_report_format(std::string_view name);

    /// Mean delta SDR over successful rows sharing (algorithm, w, iterations).
    struct SummaryRow
    {
        Algorithm algorithm = Algorithm::DrConsSyn;
        int w = 0;
        std::size_t iterations = 0;
        double mean_delta_sdr = 0.0;
        std::size_t count = 0;
    };

    /// Groups are ordered by algorithm (in enum order), then w, then iterations.
    std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

    inline constexpr std::string_view kCsvHeader =
        "input,w,algorithm,iterations,delta_sdr_db,sdr_db,consistent,wall_time_s,params";

    std::string csv_line(const ResultRow& row);
    void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
    void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);

    nlohmann::json to_json(const std::vector<ResultRow>& rows, const std::vector<SummaryRow>& summary);
    std::vector<SummaryRow> summary_from_json(const nlohmann::json& j);

    /// Writes <stem>.csv and <stem>_summary.csv, or <stem>.json holding rows and summary. Returns the
    /// paths written.
    std::vector<std::filesystem::path> emit_report(const std::vector<ResultRow>& rows, ReportFormat format,
                                                   const std::filesystem::path& directory,
                                                   const std::string& stem = "results");
}  // namespace dequant
