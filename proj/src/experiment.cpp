#include "dequant/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>

#include "dequant/frame.hpp"
#include "dequant/metrics.hpp"
#include "dequant/quant.hpp"

namespace dequant
{
    namespace
    {
        std::string format_number(double value)
        {
            char buf[64];
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
            return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
        }

        struct PreparedInput
        {
            std::string id;
            RealVector signal;
            std::shared_ptr<const GaborFrame> frame;
            std::string error;
        };

        PreparedInput prepare(const InputSpec& input)
        {
            PreparedInput prepared;
            prepared.id = input.id;
            try
            {
                Audio audio = std::visit(
                    [](const auto& source) -> Audio {
                        using T = std::decay_t<decltype(source)>;
                        if constexpr (std::is_same_v<T, std::filesystem::path>)
                        {
                            return load_wav(source);
                        }
                        else
                        {
                            return synth_test_signal(source);
                        }
                    },
                    input.source);
                prepared.signal = peak_normalize(audio.samples);
                require(norm2(prepared.signal) > 0.0, "input is silent");
                prepared.frame = std::make_shared<const GaborFrame>(
                    default_geometry(audio.sample_rate, prepared.signal.size()));
            }
            catch (const std::exception& e)
            {
                prepared.error = e.what();
            }
            return prepared;
        }

        struct Cell
        {
            std::size_t input;
            int w;
            Algorithm algorithm;
            std::size_t iterations;
        };

        ResultRow run_cell(const ExperimentSpec& spec, const PreparedInput& input, const Cell& cell)
        {
            ResultRow row;
            row.input = input.id;
            row.w = cell.w;
            row.algorithm = cell.algorithm;
            row.iterations = cell.iterations;

            SolverConfig cfg = spec.base;
            cfg.algorithm = cell.algorithm;
            if (const auto it = spec.overrides.find(cell.algorithm); it != spec.overrides.end())
            {
                apply_overrides(cfg, it->second);
            }
            cfg.max_iters = cell.iterations;
            cfg.trace_objective_every = 0;
            cfg.trace_sdr_every = 0;
            row.params = describe_params(cfg);

            try
            {
                require(input.error.empty(), input.error);
                const QuantizedObservation obs = quantize(input.signal, cell.w);
                const SolverRun run = run_solver(obs, *input.frame, cfg);
                const EvalReport report = evaluate(input.signal, obs, run.final_signal, run.iterations_done);
                row.delta_sdr = report.delta_sdr;
                row.sdr = report.sdr_reconstructed;
                row.consistent = report.consistent;
                row.wall_time = run.wall_time;
            }
            catch (const std::exception& e)
            {
                row.failed = true;
                row.error = e.what();
                row.delta_sdr = std::numeric_limits<double>::quiet_NaN();
                row.sdr = std::numeric_limits<double>::quiet_NaN();
                row.consistent = false;
            }
            return row;
        }

        template <typename T>
        void set_if_present(const nlohmann::json& j, const char* key, T& field)
        {
            if (j.contains(key))
            {
                field = j.at(key).get<T>();
            }
        }
    }  // namespace

    InputSpec parse_input(const std::string& text)
    {
        const std::string_view kind = std::string_view(text).substr(0, text.find(':'));
        if (kind == "multisine" || kind == "chirp" || kind == "noise")
        {
            return InputSpec{text, parse_descriptor(text)};
        }
        return InputSpec{std::filesystem::path(text).stem().string(), std::filesystem::path(text)};
    }

    std::vector<InputSpec> synthetic_corpus()
    {
        // Desk scale: one second at 8 kHz keeps a full default experiment to a few minutes.
        MultisineSpec multisine = reference_multisine();
        multisine.duration = 1.0;
        multisine.rate = 8000.0;
        return {
            InputSpec{"multisine", multisine},
            InputSpec{"chirp", ChirpSpec{100.0, 3000.0, 1.0, 8000.0}},
            InputSpec{"noise", NoiseSpec{7, 1.0, 8000.0}},
        };
    }

    void ExperimentSpec::validate() const
    {
        require(!inputs.empty(), "experiment: no inputs");
        require(!word_lengths.empty(), "experiment: no word lengths");
        require(!algorithms.empty(), "experiment: algorithm list is empty");
        require(!iteration_presets.empty(), "experiment: no iteration presets");
        for (int w : word_lengths)
        {
            require(w >= 2 && w <= 16, "experiment: word lengths must lie in [2, 16]");
        }
        require(workers >= 1, "experiment: workers must be >= 1");
        require(report_format == "csv" || report_format == "json", "experiment: format must be csv or json");
        for (Algorithm a : algorithms)
        {
            SolverConfig cfg = base;
            cfg.algorithm = a;
            if (const auto it = overrides.find(a); it != overrides.end())
            {
                apply_overrides(cfg, it->second);
            }
            cfg.validate();
        }
    }

    void apply_overrides(SolverConfig& cfg, const nlohmann::json& j)
    {
        require(j.is_object(), "config: hyperparameters must be a JSON object");
        static const std::vector<std::string> known = {
            "max_iters", "gamma",        "zeta",          "sigma",    "rho",
            "lambda",    "mu",           "spadq_s",       "spadq_r",  "spadq_epsilon",
            "stop_tol",  "trace_sdr_every", "trace_objective_every"};
        for (const auto& [key, value] : j.items())
        {
            require(std::find(known.begin(), known.end(), key) != known.end(), "config: unknown parameter '" + key + "'");
        }
        try
        {
            set_if_present(j, "max_iters", cfg.max_iters);
            set_if_present(j, "gamma", cfg.gamma);
            set_if_present(j, "zeta", cfg.zeta);
            set_if_present(j, "sigma", cfg.sigma);
            set_if_present(j, "rho", cfg.rho);
            set_if_present(j, "lambda", cfg.lambda);
            set_if_present(j, "mu", cfg.mu);
            set_if_present(j, "spadq_s", cfg.spadq_s);
            set_if_present(j, "spadq_r", cfg.spadq_r);
            set_if_present(j, "spadq_epsilon", cfg.spadq_epsilon);
            set_if_present(j, "stop_tol", cfg.stop_tol);
            set_if_present(j, "trace_sdr_every", cfg.trace_sdr_every);
            set_if_present(j, "trace_objective_every", cfg.trace_objective_every);
        }
        catch (const nlohmann::json::exception& e)
        {
            throw InvalidArgument(std::string("config: ") + e.what());
        }
    }

    ExperimentSpec experiment_spec_from_json(const nlohmann::json& j)
    {
        require(j.is_object(), "experiment config must be a JSON object");
        static const std::vector<std::string> known = {"inputs", "word_lengths", "algorithms", "iteration_presets",
                                                       "params", "overrides", "output_dir", "format", "workers"};
        for (const auto& [key, value] : j.items())
        {
            require(std::find(known.begin(), known.end(), key) != known.end(), "experiment config: unknown key '" + key + "'");
        }

        ExperimentSpec spec;
        try
        {
            if (j.contains("inputs"))
            {
                for (const auto& item : j.at("inputs"))
                {
                    spec.inputs.push_back(parse_input(item.get<std::string>()));
                }
            }
            set_if_present(j, "word_lengths", spec.word_lengths);
            set_if_present(j, "iteration_presets", spec.iteration_presets);
            if (j.contains("algorithms"))
            {
                spec.algorithms.clear();
                for (const auto& item : j.at("algorithms"))
                {
                    const auto id = item.get<std::string>();
                    const auto a = parse_algorithm(id);
                    require(a.has_value(), "experiment config: unknown algorithm '" + id + "'");
                    spec.algorithms.push_back(*a);
                }
            }
            if (j.contains("params"))
            {
                apply_overrides(spec.base, j.at("params"));
            }
            if (j.contains("overrides"))
            {
                for (const auto& [id, params] : j.at("overrides").items())
                {
                    const auto a = parse_algorithm(id);
                    require(a.has_value(), "experiment config: unknown algorithm '" + id + "' in overrides");
                    spec.overrides[*a] = params;
                }
            }
            if (j.contains("output_dir"))
            {
                spec.output_dir = j.at("output_dir").get<std::string>();
            }
            set_if_present(j, "format", spec.report_format);
            set_if_present(j, "workers", spec.workers);
        }
        catch (const nlohmann::json::exception& e)
        {
            throw InvalidArgument(std::string("experiment config: ") + e.what());
        }
        return spec;
    }

    ExperimentSpec load_experiment_spec(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        require(static_cast<bool>(in), "cannot open experiment config " + path.string());
        nlohmann::json j;
        try
        {
            in >> j;
        }
        catch (const nlohmann::json::exception& e)
        {
            throw InvalidArgument("experiment config " + path.string() + ": " + e.what());
        }
        return experiment_spec_from_json(j);
    }

    std::string describe_params(const SolverConfig& cfg)
    {
        std::vector<std::pair<const char*, double>> items;
        switch (cfg.algorithm)
        {
            case Algorithm::DrConsSyn: items = {{"gamma", cfg.gamma}}; break;
            case Algorithm::CpConsAna: items = {{"zeta", cfg.zeta}, {"sigma", cfg.sigma}, {"rho", cfg.rho}}; break;
            case Algorithm::FistaInconsSyn:
            case Algorithm::FistaApproxAna: items = {{"lambda", cfg.lambda}, {"mu", cfg.mu}}; break;
            case Algorithm::DrInconsSyn:
            case Algorithm::DrApproxAna: items = {{"gamma", cfg.gamma}, {"lambda", cfg.lambda}}; break;
            case Algorithm::CpInconsAna:
                items = {{"zeta", cfg.zeta}, {"sigma", cfg.sigma}, {"rho", cfg.rho}, {"lambda", cfg.lambda}};
                break;
            case Algorithm::ASpadq:
            case Algorithm::SSpadq:
            case Algorithm::SSpadqDr:
                items = {{"s", static_cast<double>(cfg.spadq_s)},
                         {"r", static_cast<double>(cfg.spadq_r)},
                         {"epsilon", cfg.spadq_epsilon}};
                break;
        }
        if (cfg.stop_tol > 0.0)
        {
            items.emplace_back("stop_tol", cfg.stop_tol);
        }
        std::string out;
        for (const auto& [name, value] : items)
        {
            if (!out.empty())
            {
                out += ';';
            }
            out += name;
            out += '=';
            out += format_number(value);
        }
        return out;
    }

    std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const RowSink& sink)
    {
        spec.validate();

        std::vector<PreparedInput> inputs;
        inputs.reserve(spec.inputs.size());
        for (const auto& input : spec.inputs)
        {
            inputs.push_back(prepare(input));
        }

        std::vector<Cell> cells;
        for (std::size_t i = 0; i < inputs.size(); ++i)
        {
            for (int w : spec.word_lengths)
            {
                for (Algorithm a : spec.algorithms)
                {
                    for (std::size_t preset : spec.iteration_presets)
                    {
                        cells.push_back(Cell{i, w, a, preset});
                    }
                }
            }
        }

        std::vector<std::optional<ResultRow>> results(cells.size());
        std::mutex mutex;
        std::size_t flushed = 0;
        std::atomic<std::size_t> next{0};

        const auto worker = [&] {
            for (std::size_t index = next++; index < cells.size(); index = next++)
            {
                ResultRow row = run_cell(spec, inputs[cells[index].input], cells[index]);
                std::lock_guard lock(mutex);
                results[index] = std::move(row);
                while (flushed < results.size() && results[flushed].has_value())
                {
                    if (sink)
                    {
                        sink(*results[flushed]);
                    }
                    ++flushed;
                }
            }
        };

        const std::size_t pool_size = std::min(spec.workers, std::max<std::size_t>(cells.size(), 1));
        if (pool_size <= 1)
        {
            worker();
        }
        else
        {
            std::vector<std::jthread> pool;
            for (std::size_t t = 0; t < pool_size; ++t)
            {
                pool.emplace_back(worker);
            }
        }

        std::vector<ResultRow> rows;
        rows.reserve(results.size());
        for (auto& r : results)
        {
            rows.push_back(std::move(*r));
        }
        return rows;
    }
}  // namespace dequant
