#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dequant/experiment.hpp"
#include "dequant/frame.hpp"
#include "dequant/metrics.hpp"
#include "dequant/quant.hpp"
#include "dequant/report.hpp"
#include "dequant/solvers.hpp"
#include "dequant/synth.hpp"
#include "dequant/wav.hpp"

using namespace dequant;

namespace
{
    constexpr int kExitOk = 0;
    constexpr int kExitUsage = 1;
    constexpr int kExitRowFailures = 2;

    // Solver flags; only the ones given on the command line end up in the override object.
    struct SolverFlags
    {
        std::map<std::string, CLI::Option*> options;
        std::size_t max_iters = 0, spadq_s = 0, spadq_r = 0, trace_sdr_every = 0, trace_objective_every = 0;
        double gamma = 0, zeta = 0, sigma = 0, rho = 0, lambda = 0, mu = 0, spadq_epsilon = 0, stop_tol = 0;

        void attach(CLI::App& app)
        {
            const auto add = [&](const std::string& key, auto& target, const std::string& help) {
                std::string dashed = key;
                std::replace(dashed.begin(), dashed.end(), '_', '-');
                std::string names = "--" + dashed;
                if (dashed != key)
                {
                    names += ",--" + key;
                }
                options[key] = app.add_option(names, target, help)->group("Solver parameters");
            };
            add("max_iters", max_iters, "iteration count");
            add("gamma", gamma, "Douglas-Rachford step (DR algorithms)");
            add("zeta", zeta, "Chambolle-Pock primal step");
            add("sigma", sigma, "Chambolle-Pock dual step");
            add("rho", rho, "Chambolle-Pock relaxation in [0, 1]");
            add("lambda", lambda, "sparsity weight of the penalized formulations");
            add("mu", mu, "FISTA step in (0, 1]");
            add("spadq_s", spadq_s, "SPADQ sparsity increment");
            add("spadq_r", spadq_r, "SPADQ increment period");
            add("spadq_epsilon", spadq_epsilon, "SPADQ coupling tolerance");
            add("stop_tol", stop_tol, "relative iterate-change stopping threshold, 0 disables");
            add("trace_sdr_every", trace_sdr_every, "SDR trace interval (needs a reference), 0 disables");
            add("trace_objective_every", trace_objective_every, "objective trace interval, 0 disables");
        }

        nlohmann::json given() const
        {
            nlohmann::json j = nlohmann::json::object();
            const auto put = [&](const std::string& key, const auto& value) {
                if (options.at(key)->count() > 0)
                {
                    j[key] = value;
                }
            };
            put("max_iters", max_iters);
            put("gamma", gamma);
            put("zeta", zeta);
            put("sigma", sigma);
            put("rho", rho);
            put("lambda", lambda);
            put("mu", mu);
            put("spadq_s", spadq_s);
            put("spadq_r", spadq_r);
            put("spadq_epsilon", spadq_epsilon);
            put("stop_tol", stop_tol);
            put("trace_sdr_every", trace_sdr_every);
            put("trace_objective_every", trace_objective_every);
            return j;
        }
    };

    nlohmann::json read_json(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
        {
            throw std::runtime_error("cannot open " + path);
        }
        try
        {
            return nlohmann::json::parse(in);
        }
        catch (const nlohmann::json::parse_error& e)
        {
            throw InvalidArgument(path + ": " + e.what());
        }
    }

    Algorithm algorithm_from(const std::string& id)
    {
        const auto a = parse_algorithm(id);
        if (!a)
        {
            throw InvalidArgument("unknown algorithm '" + id + "'");
        }
        return *a;
    }

    std::string format_db(double value)
    {
        if (value == kPerfectSdr)
        {
            return "inf";
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", value);
        return buf;
    }

    int cmd_synth(const std::string& descriptor, const std::string& output, const std::string& format)
    {
        const Audio audio = synth_test_signal(parse_descriptor(descriptor));
        save_wav(output, audio.samples, audio.sample_rate, parse_sample_format(format));
        std::cout << describe(parse_descriptor(descriptor)) << ": " << audio.samples.size() << " samples at "
                  << audio.sample_rate << " Hz -> " << output << '\n';
        return kExitOk;
    }

    int cmd_quantize(const std::string& input, const std::string& output, int w, bool normalize,
                     const std::string& format)
    {
        Audio audio = load_wav(input);
        if (normalize)
        {
            audio.samples = peak_normalize(audio.samples);
        }
        const auto obs = quantize(audio.samples, w);
        save_wav(output, obs.xq, audio.sample_rate, parse_sample_format(format));
        std::cout << "w=" << w << " delta=" << obs.delta << " -> " << output << '\n';
        return kExitOk;
    }

    struct DequantizeArgs
    {
        std::string input, output, algorithm = "DR_CONS_SYN", config, reference, trace, format = "float32";
        int w = 0;
    };

    int cmd_dequantize(const DequantizeArgs& args, const SolverFlags& flags)
    {
        SolverConfig cfg;
        if (!args.config.empty())
        {
            apply_overrides(cfg, read_json(args.config));
        }
        apply_overrides(cfg, flags.given());
        cfg.algorithm = algorithm_from(args.algorithm);

        const Audio audio = load_wav(args.input);
        // Snap to the quantizer levels; exact for files written by `quantize`.
        const auto obs = quantize(audio.samples, args.w);
        const GaborFrame frame(default_geometry(audio.sample_rate, obs.xq.size()));

        std::optional<Audio> reference;
        SolveOptions options;
        if (!args.reference.empty())
        {
            reference = load_wav(args.reference);
            require(reference->samples.size() == obs.xq.size(), "reference length differs from the input");
            options.reference = reference->samples;
        }

        const SolverRun run = run_solver(obs, frame, cfg, options);
        save_wav(args.output, run.final_signal, audio.sample_rate, parse_sample_format(args.format));

        std::cout << algorithm_id(cfg.algorithm) << " " << run.iterations_done << " iterations, "
                  << run.wall_time << " s, consistent=" << (run.consistent ? "true" : "false");
        if (reference)
        {
            std::cout << ", delta_sdr=" << format_db(delta_sdr(reference->samples, obs, run.final_signal)) << " dB";
        }
        std::cout << '\n';

        if (!args.trace.empty())
        {
            std::ofstream out(args.trace);
            if (!out)
            {
                throw std::runtime_error("cannot open " + args.trace);
            }
            out << "iteration,objective,sdr_db,sparsity\n";
            for (const auto& p : run.trace)
            {
                out << p.iteration << ',' << (p.objective ? std::to_string(*p.objective) : "") << ','
                    << (p.sdr ? format_db(*p.sdr) : "") << ',' << (p.sparsity ? std::to_string(*p.sparsity) : "")
                    << '\n';
            }
        }
        return kExitOk;
    }

    int cmd_evaluate(const std::string& reference_path, const std::string& estimate_path,
                     const std::string& quantized_path, int w)
    {
        const Audio reference = load_wav(reference_path);
        const Audio estimate = load_wav(estimate_path);
        std::cout << "sdr_db=" << format_db(sdr(reference.samples, estimate.samples));
        if (!quantized_path.empty())
        {
            const auto obs = quantize(load_wav(quantized_path).samples, w);
            std::cout << " delta_sdr_db=" << format_db(delta_sdr(reference.samples, obs, estimate.samples))
                      << " consistent=" << (is_consistent(estimate.samples, box_of(obs)) ? "true" : "false");
        }
        std::cout << '\n';
        return kExitOk;
    }

    struct ExperimentArgs
    {
        std::string config, output_dir, format;
        std::vector<std::string> inputs, algorithms;
        std::vector<int> word_lengths;
        std::vector<std::size_t> presets;
        std::size_t workers = 0;
        bool quiet = false;
    };

    int cmd_experiment(const ExperimentArgs& args, const SolverFlags& flags)
    {
        ExperimentSpec spec = args.config.empty() ? ExperimentSpec{} : load_experiment_spec(args.config);
        if (!args.inputs.empty())
        {
            spec.inputs.clear();
            for (const auto& text : args.inputs)
            {
                spec.inputs.push_back(parse_input(text));
            }
        }
        if (spec.inputs.empty())
        {
            spec.inputs = synthetic_corpus();
        }
        if (!args.word_lengths.empty())
        {
            spec.word_lengths = args.word_lengths;
        }
        if (!args.algorithms.empty())
        {
            spec.algorithms.clear();
            for (const auto& id : args.algorithms)
            {
                spec.algorithms.push_back(algorithm_from(id));
            }
        }
        if (!args.presets.empty())
        {
            spec.iteration_presets = args.presets;
        }
        if (!args.output_dir.empty())
        {
            spec.output_dir = args.output_dir;
        }
        if (!args.format.empty())
        {
            spec.report_format = args.format;
        }
        if (args.workers > 0)
        {
            spec.workers = args.workers;
        }
        // Flags beat both the shared params and per-algorithm overrides from the file.
        const auto given = flags.given();
        apply_overrides(spec.base, given);
        for (auto& [algorithm, params] : spec.overrides)
        {
            params.update(given);
        }
        spec.validate();

        const ReportFormat format = parse_report_format(spec.report_format);
        std::filesystem::create_directories(spec.output_dir);
        std::ofstream rows_out;
        if (format == ReportFormat::Csv)
        {
            rows_out.open(spec.output_dir / "results.csv");
            if (!rows_out)
            {
                throw std::runtime_error("cannot write to " + spec.output_dir.string());
            }
            rows_out << kCsvHeader << '\n' << std::flush;
        }

        std::size_t failures = 0;
        const auto rows = run_experiment(spec, [&](const ResultRow& row) {
            if (rows_out.is_open())
            {
                rows_out << csv_line(row) << '\n' << std::flush;
            }
            if (row.failed)
            {
                ++failures;
                std::cerr << "row failed: " << row.input << " w=" << row.w << ' ' << algorithm_id(row.algorithm)
                          << ": " << row.error << '\n';
            }
            else if (!args.quiet)
            {
                std::cout << row.input << " w=" << row.w << ' ' << algorithm_id(row.algorithm) << " it="
                          << row.iterations << " delta_sdr=" << format_db(row.delta_sdr) << " dB\n";
            }
        });

        if (format == ReportFormat::Csv)
        {
            rows_out.close();
            std::ofstream summary_out(spec.output_dir / "results_summary.csv");
            write_summary_csv(summary_out, summarize(rows));
        }
        else
        {
            emit_report(rows, format, spec.output_dir);
        }
        std::cout << rows.size() << " rows written to " << spec.output_dir.string() << '\n';
        return failures > 0 ? kExitRowFailures : kExitOk;
    }
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Audio dequantization by sparse time-frequency reconstruction"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "dequant 1.0");

    std::string synth_descriptor, synth_output, synth_format = "float32";
    auto* synth = app.add_subcommand("synth", "write a synthetic test signal");
    synth->add_option("descriptor", synth_descriptor,
                      "e.g. multisine, multisine:freqs=440,880;amps=1,0.5;duration=1;rate=44100, "
                      "chirp:f0=100;f1=4000, noise:seed=7")
        ->required();
    synth->add_option("-o,--output", synth_output, "output WAV")->required();
    synth->add_option("--format", synth_format, "pcm16, pcm24 or float32")->capture_default_str();

    std::string q_input, q_output, q_format = "float32";
    int q_w = 0;
    bool q_normalize = false;
    auto* quant = app.add_subcommand("quantize", "quantize a WAV file to w bits");
    quant->add_option("input", q_input, "input WAV")->required()->check(CLI::ExistingFile);
    quant->add_option("-o,--output", q_output, "output WAV")->required();
    quant->add_option("-w,--word-length", q_w, "bits per sample")->required()->check(CLI::Range(1, 24));
    quant->add_flag("--normalize", q_normalize, "peak-normalize before quantizing");
    quant->add_option("--format", q_format, "pcm16, pcm24 or float32")->capture_default_str();

    DequantizeArgs dq;
    SolverFlags dq_flags;
    auto* deq = app.add_subcommand("dequantize", "reconstruct a quantized WAV file");
    deq->add_option("input", dq.input, "quantized WAV")->required()->check(CLI::ExistingFile);
    deq->add_option("-o,--output", dq.output, "reconstructed WAV")->required();
    deq->add_option("-w,--word-length", dq.w, "bits per sample of the input")->required()->check(CLI::Range(1, 24));
    deq->add_option("-a,--algorithm", dq.algorithm, "algorithm id, e.g. DR_CONS_SYN or S_SPADQ")
        ->capture_default_str();
    deq->add_option("-c,--config", dq.config, "JSON object of solver parameters; flags take precedence")
        ->check(CLI::ExistingFile);
    deq->add_option("--reference", dq.reference, "clean WAV for delta SDR and SDR tracing")
        ->check(CLI::ExistingFile);
    deq->add_option("--trace", dq.trace, "write the iteration trace as CSV");
    deq->add_option("--format", dq.format, "pcm16, pcm24 or float32")->capture_default_str();
    dq_flags.attach(*deq);

    std::string ev_reference, ev_estimate, ev_quantized;
    int ev_w = 0;
    auto* eval = app.add_subcommand("evaluate", "SDR of an estimate, and delta SDR given the quantized input");
    eval->add_option("reference", ev_reference, "clean WAV")->required()->check(CLI::ExistingFile);
    eval->add_option("estimate", ev_estimate, "reconstructed WAV")->required()->check(CLI::ExistingFile);
    auto* quantized_opt =
        eval->add_option("--quantized", ev_quantized, "quantized WAV")->check(CLI::ExistingFile);
    auto* w_opt = eval->add_option("-w,--word-length", ev_w, "bits per sample of the quantized WAV")
                      ->check(CLI::Range(1, 24));
    quantized_opt->needs(w_opt);
    w_opt->needs(quantized_opt);

    ExperimentArgs ex;
    SolverFlags ex_flags;
    auto* exp = app.add_subcommand("experiment", "batch over inputs, word lengths, algorithms and presets");
    exp->add_option("-c,--config", ex.config, "experiment JSON; flags take precedence")->check(CLI::ExistingFile);
    exp->add_option("-i,--input", ex.inputs, "WAV path or synthetic descriptor (default: synthetic corpus)");
    exp->add_option("-w,--word-lengths", ex.word_lengths, "word lengths")->delimiter(',');
    exp->add_option("-a,--algorithms", ex.algorithms, "algorithm ids")->delimiter(',');
    exp->add_option("-p,--presets", ex.presets, "iteration presets")->delimiter(',');
    exp->add_option("-o,--output-dir", ex.output_dir, "report directory (default results)");
    exp->add_option("--format", ex.format, "csv or json");
    exp->add_option("-j,--workers", ex.workers, "concurrent cells")->check(CLI::PositiveNumber);
    exp->add_flag("-q,--quiet", ex.quiet, "do not print each row");
    ex_flags.attach(*exp);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try
    {
        if (synth->parsed())
        {
            return cmd_synth(synth_descriptor, synth_output, synth_format);
        }
        if (quant->parsed())
        {
            return cmd_quantize(q_input, q_output, q_w, q_normalize, q_format);
        }
        if (deq->parsed())
        {
            return cmd_dequantize(dq, dq_flags);
        }
        if (eval->parsed())
        {
            return cmd_evaluate(ev_reference, ev_estimate, ev_quantized, ev_w);
        }
        if (exp->parsed())
        {
            return cmd_experiment(ex, ex_flags);
        }
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
