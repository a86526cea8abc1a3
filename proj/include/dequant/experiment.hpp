#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dequant/solvers.hpp"
#include "dequant/synth.hpp"

namespace dequant
{
    struct InputSpec
    {
        std::string id;
        std::variant<std::filesystem::path, SignalDescriptor> source;
    };

    /// "multisine", "chirp:...", "noise:..." are synthetic descriptors; anything else is a WAV path.
    InputSpec parse_input(const std::string& text);

    /// Multisine, chirp and seeded noise, all 1 s at 8 kHz.
    std::vector<InputSpec> synthetic_corpus();

    struct ExperimentSpec
    {
        std::vector<InputSpec> inputs;
        std::vector<int> word_lengths{2, 3, 4, 5, 6, 7, 8};
        std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
        std::vector<std::size_t> iteration_presets{100, 500};
        /// Shared hyperparameters; algorithm and max_iters are filled per cell.
        SolverConfig base;
        /// Per-algorithm hyperparameter overrides, as JSON objects of SolverConfig field names.
        std::map<Algorithm, nlohmann::json> overrides;
        std::filesystem::path output_dir = "results";
        std::string report_format = "csv";
        std::size_t workers = 1;

        void validate() const;
    };

    /// Reads the experiment config file (JSON). Unknown keys are rejected.
    ExperimentSpec load_experiment_spec(const std::filesystem::path& path);
    ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);

    /// Applies SolverConfig fields present in j ("gamma", "lambda", "spadq_s", ...) onto cfg.
    void apply_overrides(SolverConfig& cfg, const nlohmann::json& j);

    /// Hyperparameters the algorithm actually uses, as "name=value" pairs joined with ';'.
    std::string describe_params(const SolverConfig& cfg);

    struct ResultRow
    {
        std::string input;
        int w = 0;
        Algorithm algorithm = Algorithm::DrConsSyn;
        std::size_t iterations = 0;  ///< requested preset
        double delta_sdr = 0.0;
        double sdr = 0.0;
        bool consistent = false;
        double wall_time = 0.0;
        std::string params;
        bool failed = false;
        std::string error;
        std::optional<double> odg;  ///< externally computed perceptual grade, never filled here
    };

    /// Called once per row, in spec order, as soon as all earlier rows are done.
    using RowSink = std::function<void(const ResultRow&)>;

    /// Runs every (input, w, algorithm, preset) cell. A failing cell yields a row with failed = true and
    /// does not stop the batch.
    std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const RowSink& sink = {});
}  // namespace dequant
