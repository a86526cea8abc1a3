#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dequant/frame.hpp"
#include "dequant/quant.hpp"
#include "dequant/types.hpp"

namespace dequant
{
    enum class Algorithm
    {
        DrConsSyn,       ///< Douglas-Rachford, consistent l1, synthesis
        CpConsAna,       ///< Chambolle-Pock, consistent l1, analysis
        FistaInconsSyn,  ///< FISTA, l1 + dist^2 penalty, synthesis
        DrInconsSyn,     ///< Douglas-Rachford, l1 + dist^2 penalty, synthesis
        CpInconsAna,     ///< Chambolle-Pock, l1 + dist^2 penalty, analysis
        DrApproxAna,     ///< Douglas-Rachford with the approximal operator, analysis
        FistaApproxAna,  ///< FISTA with the approximal operator, analysis
        ASpadq,          ///< analysis SPADQ (signal in the box, ||Ax - c|| <= eps)
        SSpadq,          ///< synthesis SPADQ (signal in the box, ||x - A*c|| <= eps)
        SSpadqDr         ///< synthesis SPADQ on coefficients (A*c in the box, ||c - z|| <= eps)
    };

    inline constexpr std::array<Algorithm, 10> kAllAlgorithms = {
        Algorithm::DrConsSyn,  Algorithm::CpConsAna,      Algorithm::FistaInconsSyn, Algorithm::DrInconsSyn,
        Algorithm::CpInconsAna, Algorithm::DrApproxAna,   Algorithm::FistaApproxAna, Algorithm::ASpadq,
        Algorithm::SSpadq,     Algorithm::SSpadqDr};

    /// Identifier used on the command line and in reports, e.g. "DR_CONS_SYN".
    std::string_view algorithm_id(Algorithm algorithm);
    std::optional<Algorithm> parse_algorithm(std::string_view id);

    bool is_consistent_variant(Algorithm algorithm);
    bool is_spadq(Algorithm algorithm);
    bool is_chambolle_pock(Algorithm algorithm);
    bool is_fista(Algorithm algorithm);

    /// Defaults are starting points, not tuned values.
    struct SolverConfig
    {
        Algorithm algorithm = Algorithm::DrConsSyn;
        std::size_t max_iters = 500;
        double gamma = 1.0;
        double zeta = 0.5;
        double sigma = 0.5;
        double rho = 1.0;
        double lambda = 1e-4;
        double mu = 1.0;
        std::size_t spadq_s = 1;
        std::size_t spadq_r = 1;
        double spadq_epsilon = 0.1;
        double stop_tol = 0.0;
        std::size_t trace_sdr_every = 0;
        /// Interval for objective evaluation in the trace; some objectives need an extra transform.
        std::size_t trace_objective_every = 1;

        /// Throws InvalidArgument when a parameter used by the selected algorithm is out of range.
        void validate() const;
    };

    struct TracePoint
    {
        std::size_t iteration = 0;
        std::optional<double> objective;
        std::optional<double> sdr;
        /// SPADQ only: current sparsity budget k.
        std::optional<std::size_t> sparsity;
    };

    struct SolverRun
    {
        SolverConfig config;
        std::size_t iterations_done = 0;
        RealVector final_signal;           ///< truncated to the observation length
        ComplexVector final_coefficients;  ///< coefficient-domain algorithms only
        std::vector<TracePoint> trace;
        bool consistent = false;
        double wall_time = 0.0;
    };

    struct SolveOptions
    {
        /// Clean signal of the observation length; enables SDR tracing when trace_sdr_every > 0.
        std::span<const double> reference;
        /// Overrides the default start xq for signal-domain algorithms.
        std::span<const double> initial_signal;
        /// Overrides the default start analysis(xq) for coefficient-domain algorithms.
        std::span<const Complex> initial_coefficients;
    };

    SolverRun solve_dr_consistent_syn(const QuantizedObservation& obs, const GaborFrame& frame,
                                      const SolverConfig& cfg, const SolveOptions& options = {});
    SolverRun solve_cp_consistent_ana(const QuantizedObservation& obs, const GaborFrame& frame,
                                      const SolverConfig& cfg, const SolveOptions& options = {});
    SolverRun solve_fista_inconsistent_syn(const QuantizedObservation& obs, const GaborFrame& frame,
                                           const SolverConfig& cfg, const SolveOptions& options = {});
    SolverRun solve_dr_inconsistent_syn(const QuantizedObservation& obs, const GaborFrame& frame,
                                        const SolverConfig& cfg, const SolveOptions& options = {});
    SolverRun solve_cp_inconsistent_ana(const QuantizedObservation& obs, const GaborFrame& frame,
                                        const SolverConfig& cfg, const SolveOptions& options = {});
    SolverRun solve_dr_approx_ana(const QuantizedObservation& obs, const GaborFrame& frame, const SolverConfig& cfg,
                                  const SolveOptions& options = {});
    SolverRun solve_fista_approx_ana(const QuantizedObservation& obs, const GaborFrame& frame,
                                     const SolverConfig& cfg, const SolveOptions& options = {});
    /// cfg.algorithm selects the variant and must be one of the SPADQ algorithms.
    SolverRun solve_spadq(const QuantizedObservation& obs, const GaborFrame& frame, const SolverConfig& cfg,
                          const SolveOptions& options = {});

    SolverRun run_solver(const QuantizedObservation& obs, const GaborFrame& frame, const SolverConfig& cfg,
                         const SolveOptions& options = {});

    /// lambda ||c||_1 + 1/2 d^2(synthesis(c)), the penalized synthesis objective.
    double penalized_synthesis_objective(std::span<const Complex> c, const Box& box, const GaborFrame& frame,
                                         double lambda);
    /// lambda ||A x||_1 + 1/2 d^2(x), the penalized analysis objective; x may be padded.
    double penalized_analysis_objective(std::span<const double> x, const Box& box, const GaborFrame& frame,
                                        double lambda);
}  // namespace dequant
