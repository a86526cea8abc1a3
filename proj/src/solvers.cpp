#include "dequant/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include "dequant/metrics.hpp"
#include "dequant/prox.hpp"

namespace dequant
{
    namespace
    {
        struct AlgorithmName
        {
            Algorithm algorithm;
            std::string_view id;
        };

        constexpr std::array<AlgorithmName, 10> kNames = {{
            {Algorithm::DrConsSyn, "DR_CONS_SYN"},
            {Algorithm::CpConsAna, "CP_CONS_ANA"},
            {Algorithm::FistaInconsSyn, "FISTA_INCONS_SYN"},
            {Algorithm::DrInconsSyn, "DR_INCONS_SYN"},
            {Algorithm::CpInconsAna, "CP_INCONS_ANA"},
            {Algorithm::DrApproxAna, "DR_APPROX_ANA"},
            {Algorithm::FistaApproxAna, "FISTA_APPROX_ANA"},
            {Algorithm::ASpadq, "A_SPADQ"},
            {Algorithm::SSpadq, "S_SPADQ"},
            {Algorithm::SSpadqDr, "S_SPADQ_DR"},
        }};

        using Clock = std::chrono::steady_clock;

        // Clamps the observed part of a padded signal; the padded tail is unconstrained.
        void clamp_observed(std::span<double> x, const Box& box)
        {
            for (std::size_t n = 0; n < box.size(); ++n)
            {
                x[n] = std::clamp(x[n], box.lower[n], box.upper[n]);
            }
        }

        RealVector padded_copy(std::span<const double> x, std::size_t padded_len)
        {
            RealVector out(padded_len, 0.0);
            std::copy(x.begin(), x.end(), out.begin());
            return out;
        }

        template <typename T>
        bool small_change(std::span<const T> previous, std::span<const T> current, double tol)
        {
            if (tol <= 0.0)
            {
                return false;
            }
            const double scale = norm2(previous);
            return scale > 0.0 && distance(previous, current) <= tol * scale;
        }

        /// Shared bookkeeping: initial state, trace, timing and the final result.
        class Recorder
        {
        public:
            Recorder(const QuantizedObservation& obs, const GaborFrame& frame, const SolverConfig& cfg,
                     const SolveOptions& options)
                : obs_(obs), frame_(frame), cfg_(cfg), options_(options), box_(box_of(obs)), start_(Clock::now())
            {
                cfg.validate();
                require(obs.xq.size() == obs.original_len, "solver: observation length is inconsistent");
                require(obs.original_len <= frame.padded_len(), "solver: observation longer than frame");
                require(options.reference.empty() || options.reference.size() == obs.original_len,
                        "solver: reference length must match the observation");
                require(options.initial_signal.empty() || options.initial_signal.size() == obs.original_len ||
                            options.initial_signal.size() == frame.padded_len(),
                        "solver: initial signal length must match the observation or the padded length");
                require(options.initial_coefficients.empty() ||
                            options.initial_coefficients.size() == frame.coeff_count(),
                        "solver: initial coefficients do not match frame geometry");
            }

            const Box& box() const noexcept { return box_; }

            RealVector initial_signal() const
            {
                if (!options_.initial_signal.empty())
                {
                    return padded_copy(options_.initial_signal, frame_.padded_len());
                }
                return padded_copy(obs_.xq, frame_.padded_len());
            }

            ComplexVector initial_coefficients() const
            {
                if (!options_.initial_coefficients.empty())
                {
                    return ComplexVector(options_.initial_coefficients.begin(), options_.initial_coefficients.end());
                }
                ComplexVector c(frame_.coeff_count());
                frame_.analysis(initial_signal(), c);
                return c;
            }

            bool wants_objective(std::size_t iteration) const
            {
                return cfg_.trace_objective_every > 0 && iteration % cfg_.trace_objective_every == 0;
            }

            bool wants_sdr(std::size_t iteration) const
            {
                return !options_.reference.empty() && cfg_.trace_sdr_every > 0 && iteration % cfg_.trace_sdr_every == 0;
            }


            /// objective and signal are evaluated only when the trace needs them at this iteration.
            void record(std::size_t iteration, const std::function<double()>& objective,
                        const std::function<std::span<const double>()>& signal,
                        std::optional<std::size_t> sparsity = std::nullopt)
            {
                TracePoint point;
                point.iteration = iteration;
                point.sparsity = sparsity;
                if (wants_objective(iteration) && objective)
                {
                    point.objective = objective();
                }
                if (wants_sdr(iteration) && signal)
                {
                    const auto x = signal();
                    point.sdr = sdr(options_.reference, x.first(obs_.original_len));
                }
                if (point.objective || point.sdr || point.sparsity)
                {
                    trace_.push_back(point);
                }
            }

            SolverRun finish(std::span<const double> padded_signal, std::size_t iterations,
                             ComplexVector coefficients = {})
            {
                SolverRun run;
                run.config = cfg_;
                run.iterations_done = iterations;
                run.final_signal.assign(padded_signal.begin(), padded_signal.begin() + static_cast<std::ptrdiff_t>(obs_.original_len));
                run.final_coefficients = std::move(coefficients);
                run.trace = std::move(trace_);
                run.consistent = is_consistent(run.final_signal, box_);
                run.wall_time = std::chrono::duration<double>(Clock::now() - start_).count();
                return run;
            }

        private:
            const QuantizedObservation& obs_;
            const GaborFrame& frame_;
            const SolverConfig& cfg_;
            const SolveOptions& options_;
            Box box_;
            Clock::time_point start_;
            std::vector<TracePoint> trace_;
        };

        double analysis_l1(std::span<const double> x, const GaborFrame& frame, ComplexVector& scratch)
        {
            scratch.resize(frame.coeff_count());
            frame.analysis(x, scratch);
            return norm1(scratch);
        }

        double analysis_objective(std::span<const double> x, const Box& box, const GaborFrame& frame, double lambda,
                                  ComplexVector& scratch)
        {
            return lambda * analysis_l1(x, frame, scratch) + 0.5 * distance_sq_to_box(x, box);
        }

        void fista_step_size(double& t, double& momentum)
        {
            const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
            momentum = (t - 1.0) / t_next;
            t = t_next;
        }
    }  // namespace

    std::string_view algorithm_id(Algorithm algorithm)
    {
        for (const auto& entry : kNames)
        {
            if (entry.algorithm == algorithm)
            {
                return entry.id;
            }
        }
        return "UNKNOWN";
    }

    std::optional<Algorithm> parse_algorithm(std::string_view id)
    {
        for (const auto& entry : kNames)
        {
            if (entry.id == id)
            {
                return entry.algorithm;
            }
        }
        return std::nullopt;
    }

    bool is_consistent_variant(Algorithm a) { return a == Algorithm::DrConsSyn || a == Algorithm::CpConsAna; }

    bool is_spadq(Algorithm a) { return a == Algorithm::ASpadq || a == Algorithm::SSpadq || a == Algorithm::SSpadqDr; }

    bool is_chambolle_pock(Algorithm a) { return a == Algorithm::CpConsAna || a == Algorithm::CpInconsAna; }

    bool is_fista(Algorithm a) { return a == Algorithm::FistaInconsSyn || a == Algorithm::FistaApproxAna; }

    void SolverConfig::validate() const
    {
        require(algorithm_id(algorithm) != "UNKNOWN", "config: unknown algorithm");
        require(gamma > 0.0, "config: gamma must be positive");
        require(lambda > 0.0, "config: lambda must be positive");
        require(std::isfinite(stop_tol) && stop_tol >= 0.0, "config: stop_tol must be nonnegative");
        if (is_chambolle_pock(algorithm))
        {
            require(zeta > 0.0 && sigma > 0.0, "config: zeta and sigma must be positive");
            // ||A|| = 1 for a Parseval frame.
            require(zeta * sigma < 1.0, "config: step sizes must satisfy zeta * sigma < 1");
            require(rho >= 0.0 && rho <= 1.0, "config: rho must lie in [0, 1]");
        }
        if (is_fista(algorithm))
        {
            require(mu > 0.0 && mu <= 1.0, "config: mu must lie in (0, 1]");
        }
        if (is_spadq(algorithm))
        {
            require(spadq_s >= 1 && spadq_r >= 1, "config: SPADQ budget increment and period must be >= 1");
            require(spadq_epsilon > 0.0, "config: SPADQ epsilon must be positive");
        }
    }

    double penalized_synthesis_objective(std::span<const Complex> c, const Box& box, const GaborFrame& frame,
                                         double lambda)
    {
        RealVector x(frame.padded_len());
        frame.synthesis(c, x);
        return lambda * norm1(c) + 0.5 * distance_sq_to_box(x, box);
    }

    double penalized_analysis_objective(std::span<const double> x, const Box& box, const GaborFrame& frame,
                                        double lambda)
    {
        ComplexVector scratch;
        return analysis_objective(x, box, frame, lambda, scratch);
    }

    // c = proj_{Gamma*}(z);  z <- z + soft_gamma(2c - z) - c
    SolverRun solve_dr_consistent_syn(const QuantizedObservation& obs, const GaborFrame& frame,
                                      const SolverConfig& cfg, const SolveOptions& options)
    {
        Recorder rec(obs, frame, cfg, options);
        const Box& box = rec.box();

        ComplexVector z = rec.initial_coefficients();
        ComplexVector c(z.size());
        ComplexVector step(z.size());
        ComplexVector z_prev;
        RealVector synth(frame.padded_len());
        ComplexVector coeff_scratch;
        RealVector signal = rec.initial_signal();

        std::size_t it = 0;
        while (it < cfg.max_iters)
        {
            ++it;
            detail::project_gamma_star(z, box, frame, c, synth, coeff_scratch);
            for (std::size_t i = 0; i < z.size(); ++i)
            {
                step[i] = 2.0 * c[i] - z[i];
            }
            kernels::soft_threshold(step, cfg.gamma);
            if (cfg.stop_tol > 0.0)
            {
                z_prev = z;
            }
            for (std::size_t i = 0; i < z.size(); ++i)
            {
                z[i] += step[i] - c[i];
            }

            rec.record(
                it, [&] { return norm1(c); },
                [&]() -> std::span<const double> {
                    frame.synthesis(c, signal);
                    return signal;
                });
            if (small_change<Complex>(z_prev, z, cfg.stop_tol))
            {
                break;
            }
        }
        if (it > 0)
        {
            frame.synthesis(c, signal);
        }
        return rec.finish(signal, it, it > 0 ? std::move(c) : rec.initial_coefficients());
    }

    // q <- clip_1(q + sigma A x);  p <- proj_Gamma(p - zeta A* q);  x <- p + rho (p - p_prev)
    SolverRun solve_cp_consistent_ana(const QuantizedObservation& obs, const GaborFrame& frame,
                                      const SolverConfig& cfg, const SolveOptions& options)
    {
        Recorder rec(obs, frame, cfg, options);
        const Box& box = rec.box();

        RealVector p = rec.initial_signal();
        RealVector x = p;
        RealVector p_prev(p.size());
        RealVector back(p.size());
        ComplexVector q(frame.coeff_count());
        ComplexVector ax(frame.coeff_count());
        ComplexVector scratch;

        std::size_t it = 0;
        while (it < cfg.max_iters)
        {
            ++it;
            frame.analysis(x, ax);
            for (std::size_t i = 0; i < q.size(); ++i)
            {
                q[i] += cfg.sigma * ax[i];
            }
            kernels::clip(q, 1.0);
            frame.synthesis(q, back);
            p_prev = p;
            for (std::size_t n = 0; n < p.size(); ++n)
            {
                p[n] -= cfg.zeta * back[n];
            }
            clamp_observed(p, box);
            for (std::size_t n = 0; n < p.size(); ++n)
            {
                x[n] = p[n] + cfg.rho * (p[n] - p_prev[n]);
            }

            rec.record(
                it, [&] { return analysis_l1(p, frame, scratch); }, [&]() -> std::span<const double> { return p; });
            if (small_change<double>(p_prev, p, cfg.stop_tol))
            {
                break;
            }
        }
        return rec.finish(p, it);
    }

    // c <- soft_{lambda mu}(z - mu A(A*z - proj(A*z)));  FISTA momentum on c
    SolverRun solve_fista_inconsistent_syn(const QuantizedObservation& obs, const GaborFrame& frame,
                                           const SolverConfig& cfg, const SolveOptions& options)
    {
        Recorder rec(obs, frame, cfg, options);
        const Box& box = rec.box();

        ComplexVector c = rec.initial_coefficients();
        ComplexVector z = c;
        ComplexVector c_prev(c.size());
        ComplexVector grad(c.size());
        RealVector synth(frame.padded_len());
        RealVector signal(frame.padded_len());
        double t = 1.0;

        std::size_t it = 0;
        while (it < cfg.max_iters)
        {
            ++it;
            frame.synthesis(z, synth);
            for (std::size_t n = 0; n < box.size(); ++n)
            {
                synth[n] -= std::clamp(synth[n], box.lower[n], box.upper[n]);
            }
            std::fill(synth.begin() + static_cast<std::ptrdiff_t>(box.size()), synth.end(), 0.0);
            frame.analysis(synth, grad);

            c_prev.swap(c);
            for (std::size_t i = 0; i < c.size(); ++i)
            {
                c[i] = z[i] - cfg.mu * grad[i];
            }
            kernels::soft_threshold(c, cfg.lambda * cfg.mu);

            double momentum = 0.0;
            fista_step_size(t, momentum);
            for (std::size_t i = 0; i < c.size(); ++i)
            {
                z[i] = c[i] + momentum * (c[i] - c_prev[i]);
            }

            bool synthesized = false;
            const auto current_signal = [&]() -> std::span<const double> {
                if (!synthesized)
                {
                    frame.synthesis(c, signal);
                    synthesized = true;
                }
                return signal;
            };
            rec.record(
                it,
                [&] {
                    const auto x = current_signal();
                    return cfg.lambda * norm1(c) + 0.5 * distance_sq_to_box(x, box);
                },
                current_signal);
            if (small_change<Complex>(c_prev, c, cfg.stop_tol))
            {
                break;
            }
        }
        frame.synthesis(c, signal);
        return rec.finish(signal, it, std::move(c));
    }

    // c = (gamma proj_{Gamma*}(z) + z) / (gamma + 1);  z <- z + soft_{gamma lambda}(2c - z) - c
    SolverRun solve_dr_inconsistent_syn(const QuantizedObservation& obs, const GaborFrame& frame,
                                        const SolverConfig& cfg, const SolveOptions& options)
    {
        Recorder rec(obs, frame, cfg, options);
        const Box& box = rec.box();
        const double g = cfg.gamma;

        ComplexVector z = rec.initial_coefficients();
        ComplexVector c(z.size());
        ComplexVector step(z.size());
        ComplexVector z_prev;
        RealVector synth(frame.padded_len());
        RealVector signal(frame.padded_len());
        ComplexVector coeff_scratch;

        std::size_t it = 0;
        while (it < cfg.max_iters)
        {
            ++it;
            detail::project_gamma_star(z, box, frame, c, synth, coeff_scratch);
            for (std::size_t i = 0; i < z.size(); ++i)
            {
                c[i] = (g * c[i] + z[i]) / (g + 1.0);
                step[i] = 2.0 * c[i] - z[i];
            }
            kernels::soft_threshold(step, g * cfg.lambda);
            if (cfg.stop_tol > 0.0)
            {
                z_prev = z;
            }
            for (std::size_t i = 0; i < z.size(); ++i)
            {
                z[i] += step[i] - c[i];
            }

            bool synthesized = false;
            const auto current_signal = [&]() -> std::span<const double> {
                if (!synthesized)
                {
                    frame.synthesis(c, signal);
                    synthesized = true;
                }
                return signal;
            };
            rec.record(
                it,
                [&] {
                    const auto x = current_signal();
                    return cfg.lambda * norm1(c) + 0.5 * distance_sq_to_box(x, box);
                },
                current_signal);
            if (small_change<Complex>(z_prev, z, cfg.stop_tol))
            {
                break;
            }
        }
        if (it == 0)
        {
            return rec.finish(rec.initial_signal(), 0, rec.initial_coefficients());
        }
        frame.synthesis(c, signal);
        return rec.finish(signal, it, std::move(c));
    }

    // c <- clip_lambda(c + sigma A x);  u = p - zeta A* c;  p <- (zeta proj(u) + u) / (zeta + 1);
    // x <- p + rho (p - p_prev)
    SolverRun solve_cp_inconsistent_ana(const QuantizedObservation& obs, const GaborFrame& frame,
                                        const SolverConfig& cfg, const SolveOptions& options)
    {
        Recorder rec(obs, frame, cfg, options);
        const Box& box = rec.box();

        RealVector p = rec.initial_signal();
        RealVector x = p;
        RealVector p_prev(p.size());
        RealVector back(p.size());
        ComplexVector c(frame.coeff_count());
        ComplexVector ax(frame.coeff_count());
        ComplexVector scratch;

        std::size_t it = 0;
        while (it < cfg.max_iters)
        {
            ++it;
            frame.analysis(x, ax);
            for (std::size_t i = 0; i < c.size(); ++i)
            {
                c[i] += cfg.sigma * ax[i];
            }
            kernels::clip(c, cfg.lambda);
            frame.synthesis(c, back);
            p_prev = p;
            for (std::size_t n = 0; n < p.size(); ++n)
            {
                const double u = p[n] - cfg.zeta * back[n];
                const double proj = n < box.size() ? std::clamp(u, box.lower[n], box.upper[n]) : u;
                p[n] = (cfg.zeta * proj + u) / (cfg.zeta + 1.0);
            }
            for (std::size_t n = 0; n < p.size(); ++n)
            {
                x[n] = p[n] + cfg.rho * (p[n] - p_prev[n]);
            }

            rec.record(
                it, [&] { return analysis_objective(p, box, frame, cfg.lambda, scratch); },
                [&]() -> std::span<const double> { return p; });
            if (small_change<double>(p_prev, p, cfg.stop_tol))
            {
                break;
            }
        }
        return rec.finish(p, it);
    }

    // x = (gamma proj(u) + u) / (gamma + 1);  u <- u + A* soft_{gamma lambda}(A(2x - u)) - x
    SolverRun solve_dr_approx_ana(const QuantizedObservation& obs, const GaborFrame& frame, const SolverConfig& cfg,
                                  const SolveOptions& options)
    {
        Recorder rec(obs, frame, cfg, options);
        const Box& box = rec.box();
        const double g = cfg.gamma;

        RealVector u = rec.initial_signal();
        RealVector x = u;
        RealVector reflected(u.size());
        RealVector u_prev;
        ComplexVector coeffs(frame.coeff_count());
        ComplexVector scratch;

        std::size_t it = 0;
        while (it < cfg.max_iters)
        {
            ++it;
            for (std::size_t n = 0; n < u.size(); ++n)
            {
                const double proj = n < box.size() ? std::clamp(u[n], box.lower[n], box.upper[n]) : u[n];
                x[n] = (g * proj + u[n]) / (g + 1.0);
                reflected[n] = 2.0 * x[n] - u[n];
            }
            frame.analysis(reflected, coeffs);
            kernels::soft_threshold(coeffs, g * cfg.lambda);
            frame.synthesis(coeffs, reflected);
            if (cfg.stop_tol > 0.0)
            {
                u_prev = u;
            }
            for (std::size_t n = 0; n < u.size(); ++n)
            {
                u[n] += reflected[n] - x[n];
            }

            rec.record(
                it, [&] { return analysis_objective(x, box, frame, cfg.lambda, scratch); },
                [&]() -> std::span<const double> { return x; });
            if (small_change<double>(u_prev, u, cfg.stop_tol))
            {
                break;
            }
        }
        return rec.finish(x, it);
    }

    // x <- A* soft_{mu lambda}(A(u - mu (u - proj(u))));  FISTA momentum on x
    SolverRun solve_fista_approx_ana(const QuantizedObservation& obs, const GaborFrame& frame,
                                     const SolverConfig& cfg, const SolveOptions& options)
    {
        Recorder rec(obs, frame, cfg, options);
        const Box& box = rec.box();

        RealVector x = rec.initial_signal();
        RealVector u = x;
        RealVector x_prev(x.size());
        RealVector v(x.size());
        ComplexVector coeffs(frame.coeff_count());
        ComplexVector scratch;
        double t = 1.0;

        std::size_t it = 0;
        while (it < cfg.max_iters)
        {
            ++it;
            for (std::size_t n = 0; n < u.size(); ++n)
            {
                const double proj = n < box.size() ? std::clamp(u[n], box.lower[n], box.upper[n]) : u[n];
                v[n] = u[n] - cfg.mu * (u[n] - proj);
            }
            frame.analysis(v, coeffs);
            kernels::soft_threshold(coeffs, cfg.mu * cfg.lambda);
            x_prev.swap(x);
            frame.synthesis(coeffs, x);

            double momentum = 0.0;
            fista_step_size(t, momentum);
            for (std::size_t n = 0; n < x.size(); ++n)
            {
                u[n] = x[n] + momentum * (x[n] - x_prev[n]);
            }

            rec.record(
                it, [&] { return analysis_objective(x, box, frame, cfg.lambda, scratch); },
                [&]() -> std::span<const double> { return x; });
            if (small_change<double>(x_prev, x, cfg.stop_tol))
            {
                break;
            }
        }
        return rec.finish(x, it);
    }

    SolverRun solve_spadq(const QuantizedObservation& obs, const GaborFrame& frame, const SolverConfig& cfg,
                          const SolveOptions& options)
    {
        require(is_spadq(cfg.algorithm), "solve_spadq: algorithm is not a SPADQ variant");
        Recorder rec(obs, frame, cfg, options);
        const Box& box = rec.box();
        const std::size_t q_len = frame.coeff_count();

        std::size_t k = std::min(cfg.spadq_s, q_len);
        const auto grow_budget = [&](std::size_t it) {
            if (it % cfg.spadq_r == 0)
            {
                k = std::min(k + cfg.spadq_s, q_len);
            }
        };
        std::vector<std::size_t> order;
        RealVector signal(frame.padded_len());
        std::size_t it = 0;

        if (cfg.algorithm == Algorithm::ASpadq)
        {
            // z = H_k(A x + u);  x = proj(A*(z - u));  stop when ||A x - z|| <= eps;  u += A x - z
            RealVector x = rec.initial_signal();
            ComplexVector ax(q_len);
            ComplexVector z(q_len);
            ComplexVector u(q_len);
            ComplexVector shifted(q_len);
            frame.analysis(x, ax);
            while (it < cfg.max_iters)
            {
                ++it;
                for (std::size_t i = 0; i < q_len; ++i)
                {
                    z[i] = ax[i] + u[i];
                }
                kernels::hard_threshold_topk(z, k, order);
                for (std::size_t i = 0; i < q_len; ++i)
                {
                    shifted[i] = z[i] - u[i];
                }
                frame.synthesis(shifted, x);
                clamp_observed(x, box);
                frame.analysis(x, ax);
                const double residual = distance(std::span<const Complex>(ax), std::span<const Complex>(z));
                rec.record(
                    it, [&] { return residual; }, [&]() -> std::span<const double> { return x; }, k);
                if (residual <= cfg.spadq_epsilon)
                {
                    break;
                }
                for (std::size_t i = 0; i < q_len; ++i)
                {
                    u[i] += ax[i] - z[i];
                }
                grow_budget(it);
            }
            return rec.finish(x, it);
        }

        if (cfg.algorithm == Algorithm::SSpadq)
        {
            // c = H_k(A(x - u));  s = A* c;  x = proj(s + u);  stop when ||x - s|| <= eps;  u += s - x
            RealVector x = rec.initial_signal();
            RealVector u(x.size(), 0.0);
            RealVector diff(x.size());
            RealVector s(x.size());
            ComplexVector c(q_len);
            while (it < cfg.max_iters)
            {
                ++it;
                for (std::size_t n = 0; n < x.size(); ++n)
                {
                    diff[n] = x[n] - u[n];
                }
                frame.analysis(diff, c);
                kernels::hard_threshold_topk(c, k, order);
                frame.synthesis(c, s);
                for (std::size_t n = 0; n < x.size(); ++n)
                {
                    x[n] = s[n] + u[n];
                }
                clamp_observed(x, box);
                const double residual = distance(std::span<const double>(x), std::span<const double>(s));
                rec.record(
                    it, [&] { return residual; }, [&]() -> std::span<const double> { return x; }, k);
                if (residual <= cfg.spadq_epsilon)
                {
                    break;
                }
                for (std::size_t n = 0; n < x.size(); ++n)
                {
                    u[n] += s[n] - x[n];
                }
                grow_budget(it);
            }
            return rec.finish(x, it, std::move(c));
        }

        // S_SPADQ_DR: z = H_k(c + u);  c = proj_{Gamma*}(z - u);  stop when ||c - z|| <= eps;  u += c - z
        ComplexVector c = rec.initial_coefficients();
        ComplexVector z(q_len);
        ComplexVector u(q_len);
        ComplexVector shifted(q_len);
        ComplexVector coeff_scratch;
        RealVector synth;
        while (it < cfg.max_iters)
        {
            ++it;
            for (std::size_t i = 0; i < q_len; ++i)
            {
                z[i] = c[i] + u[i];
            }
            kernels::hard_threshold_topk(z, k, order);
            for (std::size_t i = 0; i < q_len; ++i)
            {
                shifted[i] = z[i] - u[i];
            }
            detail::project_gamma_star(shifted, box, frame, c, synth, coeff_scratch);
            const double residual = distance(std::span<const Complex>(c), std::span<const Complex>(z));
            rec.record(
                it, [&] { return residual; },
                [&]() -> std::span<const double> {
                    frame.synthesis(c, signal);
                    return signal;
                },
                k);
            if (residual <= cfg.spadq_epsilon)
            {
                break;
            }
            for (std::size_t i = 0; i < q_len; ++i)
            {
                u[i] += c[i] - z[i];
            }
            grow_budget(it);
        }
        frame.synthesis(c, signal);
        if (it == 0)
        {
            return rec.finish(rec.initial_signal(), 0, std::move(c));
        }
        return rec.finish(signal, it, std::move(c));
    }

    SolverRun run_solver(const QuantizedObservation& obs, const GaborFrame& frame, const SolverConfig& cfg,
                         const SolveOptions& options)
    {
        switch (cfg.algorithm)
        {
            case Algorithm::DrConsSyn: return solve_dr_consistent_syn(obs, frame, cfg, options);
            case Algorithm::CpConsAna: return solve_cp_consistent_ana(obs, frame, cfg, options);
            case Algorithm::FistaInconsSyn: return solve_fista_inconsistent_syn(obs, frame, cfg, options);
            case Algorithm::DrInconsSyn: return solve_dr_inconsistent_syn(obs, frame, cfg, options);
            case Algorithm::CpInconsAna: return solve_cp_inconsistent_ana(obs, frame, cfg, options);
            case Algorithm::DrApproxAna: return solve_dr_approx_ana(obs, frame, cfg, options);
            case Algorithm::FistaApproxAna: return solve_fista_approx_ana(obs, frame, cfg, options);
            case Algorithm::ASpadq:
            case Algorithm::SSpadq:
            case Algorithm::SSpadqDr: return solve_spadq(obs, frame, cfg, options);
        }
        throw InvalidArgument("run_solver: unknown algorithm");
    }
}  // namespace dequant
