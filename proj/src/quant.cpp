#include "dequant/quant.hpp"

#include <algorithm>
#include <cmath>

namespace dequant
{
    double quantization_step(int w)
    {
        require(w >= 1, "quantization_step: word length must be >= 1");
        return std::ldexp(1.0, 1 - w);
    }

    QuantizedObservation quantize(std::span<const double> x, int w)
    {
        require(!x.empty(), "quantize: empty signal");
        const double delta = quantization_step(w);
        const double top = 1.0 - delta / 2.0;

        QuantizedObservation obs{RealVector(x.size()), w, delta, x.size()};
        for (std::size_t n = 0; n < x.size(); ++n)
        {
            const double v = x[n];
            require(std::isfinite(v) && std::abs(v) <= 1.0 + 1e-9, "quantize: signal must be peak-normalized to [-1, 1]");
            const double sign = v >= 0.0 ? 1.0 : -1.0;
            const double level = sign * delta * (std::floor(std::abs(v) / delta) + 0.5);
            obs.xq[n] = std::clamp(level, -top, top);
        }
        return obs;
    }

    Box box_of(const QuantizedObservation& obs)
    {
        require(!obs.xq.empty(), "box_of: empty observation");
        const double half = obs.delta / 2.0;
        Box box{RealVector(obs.xq.size()), RealVector(obs.xq.size())};
        for (std::size_t n = 0; n < obs.xq.size(); ++n)
        {
            box.lower[n] = obs.xq[n] - half;
            box.upper[n] = obs.xq[n] + half;
        }
        return box;
    }

    void project_gamma_inplace(std::span<double> x, const Box& box)
    {
        require(x.size() == box.size(), "project_gamma: length mismatch");
        for (std::size_t n = 0; n < x.size(); ++n)
        {
            x[n] = std::clamp(x[n], box.lower[n], box.upper[n]);
        }
    }

    RealVector project_gamma(std::span<const double> x, const Box& box)
    {
        RealVector out(x.begin(), x.end());
        project_gamma_inplace(out, box);
        return out;
    }

    double distance_sq_to_box(std::span<const double> x, const Box& box)
    {
        require(x.size() >= box.size(), "distance_sq_to_box: signal shorter than box");
        double acc = 0.0;
        for (std::size_t n = 0; n < box.size(); ++n)
        {
            const double d = x[n] - std::clamp(x[n], box.lower[n], box.upper[n]);
            acc += d * d;
        }
        return acc;
    }

    bool is_consistent(std::span<const double> x, const Box& box, double tol)
    {
        require(x.size() == box.size(), "is_consistent: length mismatch");
        for (std::size_t n = 0; n < x.size(); ++n)
        {
            if (!(x[n] >= box.lower[n] - tol && x[n] <= box.upper[n] + tol))
            {
                return false;
            }
        }
        return true;
    }

    namespace detail
    {
        void project_gamma_star(std::span<const Complex> c, const Box& box, const GaborFrame& frame,
                                std::span<Complex> out, RealVector& signal_scratch, ComplexVector& coeff_scratch)
        {
            require(c.size() == frame.coeff_count() && out.size() == c.size(),
                    "project_gamma_star: coefficient count does not match frame geometry");
            require(box.size() <= frame.padded_len(), "project_gamma_star: box longer than frame");

            signal_scratch.resize(frame.padded_len());
            coeff_scratch.resize(frame.coeff_count());
            frame.synthesis(c, signal_scratch);
            // Residual proj(A*c) - A*c; zero on the unconstrained padded tail.
            for (std::size_t n = 0; n < signal_scratch.size(); ++n)
            {
                const double v = signal_scratch[n];
                signal_scratch[n] = n < box.size() ? std::clamp(v, box.lower[n], box.upper[n]) - v : 0.0;
            }
            frame.analysis(signal_scratch, coeff_scratch);
            for (std::size_t i = 0; i < c.size(); ++i)
            {
                out[i] = c[i] + coeff_scratch[i];
            }
        }
    }  // namespace detail

    CoefficientGrid project_gamma_star(const CoefficientGrid& c, const Box& box, const GaborFrame& frame)
    {
        require(frame.conforms(c), "project_gamma_star: coefficient grid does not match frame geometry");
        CoefficientGrid out(c.frames, c.channels);
        RealVector signal;
        ComplexVector coeffs;
        detail::project_gamma_star(c.values, box, frame, out.values, signal, coeffs);
        return out;
    }
}  // namespace dequant
