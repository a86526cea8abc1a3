#include "dequant/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dequant
{
    namespace kernels
    {
        void soft_threshold(std::span<Complex> v, double tau)
        {
            for (Complex& z : v)
            {
                const double mag = std::abs(z);
                z = mag > tau ? z * ((mag - tau) / mag) : Complex{};
            }
        }

        void clip(std::span<Complex> v, double tau)
        {
            for (Complex& z : v)
            {
                const double mag = std::abs(z);
                if (mag > tau)
                {
                    z -= z * ((mag - tau) / mag);
                }
            }
        }

        void hard_threshold_topk(std::span<Complex> v, std::size_t k, std::vector<std::size_t>& order)
        {
            if (k >= v.size())
            {
                return;
            }
            if (k == 0)
            {
                std::fill(v.begin(), v.end(), Complex{});
                return;
            }
            // Compare squared magnitudes; exact ties resolve to the lower index.
            order.resize(v.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            const auto before = [&v](std::size_t a, std::size_t b) {
                const double na = std::norm(v[a]);
                const double nb = std::norm(v[b]);
                return na > nb || (na == nb && a < b);
            };
            std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), before);
            for (auto it = order.begin() + static_cast<std::ptrdiff_t>(k); it != order.end(); ++it)
            {
                v[*it] = Complex{};
            }
        }
    }  // namespace kernels

    ComplexVector soft_threshold(std::span<const Complex> v, double tau)
    {
        require(tau > 0.0, "soft_threshold: threshold must be positive");
        ComplexVector out(v.begin(), v.end());
        kernels::soft_threshold(out, tau);
        return out;
    }

    ComplexVector clip(std::span<const Complex> v, double tau)
    {
        require(tau > 0.0, "clip: threshold must be positive");
        ComplexVector out(v.begin(), v.end());
        kernels::clip(out, tau);
        return out;
    }

    RealVector prox_dist_sq(std::span<const double> z, const Box& box, double alpha)
    {
        require(alpha > 0.0, "prox_dist_sq: alpha must be positive");
        require(z.size() == box.size(), "prox_dist_sq: length mismatch");
        RealVector out(z.size());
        for (std::size_t n = 0; n < z.size(); ++n)
        {
            const double p = std::clamp(z[n], box.lower[n], box.upper[n]);
            out[n] = (alpha * p + z[n]) / (alpha + 1.0);
        }
        return out;
    }

    CoefficientGrid prox_dist_sq_star(const CoefficientGrid& z, const Box& box, const GaborFrame& frame, double alpha)
    {
        require(alpha > 0.0, "prox_dist_sq_star: alpha must be positive");
        CoefficientGrid out = project_gamma_star(z, box, frame);
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            out.values[i] = (alpha * out.values[i] + z.values[i]) / (alpha + 1.0);
        }
        return out;
    }

    RealVector approximal_l1_analysis(std::span<const double> x, const GaborFrame& frame, double tau)
    {
        require(tau >= 0.0, "approximal_l1_analysis: threshold must be nonnegative");
        CoefficientGrid c = frame.analysis(x);
        kernels::soft_threshold(c.values, tau);
        RealVector out = frame.synthesis(c);
        out.resize(x.size());
        return out;
    }

    ComplexVector hard_threshold_topk(std::span<const Complex> v, std::size_t k)
    {
        require(k <= v.size(), "hard_threshold_topk: k exceeds vector length");
        ComplexVector out(v.begin(), v.end());
        std::vector<std::size_t> order;
        kernels::hard_threshold_topk(out, k, order);
        return out;
    }
}  // namespace dequant
