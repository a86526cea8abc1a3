#pragma once

#include <cstddef>
#include <span>

#include "dequant/frame.hpp"
#include "dequant/quant.hpp"
#include "dequant/types.hpp"

namespace dequant
{
    // Elementwise kernels. Complex inputs are shrunk in magnitude with the phase kept.

    /// v * max(1 - tau/|v|, 0); requires tau > 0.
    ComplexVector soft_threshold(std::span<const Complex> v, double tau);

    /// v - soft_threshold(v, tau): magnitudes capped at tau.
    ComplexVector clip(std::span<const Complex> v, double tau);

    /// Prox of alpha/2 * dist^2 to the box: (alpha * proj(z) + z) / (alpha + 1).
    RealVector prox_dist_sq(std::span<const double> z, const Box& box, double alpha);

    /// Same as prox_dist_sq with the coefficient-domain set {c : synthesis(c) in box}.
    CoefficientGrid prox_dist_sq_star(const CoefficientGrid& z, const Box& box, const GaborFrame& frame,
                                      double alpha);

    /// synthesis(soft_threshold(analysis(x), tau)). Stands in for the prox of tau * ||A x||_1, and
    /// coincides with it when the frame is an orthonormal basis. tau == 0 is accepted (identity).
    RealVector approximal_l1_analysis(std::span<const double> x, const GaborFrame& frame, double tau);

    /// Keeps the k largest-magnitude entries; ties keep the lower index.
    ComplexVector hard_threshold_topk(std::span<const Complex> v, std::size_t k);

    namespace kernels
    {
        // In-place forms used by the solvers; observationally identical to the functions above.
        // tau == 0 is permitted here and leaves soft thresholding as the identity.
        void soft_threshold(std::span<Complex> v, double tau);
        void clip(std::span<Complex> v, double tau);
        void hard_threshold_topk(std::span<Complex> v, std::size_t k, std::vector<std::size_t>& order_scratch);
    }  // namespace kernels
}  // namespace dequant
