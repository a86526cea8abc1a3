#pragma once

#include <span>

#include "dequant/frame.hpp"
#include "dequant/types.hpp"

namespace dequant
{
    /// Samples of a uniform mid-riser quantizer with word length w and step 2^(1-w).
    struct QuantizedObservation
    {
        RealVector xq;
        int w = 0;
        double delta = 0.0;
        std::size_t original_len = 0;
    };

    /// The consistency set: every sample within its quantization interval. Treated as closed.
    struct Box
    {
        RealVector lower;
        RealVector upper;

        std::size_t size() const noexcept { return lower.size(); }
    };

    constexpr double kConsistencyTol = 1e-9;

    /// 2^(1 - w), exact.
    double quantization_step(int w);

    /// Mid-riser quantizer. Samples at exactly +-1 are clamped to the outermost level +-(1 - delta/2).
    QuantizedObservation quantize(std::span<const double> x, int w);

    Box box_of(const QuantizedObservation& obs);

    RealVector project_gamma(std::span<const double> x, const Box& box);
    void project_gamma_inplace(std::span<double> x, const Box& box);

    /// Squared Euclidean distance from x to the box.
    double distance_sq_to_box(std::span<const double> x, const Box& box);

    /// Projection onto {c : synthesis(c) in box}; exact for a Parseval frame.
    CoefficientGrid project_gamma_star(const CoefficientGrid& c, const Box& box, const GaborFrame& frame);

    bool is_consistent(std::span<const double> x, const Box& box, double tol = kConsistencyTol);

    namespace detail
    {
        /// Workspace-reusing form of project_gamma_star; box may be shorter than padded_len, in which
        /// case the padded tail is left unconstrained.
        void project_gamma_star(std::span<const Complex> c, const Box& box, const GaborFrame& frame,
                                std::span<Complex> out, RealVector& signal_scratch,
                                ComplexVector& coeff_scratch);
    }  // namespace detail
}  // namespace dequant
