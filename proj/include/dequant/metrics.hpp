#pragma once

#include <cstddef>
#include <limits>
#include <span>

#include "dequant/quant.hpp"

namespace dequant
{
    /// Returned by sdr() when the estimate matches the reference exactly.
    constexpr double kPerfectSdr = std::numeric_limits<double>::infinity();

    struct EvalReport
    {
        double sdr_quantized = 0.0;
        double sdr_reconstructed = 0.0;
        double delta_sdr = 0.0;
        bool consistent = false;
        std::size_t iterations = 0;
    };

    /// 10 log10(||ref||^2 / ||ref - est||^2), in dB.
    double sdr(std::span<const double> reference, std::span<const double> estimate);

    /// Improvement of the estimate over the quantized observation.
    double delta_sdr(std::span<const double> reference, const QuantizedObservation& obs,
                     std::span<const double> estimate);

    EvalReport evaluate(std::span<const double> reference, const QuantizedObservation& obs,
                        std::span<const double> estimate, std::size_t iterations = 0);
}  // namespace dequant
