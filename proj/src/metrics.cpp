#include "dequant/metrics.hpp"

#include <cmath>

namespace dequant
{
    double sdr(std::span<const double> reference, std::span<const double> estimate)
    {
        require(reference.size() == estimate.size(), "sdr: length mismatch");
        double signal = 0.0;
        double error = 0.0;
        for (std::size_t n = 0; n < reference.size(); ++n)
        {
            const double d = reference[n] - estimate[n];
            signal += reference[n] * reference[n];
            error += d * d;
        }
        require(signal > 0.0, "sdr: reference signal is identically zero");
        if (error == 0.0)
        {
            return kPerfectSdr;
        }
        return 10.0 * std::log10(signal / error);
    }

    double delta_sdr(std::span<const double> reference, const QuantizedObservation& obs,
                     std::span<const double> estimate)
    {
        return sdr(reference, estimate) - sdr(reference, obs.xq);
    }

    EvalReport evaluate(std::span<const double> reference, const QuantizedObservation& obs,
                        std::span<const double> estimate, std::size_t iterations)
    {
        EvalReport report;
        report.sdr_quantized = sdr(reference, obs.xq);
        report.sdr_reconstructed = sdr(reference, estimate);
        report.delta_sdr = report.sdr_reconstructed - report.sdr_quantized;
        report.consistent = is_consistent(estimate, box_of(obs));
        report.iterations = iterations;
        return report;
    }
}  // namespace dequant
