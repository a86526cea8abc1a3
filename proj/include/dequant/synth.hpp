#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dequant/wav.hpp"

namespace dequant
{
    struct MultisineSpec
    {
        std::vector<double> freqs;
        std::vector<double> amps;  ///< empty means unit amplitudes
        double duration = 2.0;
        double rate = 44100.0;
    };

    /// Linear sweep from f0 to f1 Hz.
    struct ChirpSpec
    {
        double f0 = 100.0;
        double f1 = 8000.0;
        double duration = 2.0;
        double rate = 44100.0;
    };

    /// Gaussian white noise from a seeded mt19937_64.
    struct NoiseSpec
    {
        std::uint64_t seed = 1;
        double duration = 1.0;
        double rate = 44100.0;
    };

    using SignalDescriptor = std::variant<MultisineSpec, ChirpSpec, NoiseSpec>;

    /// Parses "multisine:freqs=440,880;amps=1,0.5;duration=2;rate=44100", "chirp:f0=100;f1=8000;duration=2"
    /// or "noise:seed=7;duration=1". Bare "multisine" is the five-tone reference signal.
    SignalDescriptor parse_descriptor(std::string_view text);
    std::string describe(const SignalDescriptor& descriptor);

    /// Deterministic, peak-normalized signal.
    Audio synth_test_signal(const SignalDescriptor& descriptor);

    /// 2 s at 44.1 kHz, five partials.
    MultisineSpec reference_multisine();

    /// Divides by max |x|, so the peak sample becomes exactly +-1. Zero input is returned unchanged.
    RealVector peak_normalize(std::span<const double> x);
}  // namespace dequant
