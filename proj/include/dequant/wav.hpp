#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string_view>

#include "dequant/types.hpp"

namespace dequant
{
    /// Malformed or unsupported RIFF/WAVE data, or an I/O failure.
    class WavError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    enum class SampleFormat
    {
        Pcm16,
        Pcm24,
        Float32
    };

    SampleFormat parse_sample_format(std::string_view name);

    /// Mono signal with its sample rate in Hz.
    struct Audio
    {
        RealVector samples;
        double sample_rate = 44100.0;
    };

    /// Reads PCM 16/24-bit or 32-bit float WAVE (plain or extensible). Integer samples are divided by
    /// 2^(bits-1); multichannel input is averaged to mono.
    Audio load_wav(const std::filesystem::path& path);

    /// Float32 is lossless for float-representable samples; PCM rounds to nearest and saturates.
    void save_wav(const std::filesystem::path& path, std::span<const double> samples, unsigned sample_rate,
                  SampleFormat format = SampleFormat::Float32);
}  // namespace dequant
