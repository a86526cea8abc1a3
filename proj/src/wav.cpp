#include "dequant/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace dequant
{
    namespace
    {
        constexpr std::uint16_t kFormatPcm = 1;
        constexpr std::uint16_t kFormatFloat = 3;
        constexpr std::uint16_t kFormatExtensible = 0xFFFE;

        std::uint16_t read_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

        std::uint32_t read_u32(const std::uint8_t* p)
        {
            return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                   (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
        }

        void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v)
        {
            out.push_back(static_cast<std::uint8_t>(v & 0xFF));
            out.push_back(static_cast<std::uint8_t>(v >> 8));
        }

        void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
        {
            for (int shift = 0; shift < 32; shift += 8)
            {
                out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
            }
        }

        void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

        struct Format
        {
            std::uint16_t code = 0;
            std::uint16_t channels = 0;
            std::uint32_t rate = 0;
            std::uint16_t bits = 0;
        };

        double decode_sample(const std::uint8_t* p, const Format& fmt)
        {
            if (fmt.code == kFormatFloat)
            {
                float f;
                std::uint32_t raw = read_u32(p);
                std::memcpy(&f, &raw, sizeof f);
                return static_cast<double>(f);
            }
            if (fmt.bits == 16)
            {
                return static_cast<double>(static_cast<std::int16_t>(read_u16(p))) / 32768.0;
            }
            // 24-bit: sign-extend from bit 23.
            std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
            if (v & 0x800000)
            {
                v -= 0x1000000;
            }
            return static_cast<double>(v) / 8388608.0;
        }
    }  // namespace

    SampleFormat parse_sample_format(std::string_view name)
    {
        if (name == "pcm16")
        {
            return SampleFormat::Pcm16;
        }
        if (name == "pcm24")
        {
            return SampleFormat::Pcm24;
        }
        if (name == "float32")
        {
            return SampleFormat::Float32;
        }
        throw InvalidArgument("unknown sample format '" + std::string(name) + "' (expected pcm16, pcm24, float32)");
    }

    Audio load_wav(const std::filesystem::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
        {
            throw WavError("cannot open " + path.string());
        }
        const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        {
            throw WavError(path.string() + ": not a RIFF/WAVE file");
        }

        Format fmt;
        bool have_fmt = false;
        const std::uint8_t* data = nullptr;
        std::size_t data_size = 0;

        std::size_t pos = 12;
        while (pos + 8 <= bytes.size())
        {
            const std::uint8_t* chunk = bytes.data() + pos;
            const std::size_t size = read_u32(chunk + 4);
            const std::size_t body = pos + 8;
            const std::size_t available = bytes.size() - body;
            if (std::memcmp(chunk, "fmt ", 4) == 0)
            {
                if (size < 16 || size > available)
                {
                    throw WavError(path.string() + ": truncated fmt chunk");
                }
                const std::uint8_t* f = bytes.data() + body;
                fmt.code = read_u16(f);
                fmt.channels = read_u16(f + 2);
                fmt.rate = read_u32(f + 4);
                fmt.bits = read_u16(f + 14);
                if (fmt.code == kFormatExtensible)
                {
                    if (size < 40)
                    {
                        throw WavError(path.string() + ": truncated extensible fmt chunk");
                    }
                    fmt.code = read_u16(f + 24);  // first two bytes of the subformat GUID
                }
                have_fmt = true;
            }
            else if (std::memcmp(chunk, "data", 4) == 0)
            {
                data = bytes.data() + body;
                data_size = std::min(size, available);
                break;
            }
            pos = body + size + (size & 1);
        }

        if (!have_fmt)
        {
            throw WavError(path.string() + ": missing fmt chunk");
        }
        if (data == nullptr)
        {
            throw WavError(path.string() + ": missing data chunk");
        }
        const bool supported = (fmt.code == kFormatPcm && (fmt.bits == 16 || fmt.bits == 24)) ||
                               (fmt.code == kFormatFloat && fmt.bits == 32);
        if (!supported)
        {
            throw WavError(path.string() + ": unsupported codec (format " + std::to_string(fmt.code) + ", " +
                           std::to_string(fmt.bits) + " bits)");
        }
        if (fmt.channels == 0 || fmt.rate == 0)
        {
            throw WavError(path.string() + ": invalid channel count or sample rate");
        }

        const std::size_t bytes_per_sample = fmt.bits / 8;
        const std::size_t block = bytes_per_sample * fmt.channels;
        const std::size_t frames = data_size / block;
        if (frames == 0)
        {
            throw WavError(path.string() + ": empty data chunk");
        }

        Audio audio;
        audio.sample_rate = static_cast<double>(fmt.rate);
        audio.samples.resize(frames);
        for (std::size_t i = 0; i < frames; ++i)
        {
            double acc = 0.0;
            for (std::size_t ch = 0; ch < fmt.channels; ++ch)
            {
                acc += decode_sample(data + i * block + ch * bytes_per_sample, fmt);
            }
            audio.samples[i] = fmt.channels == 1 ? acc : acc / static_cast<double>(fmt.channels);
        }
        return audio;
    }

    void save_wav(const std::filesystem::path& path, std::span<const double> samples, unsigned sample_rate,
                  SampleFormat format)
    {
        require(sample_rate > 0, "save_wav: sample rate must be positive");
        for (double v : samples)
        {
            require(std::isfinite(v), "save_wav: non-finite sample");
        }

        const std::uint16_t bits = format == SampleFormat::Pcm16 ? 16 : format == SampleFormat::Pcm24 ? 24 : 32;
        const std::uint16_t code = format == SampleFormat::Float32 ? kFormatFloat : kFormatPcm;
        const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * (bits / 8));

        std::vector<std::uint8_t> out;
        out.reserve(44 + data_bytes + 1);
        put_tag(out, "RIFF");
        put_u32(out, 36 + data_bytes + (data_bytes & 1));
        put_tag(out, "WAVE");
        put_tag(out, "fmt ");
        put_u32(out, 16);
        put_u16(out, code);
        put_u16(out, 1);
        put_u32(out, sample_rate);
        put_u32(out, sample_rate * (bits / 8));
        put_u16(out, static_cast<std::uint16_t>(bits / 8));
        put_u16(out, bits);
        put_tag(out, "data");
        put_u32(out, data_bytes);

        for (double v : samples)
        {
            if (format == SampleFormat::Float32)
            {
                const float f = static_cast<float>(v);
                std::uint32_t raw;
                std::memcpy(&raw, &f, sizeof raw);
                put_u32(out, raw);
            }
            else if (format == SampleFormat::Pcm16)
            {
                const double scaled = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
                put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
            }
            else
            {
                const double scaled = std::clamp(std::round(v * 8388608.0), -8388608.0, 8388607.0);
                const auto raw = static_cast<std::uint32_t>(static_cast<std::int32_t>(scaled));
                out.push_back(static_cast<std::uint8_t>(raw & 0xFF));
                out.push_back(static_cast<std::uint8_t>((raw >> 8) & 0xFF));
                out.push_back(static_cast<std::uint8_t>((raw >> 16) & 0xFF));
            }
        }
        if (data_bytes & 1)
        {
            out.push_back(0);
        }

        std::ofstream file(path, std::ios::binary);
        if (!file)
        {
            throw WavError("cannot open " + path.string() + " for writing");
        }
        file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
        if (!file)
        {
            throw WavError("write failed: " + path.string());
        }
    }
}  // namespace dequant
