#include "dequant/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace dequant
{
    namespace
    {
        double parse_number(std::string_view key, std::string_view text)
        {
            double value = 0.0;
            const auto* end = text.data() + text.size();
            const auto [ptr, ec] = std::from_chars(text.data(), end, value);
            require(ec == std::errc() && ptr == end, "descriptor: bad number for '" + std::string(key) + "': " +
                                                         std::string(text));
            return value;
        }

        std::vector<double> parse_list(std::string_view key, std::string_view text)
        {
            std::vector<double> out;
            while (!text.empty())
            {
                const auto comma = text.find(',');
                out.push_back(parse_number(key, text.substr(0, comma)));
                if (comma == std::string_view::npos)
                {
                    break;
                }
                text.remove_prefix(comma + 1);
            }
            return out;
        }

        std::map<std::string, std::string, std::less<>> parse_fields(std::string_view text)
        {
            std::map<std::string, std::string, std::less<>> fields;
            while (!text.empty())
            {
                const auto semi = text.find(';');
                const auto item = text.substr(0, semi);
                const auto eq = item.find('=');
                require(eq != std::string_view::npos && eq > 0, "descriptor: expected key=value, got '" + std::string(item) + "'");
                fields.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
                if (semi == std::string_view::npos)
                {
                    break;
                }
                text.remove_prefix(semi + 1);
            }
            return fields;
        }

        std::size_t sample_count(double duration, double rate)
        {
            require(duration > 0.0 && rate > 0.0, "descriptor: duration and rate must be positive");
            const auto n = static_cast<std::size_t>(std::llround(duration * rate));
            require(n > 0, "descriptor: signal would be empty");
            return n;
        }

        Audio render(const MultisineSpec& spec)
        {
            require(!spec.freqs.empty(), "multisine: frequency list is empty");
            require(spec.amps.empty() || spec.amps.size() == spec.freqs.size(),
                    "multisine: amplitude list must match frequency list");
            const std::size_t n = sample_count(spec.duration, spec.rate);
            RealVector x(n, 0.0);
            for (std::size_t p = 0; p < spec.freqs.size(); ++p)
            {
                const double amp = spec.amps.empty() ? 1.0 : spec.amps[p];
                const double omega = 2.0 * std::numbers::pi * spec.freqs[p] / spec.rate;
                // Fixed, partial-dependent phase offsets avoid an aligned peak at t = 0.
                const double phase = 0.7 * static_cast<double>(p + 1);
                for (std::size_t i = 0; i < n; ++i)
                {
                    x[i] += amp * std::sin(omega * static_cast<double>(i) + phase);
                }
            }
            return Audio{peak_normalize(x), spec.rate};
        }

        Audio render(const ChirpSpec& spec)
        {
            require(spec.f0 > 0.0 && spec.f1 > 0.0, "chirp: frequencies must be positive");
            const std::size_t n = sample_count(spec.duration, spec.rate);
            const double sweep = (spec.f1 - spec.f0) / spec.duration;
            RealVector x(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                const double t = static_cast<double>(i) / spec.rate;
                x[i] = std::sin(2.0 * std::numbers::pi * (spec.f0 * t + 0.5 * sweep * t * t));
            }
            return Audio{peak_normalize(x), spec.rate};
        }

        Audio render(const NoiseSpec& spec)
        {
            const std::size_t n = sample_count(spec.duration, spec.rate);
            std::mt19937_64 rng(spec.seed);
            // Box-Muller on raw engine output keeps the sequence independent of the standard library's
            // normal_distribution implementation.
            RealVector x(n);
            const double scale = 1.0 / 18446744073709551616.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                const double u1 = (static_cast<double>(rng()) + 1.0) * scale;
                const double u2 = static_cast<double>(rng()) * scale;
                x[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
            }
            return Audio{peak_normalize(x), spec.rate};
        }

        std::string join(const std::vector<double>& values)
        {
            std::ostringstream os;
            for (std::size_t i = 0; i < values.size(); ++i)
            {
                os << (i ? "," : "") << values[i];
            }
            return os.str();
        }
    }  // namespace

    MultisineSpec reference_multisine()
    {
        return MultisineSpec{{261.63, 523.25, 783.99, 1318.51, 2093.0}, {1.0, 0.7, 0.5, 0.35, 0.25}, 2.0, 44100.0};
    }

    RealVector peak_normalize(std::span<const double> x)
    {
        double peak = 0.0;
        for (double v : x)
        {
            peak = std::max(peak, std::abs(v));
        }
        RealVector out(x.begin(), x.end());
        if (peak > 0.0)
        {
            for (double& v : out)
            {
                v /= peak;
            }
        }
        return out;
    }

    SignalDescriptor parse_descriptor(std::string_view text)
    {
        const auto colon = text.find(':');
        const std::string_view kind = text.substr(0, colon);
        const auto fields = parse_fields(colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1));
        const auto get = [&](std::string_view key, double fallback) {
            const auto it = fields.find(key);
            return it == fields.end() ? fallback : parse_number(key, it->second);
        };
        const auto reject_unknown = [&](std::initializer_list<std::string_view> known) {
            for (const auto& [key, value] : fields)
            {
                require(std::find(known.begin(), known.end(), key) != known.end(),
                        "descriptor: unknown field '" + key + "' for " + std::string(kind));
            }
        };

        if (kind == "multisine")
        {
            reject_unknown({"freqs", "amps", "duration", "rate"});
            MultisineSpec spec = reference_multisine();
            if (const auto it = fields.find("freqs"); it != fields.end())
            {
                spec.freqs = parse_list("freqs", it->second);
                spec.amps.clear();
            }
            if (const auto it = fields.find("amps"); it != fields.end())
            {
                spec.amps = parse_list("amps", it->second);
            }
            spec.duration = get("duration", spec.duration);
            spec.rate = get("rate", spec.rate);
            require(!spec.freqs.empty(), "multisine: frequency list is empty");
            return spec;
        }
        if (kind == "chirp")
        {
            reject_unknown({"f0", "f1", "duration", "rate"});
            ChirpSpec spec;
            spec.f0 = get("f0", spec.f0);
            spec.f1 = get("f1", spec.f1);
            spec.duration = get("duration", spec.duration);
            spec.rate = get("rate", spec.rate);
            return spec;
        }
        if (kind == "noise")
        {
            reject_unknown({"seed", "duration", "rate"});
            NoiseSpec spec;
            spec.seed = static_cast<std::uint64_t>(get("seed", 1.0));
            spec.duration = get("duration", spec.duration);
            spec.rate = get("rate", spec.rate);
            return spec;
        }
        throw InvalidArgument("descriptor: unknown signal kind '" + std::string(kind) + "'");
    }

    std::string describe(const SignalDescriptor& descriptor)
    {
        std::ostringstream os;
        std::visit(
            [&os](const auto& spec) {
                using T = std::decay_t<decltype(spec)>;
                if constexpr (std::is_same_v<T, MultisineSpec>)
                {
                    os << "multisine:freqs=" << join(spec.freqs);
                    if (!spec.amps.empty())
                    {
                        os << ";amps=" << join(spec.amps);
                    }
                    os << ";duration=" << spec.duration << ";rate=" << spec.rate;
                }
                else if constexpr (std::is_same_v<T, ChirpSpec>)
                {
                    os << "chirp:f0=" << spec.f0 << ";f1=" << spec.f1 << ";duration=" << spec.duration
                       << ";rate=" << spec.rate;
                }
                else
                {
                    os << "noise:seed=" << spec.seed << ";duration=" << spec.duration << ";rate=" << spec.rate;
                }
            },
            descriptor);
        return os.str();
    }

    Audio synth_test_signal(const SignalDescriptor& descriptor)
    {
        return std::visit([](const auto& spec) { return render(spec); }, descriptor);
    }
}  // namespace dequant
