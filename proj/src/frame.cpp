#include "dequant/frame.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>

namespace dequant
{
    namespace
    {
        // The FFTW planner is not thread-safe; execution is.
        std::mutex& planner_mutex()
        {
            static std::mutex m;
            return m;
        }

        std::size_t round_up(std::size_t value, std::size_t multiple)
        {
            return ((value + multiple - 1) / multiple) * multiple;
        }

        RealVector prototype(WindowKind kind, std::size_t len)
        {
            RealVector g(len, 1.0);
            if (kind == WindowKind::Hann)
            {
                for (std::size_t j = 0; j < len; ++j)
                {
                    g[j] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(len));
                }
            }
            return g;
        }
    }  // namespace

    struct GaborFrame::Plans
    {
        fftw_plan forward = nullptr;   // r2c, length M
        fftw_plan backward = nullptr;  // c2r, length M

        explicit Plans(std::size_t channels)
        {
            const int n = static_cast<int>(channels);
            std::vector<double> real(channels);
            std::vector<Complex> half(channels / 2 + 1);
            auto* cplx = reinterpret_cast<fftw_complex*>(half.data());
            // FFTW_UNALIGNED keeps the chosen codelets independent of buffer alignment, so results are
            // bitwise reproducible across calls.
            const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
            std::lock_guard lock(planner_mutex());
            forward = fftw_plan_dft_r2c_1d(n, real.data(), cplx, flags);
            backward = fftw_plan_dft_c2r_1d(n, cplx, real.data(), flags | FFTW_DESTROY_INPUT);
        }

        ~Plans()
        {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(forward);
            fftw_destroy_plan(backward);
        }

        Plans(const Plans&) = delete;
        Plans& operator=(const Plans&) = delete;
    };

    GaborFrame::GaborFrame(const FrameGeometry& g)
        : GaborFrame(g.window_len, g.hop, g.channels, g.signal_len, g.window)
    {
    }

    GaborFrame::GaborFrame(std::size_t window_len, std::size_t hop, std::size_t channels, std::size_t signal_len,
                           WindowKind window)
        : window_len_(window_len),
          hop_(hop),
          channels_(channels),
          signal_len_(signal_len),
          padded_len_(0),
          num_frames_(0),
          kind_(window)
    {
        require(window_len > 0 && hop > 0 && channels > 0 && signal_len > 0,
                "GaborFrame: window_len, hop, channels and signal_len must be positive");
        require(hop <= window_len, "GaborFrame: hop must not exceed window_len");
        require(channels >= window_len, "GaborFrame: channels must be >= window_len");

        padded_len_ = round_up(signal_len, hop);
        num_frames_ = padded_len_ / hop;

        // Diagonal of the frame operator, which is hop-periodic: M * sum_{j = r mod hop} g[j]^2.
        window_ = prototype(window, window_len);
        RealVector diag(hop, 0.0);
        for (std::size_t j = 0; j < window_len; ++j)
        {
            diag[j % hop] += window_[j] * window_[j];
        }
        for (double& d : diag)
        {
            d *= static_cast<double>(channels);
            require(d > 0.0, "GaborFrame: window overlap leaves gaps; frame operator is singular");
        }
        for (std::size_t j = 0; j < window_len; ++j)
        {
            window_[j] /= std::sqrt(diag[j % hop]);
        }

        plans_ = std::make_shared<const Plans>(channels);
    }

    CoefficientGrid GaborFrame::analysis(std::span<const double> x) const
    {
        CoefficientGrid c(num_frames_, channels_);
        analysis(x, c.values);
        return c;
    }

    void GaborFrame::analysis(std::span<const double> x, std::span<Complex> out) const
    {
        require(x.size() <= padded_len_, "analysis: signal longer than padded frame length");
        require(out.size() == coeff_count(), "analysis: output size does not match frame geometry");

        const std::size_t half = channels_ / 2 + 1;
        std::vector<double> block(channels_);
        std::vector<Complex> spectrum(half);
        for (std::size_t m = 0; m < num_frames_; ++m)
        {
            std::fill(block.begin(), block.end(), 0.0);
            const std::size_t start = m * hop_;
            for (std::size_t j = 0; j < window_len_; ++j)
            {
                const std::size_t n = (start + j) % padded_len_;
                if (n < x.size())
                {
                    block[j] = x[n] * window_[j];
                }
            }
            fftw_execute_dft_r2c(plans_->forward, block.data(), reinterpret_cast<fftw_complex*>(spectrum.data()));

            Complex* row = out.data() + m * channels_;
            std::copy(spectrum.begin(), spectrum.end(), row);
            for (std::size_t k = half; k < channels_; ++k)
            {
                row[k] = std::conj(spectrum[channels_ - k]);
            }
        }
    }

    RealVector GaborFrame::synthesis(const CoefficientGrid& c) const
    {
        require(conforms(c), "synthesis: coefficient grid does not match frame geometry");
        RealVector x(padded_len_);
        synthesis(c.values, x);
        return x;
    }

    void GaborFrame::synthesis(std::span<const Complex> c, std::span<double> out) const
    {
        require(c.size() == coeff_count(), "synthesis: coefficient count does not match frame geometry");
        require(out.size() == padded_len_, "synthesis: output length must equal padded_len");

        // Re(sum_k c_k e^{+i theta}) equals the c2r transform of the Hermitian part
        // (c_k + conj(c_{M-k})) / 2.
        const std::size_t half = channels_ / 2 + 1;
        std::vector<Complex> hermitian(half);
        std::vector<double> block(channels_);
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t m = 0; m < num_frames_; ++m)
        {
            const Complex* row = c.data() + m * channels_;
            for (std::size_t k = 0; k < half; ++k)
            {
                hermitian[k] = 0.5 * (row[k] + std::conj(row[(channels_ - k) % channels_]));
            }
            fftw_execute_dft_c2r(plans_->backward, reinterpret_cast<fftw_complex*>(hermitian.data()), block.data());

            const std::size_t start = m * hop_;
            for (std::size_t j = 0; j < window_len_; ++j)
            {
                out[(start + j) % padded_len_] += window_[j] * block[j];
            }
        }
    }

    FrameGeometry default_geometry(double sample_rate, std::size_t signal_len)
    {
        require(sample_rate > 0.0, "default_geometry: sample rate must be positive");
        require(signal_len > 0, "default_geometry: signal length must be positive");

        const double scaled = 8192.0 * sample_rate / 44100.0;
        const int exponent = std::clamp(static_cast<int>(std::lround(std::log2(scaled))), 4, 20);
        std::size_t window = std::size_t{1} << exponent;
        while (window > 16 && window > signal_len)
        {
            window /= 2;
        }
        return FrameGeometry{window, window / 4, 2 * window, signal_len, WindowKind::Hann};
    }

    double operator_norm_squared(const GaborFrame& frame, std::size_t iterations, unsigned seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        RealVector x(frame.padded_len());
        for (double& v : x)
        {
            v = normal(rng);
        }
        ComplexVector c(frame.coeff_count());
        RealVector y(frame.padded_len());
        double estimate = 0.0;
        for (std::size_t it = 0; it < iterations; ++it)
        {
            const double nx = norm2(x);
            for (double& v : x)
            {
                v /= nx;
            }
            frame.analysis(x, c);
            frame.synthesis(c, y);
            estimate = inner(std::span<const double>(x), std::span<const double>(y));
            x.swap(y);
        }
        return estimate;
    }
}  // namespace dequant
