#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>

#include "dequant/types.hpp"

namespace dequant
{
    /// Prototype window shape before tight normalization.
    enum class WindowKind
    {
        Hann,         ///< periodic Hann, 0.5 - 0.5 cos(2 pi j / W)
        Rectangular   ///< constant; with hop == window_len == channels the frame is an orthonormal basis
    };

    /// Complex time-frequency coefficients laid out frame-major: values[m * channels + k].
    struct CoefficientGrid
    {
        std::size_t frames = 0;
        std::size_t channels = 0;
        ComplexVector values;

        CoefficientGrid() = default;
        CoefficientGrid(std::size_t frames_, std::size_t channels_)
            : frames(frames_), channels(channels_), values(frames_ * channels_)
        {
        }
        CoefficientGrid(std::size_t frames_, std::size_t channels_, ComplexVector values_)
            : frames(frames_), channels(channels_), values(std::move(values_))
        {
            require(values.size() == frames * channels, "coefficient count does not match the grid shape");
        }

        Complex& operator()(std::size_t frame, std::size_t channel) { return values[frame * channels + channel]; }
        const Complex& operator()(std::size_t frame, std::size_t channel) const
        {
            return values[frame * channels + channel];
        }

        std::size_t size() const noexcept { return values.size(); }
    };

    struct FrameGeometry
    {
        std::size_t window_len = 0;
        std::size_t hop = 0;
        std::size_t channels = 0;
        std::size_t signal_len = 0;
        WindowKind window = WindowKind::Hann;
    };

    /// Parseval-tight discrete Gabor transform on a zero-padded, circular signal domain.
    ///
    /// Frame m covers samples (m * hop + j) mod padded_len for j in [0, window_len). The DFT phase is
    /// taken relative to the frame start (frequency-invariant convention):
    ///
    ///   c[m, k] = sum_j x[(m * hop + j) mod L] g[j] exp(-2 pi i k j / M)
    ///
    /// Because channels >= window_len the frame operator is diagonal, and the stored window g is the
    /// canonical tight window, so analysis followed by synthesis is the identity. Synthesis is the
    /// adjoint with respect to the real inner product Re<a, b> on C^Q, hence it keeps the real part.
    ///
    /// Instances are immutable after construction; analysis and synthesis may be called concurrently.
    class GaborFrame
    {
    public:
        GaborFrame(std::size_t window_len, std::size_t hop, std::size_t channels, std::size_t signal_len,
                   WindowKind window = WindowKind::Hann);
        explicit GaborFrame(const FrameGeometry& geometry);

        std::size_t window_len() const noexcept { return window_len_; }
        std::size_t hop() const noexcept { return hop_; }
        std::size_t channels() const noexcept { return channels_; }
        std::size_t signal_len() const noexcept { return signal_len_; }
        std::size_t padded_len() const noexcept { return padded_len_; }
        std::size_t num_frames() const noexcept { return num_frames_; }
        std::size_t coeff_count() const noexcept { return num_frames_ * channels_; }
        WindowKind window_kind() const noexcept { return kind_; }
        std::span<const double> window() const noexcept { return window_; }

        /// x may be shorter than padded_len; it is zero-padded at the tail.
        CoefficientGrid analysis(std::span<const double> x) const;
        void analysis(std::span<const double> x, std::span<Complex> out) const;

        /// Returns a signal of length padded_len.
        RealVector synthesis(const CoefficientGrid& c) const;
        void synthesis(std::span<const Complex> c, std::span<double> out) const;

        CoefficientGrid zero_grid() const { return CoefficientGrid(num_frames_, channels_); }

        bool conforms(const CoefficientGrid& c) const noexcept
        {
            return c.frames == num_frames_ && c.channels == channels_ && c.values.size() == coeff_count();
        }

    private:
        struct Plans;

        std::size_t window_len_;
        std::size_t hop_;
        std::size_t channels_;
        std::size_t signal_len_;
        std::size_t padded_len_;
        std::size_t num_frames_;
        WindowKind kind_;
        RealVector window_;
        std::shared_ptr<const Plans> plans_;
    };

    /// Geometry used for an input of the given rate and length: 8192-sample window, 75% overlap and
    /// 16384 channels at 44.1 kHz, scaled by powers of two for other rates and for inputs shorter than
    /// the window.
    FrameGeometry default_geometry(double sample_rate, std::size_t signal_len);

    /// Largest eigenvalue of A*A by power iteration (equals 1 for a Parseval frame).
    double operator_norm_squared(const GaborFrame& frame, std::size_t iterations = 50, unsigned seed = 1);
}  // namespace dequant
