#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dequant
{
    using Complex = std::complex<double>;
    using RealVector = std::vector<double>;
    using ComplexVector = std::vector<Complex>;

    /// Raised on precondition violations (bad geometry, mismatched lengths, invalid parameters).
    class InvalidArgument : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    inline void require(bool condition, const std::string& message)
    {
        if (!condition)
        {
            throw InvalidArgument(message);
        }
    }

    double norm2(std::span<const double> v);
    double norm2(std::span<const Complex> v);
    double norm1(std::span<const Complex> v);

    /// Real inner product on C^n viewed as R^{2n}: Re sum conj(a_i) b_i.
    double inner(std::span<const Complex> a, std::span<const Complex> b);
    double inner(std::span<const double> a, std::span<const double> b);

    double distance(std::span<const double> a, std::span<const double> b);
    double distance(std::span<const Complex> a, std::span<const Complex> b);
}  // namespace dequant
