#include "dequant/types.hpp"

#include <cmath>

namespace dequant
{
    double norm2(std::span<const double> v)
    {
        double acc = 0.0;
        for (double x : v)
        {
            acc += x * x;
        }
        return std::sqrt(acc);
    }

    double norm2(std::span<const Complex> v)
    {
        double acc = 0.0;
        for (const Complex& z : v)
        {
            acc += std::norm(z);
        }
        return std::sqrt(acc);
    }

    double norm1(std::span<const Complex> v)
    {
        double acc = 0.0;
        for (const Complex& z : v)
        {
            acc += std::abs(z);
        }
        return acc;
    }

    double inner(std::span<const Complex> a, std::span<const Complex> b)
    {
        require(a.size() == b.size(), "inner: length mismatch");
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        }
        return acc;
    }

    double inner(std::span<const double> a, std::span<const double> b)
    {
        require(a.size() == b.size(), "inner: length mismatch");
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            acc += a[i] * b[i];
        }
        return acc;
    }

    double distance(std::span<const double> a, std::span<const double> b)
    {
        require(a.size() == b.size(), "distance: length mismatch");
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            const double d = a[i] - b[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    }

    double distance(std::span<const Complex> a, std::span<const Complex> b)
    {
        require(a.size() == b.size(), "distance: length mismatch");
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            acc += std::norm(a[i] - b[i]);
        }
        return std::sqrt(acc);
    }
}  // namespace dequant
