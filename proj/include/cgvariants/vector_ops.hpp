#pragma once

#include "cgvariants/types.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace cgv {

/// Reference vector kernels. Every reduction and update runs in a fixed
/// sequential order so that repeated runs produce bit-identical results.

inline void require_same_size(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("vector dimension mismatch");
}

/// <x, y> with left-to-right accumulation
inline double dot(std::span<const double> x, std::span<const double> y) {
    require_same_size(x.size(), y.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

inline double norm2(std::span<const double> x) {
    return std::sqrt(dot(x, x));
}

/// y += a*x
inline void add_scaled(DenseVector& y, double a, const DenseVector& x) {
    require_same_size(y.size(), x.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

/// y -= a*x
inline void sub_scaled(DenseVector& y, double a, const DenseVector& x) {
    require_same_size(y.size(), x.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= a * x[i];
}

/// y = x + b*y
inline void xpby(DenseVector& y, double b, const DenseVector& x) {
    require_same_size(y.size(), x.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + b * y[i];
}

/// z = x - y
inline void subtract(const DenseVector& x, const DenseVector& y, DenseVector& z) {
    require_same_size(x.size(), y.size());
    z.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
}

} // namespace cgv
