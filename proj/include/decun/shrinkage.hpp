#pragma once

#include <array>
#include <cmath>

#include "decun/image.hpp"

namespace decun {

namespace detail {

// sgn(0) = 0, so the dead zone maps exactly to 0.
inline double soft_threshold_unchecked(double x, double lambda) {
    const double m = std::abs(x) - lambda;
    if (m <= 0.0) return 0.0;
    return x < 0.0 ? -m : m;
}

} // namespace detail

/// Scalar soft-thresholding s_lambda(x) = sgn(x) * max(|x| - lambda, 0).
inline double soft_threshold(double x, double lambda) {
    if (!(lambda >= 0.0)) throw ParameterError("soft_threshold: lambda must be >= 0");
    return detail::soft_threshold_unchecked(x, lambda);
}

/// Elementwise soft-thresholding of a grid.
inline ImageGrid soft_threshold(const ImageGrid& g, double lambda) {
    if (!(lambda >= 0.0)) throw ParameterError("soft_threshold: lambda must be >= 0");
    ImageGrid out = g;
    for (auto& v : out.data) v = detail::soft_threshold_unchecked(v, lambda);
    return out;
}

/// Isotropic 2D shrinkage: scales v toward 0 so its Euclidean norm shrinks by
/// lambda (v = 0 maps to 0 by convention). Nonexpansive.
inline std::array<double, 2> isotropic_shrink_2d(const std::array<double, 2>& v, double lambda) {
    if (!(lambda >= 0.0)) throw ParameterError("isotropic_shrink_2d: lambda must be >= 0");
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1]);
    if (n <= lambda || n == 0.0) return {0.0, 0.0};
    const double scale = (n - lambda) / n;
    return {v[0] * scale, v[1] * scale};
}

} // namespace decun
