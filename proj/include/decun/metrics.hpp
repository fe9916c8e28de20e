#pragma once

#include <cmath>
#include <vector>

#include "decun/image.hpp"

namespace decun {

/// Identical inputs (MSE 0) and anything sharper than ~1.3e-10 MSE report the
/// 99 dB sentinel for [0,1] grids.
inline constexpr double kPsnrCap = 99.0;

inline double mse(const ImageGrid& reference, const ImageGrid& test) {
    require_same_shape(reference, test, "mse");
    double s = 0.0;
    for (std::size_t i = 0; i < reference.data.size(); ++i) {
        const double d = reference.data[i] - test.data[i];
        s += d * d;
    }
    return s / static_cast<double>(reference.data.size());
}

inline double mae(const ImageGrid& reference, const ImageGrid& test) {
    require_same_shape(reference, test, "mae");
    double s = 0.0;
    for (std::size_t i = 0; i < reference.data.size(); ++i) s += std::abs(reference.data[i] - test.data[i]);
    return s / static_cast<double>(reference.data.size());
}

/// Peak signal-to-noise ratio in dB against peak value 1.0, capped at 99 dB.
inline double psnr(const ImageGrid& reference, const ImageGrid& test) {
    const double e = mse(reference, test);
    if (e <= 0.0) return kPsnrCap;
    return std::min(kPsnrCap, -10.0 * std::log10(e));
}

namespace detail {

inline const std::vector<double>& ssim_gaussian_1d() {
    static const std::vector<double> g = [] {
        std::vector<double> v(11);
        double total = 0.0;
        for (int i = 0; i < 11; ++i) {
            const double d = i - 5;
            v[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
            total += v[static_cast<std::size_t>(i)];
        }
        for (auto& x : v) x /= total;
        return v;
    }();
    return g;
}

// Separable 11-tap weighted smoothing, evaluated only where the window fits.
// Output has (height-10) x (width-10) valid entries.
inline std::vector<double> ssim_filter_valid(const std::vector<double>& img, int height, int width) {
    const auto& g = ssim_gaussian_1d();
    const int vh = height - 10, vw = width - 10;
    std::vector<double> rows(static_cast<std::size_t>(height) * vw);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < vw; ++c) {
            double s = 0.0;
            for (int j = 0; j < 11; ++j) s += g[static_cast<std::size_t>(j)] * img[static_cast<std::size_t>(r) * width + c + j];
            rows[static_cast<std::size_t>(r) * vw + c] = s;
        }
    std::vector<double> out(static_cast<std::size_t>(vh) * vw);
    for (int r = 0; r < vh; ++r)
        for (int c = 0; c < vw; ++c) {
            double s = 0.0;
            for (int i = 0; i < 11; ++i) s += g[static_cast<std::size_t>(i)] * rows[static_cast<std::size_t>(r + i) * vw + c];
            out[static_cast<std::size_t>(r) * vw + c] = s;
        }
    return out;
}

} // namespace detail

/// Structural similarity index with the community-standard parameters:
/// 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, dynamic range 1.0.
/// The map is computed by separable filtering over the region where the full
/// window fits, then averaged.
inline double ssim(const ImageGrid& reference, const ImageGrid& test) {
    require_same_shape(reference, test, "ssim");
    if (reference.height < 11 || reference.width < 11)
        throw DimensionError("ssim: image smaller than the 11x11 window");

    const int h = reference.height, w = reference.width;
    const std::size_t total = reference.data.size();
    std::vector<double> xx(total), yy(total), xy(total);
    for (std::size_t i = 0; i < total; ++i) {
        const double x = reference.data[i];
        const double y = test.data[i];
        xx[i] = x * x;
        yy[i] = y * y;
        xy[i] = x * y;
    }
    const std::vector<double> mx = detail::ssim_filter_valid(reference.data, h, w);
    const std::vector<double> my = detail::ssim_filter_valid(test.data, h, w);
    const std::vector<double> mxx = detail::ssim_filter_valid(xx, h, w);
    const std::vector<double> myy = detail::ssim_filter_valid(yy, h, w);
    const std::vector<double> mxy = detail::ssim_filter_valid(xy, h, w);

    const double c1 = 0.01 * 0.01;
    const double c2 = 0.03 * 0.03;
    double sum = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = mxx[i] - mx[i] * mx[i];
        const double vy = myy[i] - my[i] * my[i];
        const double cov = mxy[i] - mx[i] * my[i];
        const double numer = (2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2);
        const double denom = (mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2);
        sum += numer / denom;
    }
    return sum / static_cast<double>(mx.size());
}

} // namespace decun
