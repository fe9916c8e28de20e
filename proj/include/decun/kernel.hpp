#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "decun/error.hpp"

namespace decun {

/// Small spatial blur filter with odd dimensions, centered at (height/2, width/2).
struct Kernel {
    int height = 0;
    int width = 0;
    std::vector<double> taps;

    Kernel() = default;

    Kernel(int h, int w, std::vector<double> t) : height(h), width(w), taps(std::move(t)) {
        if (h < 1 || w < 1 || h % 2 == 0 || w % 2 == 0)
            throw DimensionError("Kernel: dimensions must be odd and >= 1, got " + std::to_string(h) +
                                 "x" + std::to_string(w));
        if (taps.size() != static_cast<std::size_t>(h) * static_cast<std::size_t>(w))
            throw DimensionError("Kernel: tap count does not match dimensions");
        for (double v : taps)
            if (!std::isfinite(v)) throw ParameterError("Kernel: non-finite tap");
    }

    static Kernel identity() { return Kernel(1, 1, {1.0}); }

    double at(int r, int c) const { return taps[static_cast<std::size_t>(r) * width + c]; }
    double& at(int r, int c) { return taps[static_cast<std::size_t>(r) * width + c]; }

    double tap_sum() const {
        double s = 0.0;
        for (double v : taps) s += v;
        return s;
    }
};

/// Checks the normalized-blur invariants: taps sum to 1 within 1e-12 and,
/// for motion kernels, all taps >= 0.
inline void validate_blur_kernel(const Kernel& k, bool require_nonnegative = true) {
    if (std::abs(k.tap_sum() - 1.0) > 1e-12)
        throw ParameterError("Kernel: taps must sum to 1, got " + std::to_string(k.tap_sum()));
    if (require_nonnegative)
        for (double v : k.taps)
            if (v < 0.0) throw ParameterError("Kernel: motion kernel taps must be >= 0");
}

namespace detail {

// Values within 1e-9 of {-1, 0, 1} snap exactly, so axis-aligned angles give
// axis-aligned kernels (and the angle-0 / angle-pi/2 pair are exact transposes).
inline double snap_unit(double v) {
    if (std::abs(v) < 1e-9) return 0.0;
    if (std::abs(v - 1.0) < 1e-9) return 1.0;
    if (std::abs(v + 1.0) < 1e-9) return -1.0;
    return v;
}

} // namespace detail

/// Synthesizes a linear motion blur kernel: unit-spaced points along a segment
/// of the given pixel length and angle, bilinearly splatted onto the grid and
/// normalized to sum 1. Length 0 degenerates to the identity kernel.
inline Kernel generate_linear_motion_kernel(double length, double angle) {
    if (!(length >= 0.0) || length > 20.0)
        throw ParameterError("generate_linear_motion_kernel: length must be in [0, 20]");
    if (!(angle >= 0.0) || angle > 3.14159265358979323846264338327950288 + 1e-12)
        throw ParameterError("generate_linear_motion_kernel: angle must be in [0, pi]");

    const int points = std::max(1, static_cast<int>(std::ceil(length)));
    if (points == 1) return Kernel::identity();

    const double dx = detail::snap_unit(std::cos(angle));
    const double dy = detail::snap_unit(std::sin(angle));
    // points samples span an extent of (length - 1) pixels, symmetric about 0;
    // integer lengths give exactly unit spacing.
    const double spacing = (length - 1.0) / (points - 1);

    const int radius = static_cast<int>(std::ceil((length - 1.0) / 2.0)) + 1;
    const int box = 2 * radius + 1;
    std::vector<double> acc(static_cast<std::size_t>(box) * box, 0.0);
    auto splat_axis = [](double x, int& i0, double& f) {
        i0 = static_cast<int>(std::floor(x));
        f = x - i0;
        if (f < 1e-12) f = 0.0;
        if (f > 1.0 - 1e-12) {
            i0 += 1;
            f = 0.0;
        }
    };
    for (int k = 0; k < points; ++k) {
        const double t = (k - (points - 1) / 2.0) * spacing;
        const double x = t * dx;
        const double y = t * dy;
        int c0 = 0, r0 = 0;
        double fx = 0.0, fy = 0.0;
        splat_axis(x, c0, fx);
        splat_axis(y, r0, fy);
        const double w00 = (1.0 - fy) * (1.0 - fx);
        const double w01 = (1.0 - fy) * fx;
        const double w10 = fy * (1.0 - fx);
        const double w11 = fy * fx;
        auto put = [&](int r, int c, double wgt) {
            if (wgt == 0.0) return;
            acc[static_cast<std::size_t>(r + radius) * box + (c + radius)] += wgt;
        };
        put(r0, c0, w00);
        put(r0, c0 + 1, w01);
        put(r0 + 1, c0, w10);
        put(r0 + 1, c0 + 1, w11);
    }

    // Trim zero borders symmetrically; the construction is symmetric about the
    // center, so this keeps the support centered and the dimensions odd.
    int trim_r = 0, trim_c = 0;
    auto row_empty = [&](int r) {
        for (int c = 0; c < box; ++c)
            if (acc[static_cast<std::size_t>(r) * box + c] != 0.0) return false;
        return true;
    };
    auto col_empty = [&](int c) {
        for (int r = 0; r < box; ++r)
            if (acc[static_cast<std::size_t>(r) * box + c] != 0.0) return false;
        return true;
    };
    while (trim_r < radius && row_empty(trim_r) && row_empty(box - 1 - trim_r)) ++trim_r;
    while (trim_c < radius && col_empty(trim_c) && col_empty(box - 1 - trim_c)) ++trim_c;

    const int kh = box - 2 * trim_r;
    const int kw = box - 2 * trim_c;
    std::vector<double> taps(static_cast<std::size_t>(kh) * kw, 0.0);
    double total = 0.0;
    for (int r = 0; r < kh; ++r)
        for (int c = 0; c < kw; ++c) {
            const double v = acc[static_cast<std::size_t>(r + trim_r) * box + (c + trim_c)];
            taps[static_cast<std::size_t>(r) * kw + c] = v;
            total += v;
        }
    for (auto& v : taps) v /= total;
    return Kernel(kh, kw, std::move(taps));
}

/// Kernel text format: first line "H W", then H rows of W decimal taps.
inline void store_kernel_text(const Kernel& k, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("store_kernel_text: cannot open " + path);
    out << k.height << " " << k.width << "\n";
    char buf[64];
    for (int r = 0; r < k.height; ++r) {
        for (int c = 0; c < k.width; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", k.at(r, c));
            out << buf << (c + 1 < k.width ? " " : "");
        }
        out << "\n";
    }
    if (!out) throw IoError("store_kernel_text: write failed for " + path);
}

inline Kernel load_kernel_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_kernel_text: cannot open " + path);
    int h = 0, w = 0;
    if (!(in >> h >> w)) throw FormatError("load_kernel_text: missing dimensions in " + path);
    if (h < 1 || w < 1) throw FormatError("load_kernel_text: bad dimensions in " + path);
    std::vector<double> taps(static_cast<std::size_t>(h) * static_cast<std::size_t>(w));
    for (auto& v : taps)
        if (!(in >> v)) throw FormatError("load_kernel_text: truncated tap data in " + path);
    return Kernel(h, w, std::move(taps));
}

} // namespace decun
