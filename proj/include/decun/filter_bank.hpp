#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "decun/error.hpp"

namespace decun {

/// C small spatial filters on a shared odd footprint, taps row-major per
/// filter ([filter][row][col], contiguous).
struct FilterBank {
    int count = 0;
    int height = 0;
    int width = 0;
    std::vector<double> taps;

    FilterBank() = default;

    FilterBank(int filter_count, int footprint_h, int footprint_w)
        : count(filter_count), height(footprint_h), width(footprint_w) {
        if (filter_count < 1) throw ParameterError("FilterBank: need at least one filter");
        if (footprint_h < 1 || footprint_w < 1 || footprint_h % 2 == 0 || footprint_w % 2 == 0)
            throw DimensionError("FilterBank: footprint must be odd, got " + std::to_string(footprint_h) +
                                 "x" + std::to_string(footprint_w));
        taps.assign(static_cast<std::size_t>(count) * height * width, 0.0);
    }

    std::size_t filter_size() const { return static_cast<std::size_t>(height) * width; }

    double* filter(int i) { return taps.data() + static_cast<std::size_t>(i) * filter_size(); }
    const double* filter(int i) const { return taps.data() + static_cast<std::size_t>(i) * filter_size(); }

    double& at(int i, int r, int c) { return filter(i)[static_cast<std::size_t>(r) * width + c]; }
    double at(int i, int r, int c) const { return filter(i)[static_cast<std::size_t>(r) * width + c]; }

    double frobenius_norm(int i) const {
        const double* f = filter(i);
        double s = 0.0;
        for (std::size_t k = 0; k < filter_size(); ++k) s += f[k] * f[k];
        return std::sqrt(s);
    }

    bool same_shape(const FilterBank& other) const {
        return count == other.count && height == other.height && width == other.width;
    }
};

/// a + scale * b, tap-wise; the layer parameterization D_bar + xi_l * E_l.
inline FilterBank bank_add_scaled(const FilterBank& a, double scale, const FilterBank& b) {
    if (!a.same_shape(b)) throw DimensionError("bank_add_scaled: bank shapes differ");
    FilterBank out = a;
    for (std::size_t i = 0; i < out.taps.size(); ++i) out.taps[i] = a.taps[i] + scale * b.taps[i];
    return out;
}

/// The default analytic pair: horizontal and vertical forward differences,
/// zero-padded into the given footprint around its center.
inline FilterBank make_gradient_pair(int footprint_h = 3, int footprint_w = 3) {
    FilterBank bank(2, footprint_h, footprint_w);
    const int cr = footprint_h / 2;
    const int cc = footprint_w / 2;
    if (footprint_w < 2 || footprint_h < 2)
        throw DimensionError("make_gradient_pair: footprint too small for difference filters");
    bank.at(0, cr, cc) = -1.0; // D_x
    bank.at(0, cr, cc + 1) = 1.0;
    bank.at(1, cr, cc) = -1.0; // D_y
    bank.at(1, cr + 1, cc) = 1.0;
    return bank;
}

} // namespace decun
