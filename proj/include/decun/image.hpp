#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "decun/error.hpp"

namespace decun {

/// 2D real-valued raster, row-major, nominal sample range [0,1].
struct ImageGrid {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    ImageGrid() = default;

    ImageGrid(int h, int w, double fill = 0.0)
        : height(h), width(w) {
        if (h < 1 || w < 1)
            throw DimensionError("ImageGrid: dimensions must be >= 1, got " + std::to_string(h) + "x" +
                                 std::to_string(w));
        data.assign(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill);
    }

    /// Builds a grid from existing samples, enforcing the type invariants
    /// (size = height*width, all samples finite).
    static ImageGrid from_data(int h, int w, std::vector<double> samples) {
        ImageGrid g(h, w);
        if (samples.size() != g.data.size())
            throw DimensionError("ImageGrid: sample count " + std::to_string(samples.size()) +
                                 " does not match " + std::to_string(h) + "x" + std::to_string(w));
        for (double v : samples)
            if (!std::isfinite(v)) throw ParameterError("ImageGrid: non-finite sample");
        g.data = std::move(samples);
        return g;
    }

    std::size_t size() const { return data.size(); }

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }

    bool same_shape(const ImageGrid& other) const {
        return height == other.height && width == other.width;
    }
};

/// Stacked single-shape grids; the w-channels of the split state.
using GridStack = std::vector<ImageGrid>;

inline void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* where) {
    if (!a.same_shape(b))
        throw DimensionError(std::string(where) + ": shape mismatch " + std::to_string(a.height) + "x" +
                             std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                             std::to_string(b.width));
}

inline double norm(const ImageGrid& g) {
    double s = 0.0;
    for (double v : g.data) s += v * v;
    return std::sqrt(s);
}

inline double distance(const ImageGrid& a, const ImageGrid& b) {
    require_same_shape(a, b, "distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double stack_norm(const GridStack& w) {
    double s = 0.0;
    for (const auto& g : w)
        for (double v : g.data) s += v * v;
    return std::sqrt(s);
}

inline double stack_distance(const GridStack& a, const GridStack& b) {
    if (a.size() != b.size()) throw DimensionError("stack_distance: channel count mismatch");
    double s = 0.0;
    for (std::size_t ch = 0; ch < a.size(); ++ch) {
        require_same_shape(a[ch], b[ch], "stack_distance");
        for (std::size_t i = 0; i < a[ch].data.size(); ++i) {
            const double d = a[ch].data[i] - b[ch].data[i];
            s += d * d;
        }
    }
    return std::sqrt(s);
}

inline GridStack zero_stack(int channels, int height, int width) {
    GridStack w;
    w.reserve(static_cast<std::size_t>(channels));
    for (int i = 0; i < channels; ++i) w.emplace_back(height, width, 0.0);
    return w;
}

} // namespace decun
