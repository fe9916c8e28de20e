#pragma once

#include <algorithm>
#include <cstdint>

#include "decun/image.hpp"
#include "decun/rng.hpp"

namespace decun {

/// Seeded piecewise-smooth test scene: a gentle ramp, a handful of rectangles
/// and ellipses, then one light smoothing pass. Gradient-sparse by
/// construction, which is what the TV prior models.
inline ImageGrid random_scene(int height, int width, std::uint64_t seed) {
    ImageGrid g(height, width);
    Rng rng(seed);

    const double base = rng.uniform(0.2, 0.5);
    const double ramp_r = rng.uniform(-0.2, 0.2);
    const double ramp_c = rng.uniform(-0.2, 0.2);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            g.at(r, c) = base + ramp_r * r / height + ramp_c * c / width;

    const int rects = 5 + static_cast<int>(rng.uniform() * 4);
    for (int k = 0; k < rects; ++k) {
        const int r0 = static_cast<int>(rng.uniform(0.0, height * 0.8));
        const int c0 = static_cast<int>(rng.uniform(0.0, width * 0.8));
        const int rh = 2 + static_cast<int>(rng.uniform(0.0, height * 0.4));
        const int rw = 2 + static_cast<int>(rng.uniform(0.0, width * 0.4));
        const double v = rng.uniform(0.1, 0.9);
        for (int r = r0; r < std::min(height, r0 + rh); ++r)
            for (int c = c0; c < std::min(width, c0 + rw); ++c) g.at(r, c) = v;
    }
    const int blobs = 2 + static_cast<int>(rng.uniform() * 3);
    for (int k = 0; k < blobs; ++k) {
        const double cr = rng.uniform(0.1, 0.9) * height;
        const double cc = rng.uniform(0.1, 0.9) * width;
        const double ar = rng.uniform(0.05, 0.25) * height;
        const double ac = rng.uniform(0.05, 0.25) * width;
        const double v = rng.uniform(0.1, 0.9);
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c) {
                const double dr = (r - cr) / ar, dc = (c - cc) / ac;
                if (dr * dr + dc * dc <= 1.0) g.at(r, c) = v;
            }
    }

    // One [1,2,1]/4 pass per axis; softens edges so quantization and metrics
    // behave, without destroying gradient sparsity.
    ImageGrid tmp = g;
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            const int cl = std::max(0, c - 1), cr2 = std::min(width - 1, c + 1);
            tmp.at(r, c) = 0.25 * g.at(r, cl) + 0.5 * g.at(r, c) + 0.25 * g.at(r, cr2);
        }
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            const int rl = std::max(0, r - 1), rh2 = std::min(height - 1, r + 1);
            g.at(r, c) = 0.25 * tmp.at(rl, c) + 0.5 * tmp.at(r, c) + 0.25 * tmp.at(rh2, c);
        }
    for (auto& v : g.data) v = std::clamp(v, 0.02, 0.98);
    return g;
}

} // namespace decun
