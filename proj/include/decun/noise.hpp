#pragma once

#include <cstdint>

#include "decun/image.hpp"
#include "decun/rng.hpp"

namespace decun {

/// Adds i.i.d. zero-mean Gaussian noise with the given standard deviation.
/// Deterministic for a fixed seed.
inline ImageGrid add_gaussian_noise(const ImageGrid& image, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw ParameterError("add_gaussian_noise: sigma must be >= 0");
    if (sigma == 0.0) return image;
    ImageGrid out = image;
    Rng rng(seed);
    for (auto& v : out.data) v += sigma * rng.normal();
    return out;
}

} // namespace decun
