#pragma once

#include <complex>
#include <string>
#include <vector>

#include "decun/fft.hpp"
#include "decun/image.hpp"
#include "decun/kernel.hpp"

namespace decun {

/// Frequency-domain representation of a circulant operator: the unnormalized
/// 2D DFT of its (padded) spatial filter on a fixed grid.
struct SpectralOperator {
    int height = 0;
    int width = 0;
    std::vector<Complex> coefficients;

    SpectralOperator() = default;
    SpectralOperator(int h, int w)
        : height(h), width(w) {
        if (h < 1 || w < 1) throw DimensionError("SpectralOperator: dimensions must be >= 1");
        coefficients.assign(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), Complex(0.0, 0.0));
    }
};

inline SpectralOperator spectral_transform(const ImageGrid& g) {
    SpectralOperator op(g.height, g.width);
    for (std::size_t i = 0; i < g.data.size(); ++i) op.coefficients[i] = Complex(g.data[i], 0.0);
    fft::Plan2d plan(g.height, g.width);
    plan.forward(op.coefficients.data());
    return op;
}

inline ImageGrid inverse_spectral(const SpectralOperator& op) {
    std::vector<Complex> tmp = op.coefficients;
    fft::Plan2d plan(op.height, op.width);
    plan.inverse(tmp.data());
    ImageGrid g(op.height, op.width);
    for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] = tmp[i].real();
    return g;
}

/// Embeds a small centered filter into an HxW grid with circular shift, so the
/// filter center lands on (0,0). The DFT of the result is the operator's
/// frequency response.
inline ImageGrid pad_filter(const double* taps, int fh, int fw, int height, int width) {
    if (fh > height || fw > width)
        throw DimensionError("pad_filter: filter " + std::to_string(fh) + "x" + std::to_string(fw) +
                             " exceeds grid " + std::to_string(height) + "x" + std::to_string(width));
    ImageGrid g(height, width, 0.0);
    const int cr = fh / 2;
    const int cc = fw / 2;
    for (int r = 0; r < fh; ++r)
        for (int c = 0; c < fw; ++c) {
            const int gr = ((r - cr) % height + height) % height;
            const int gc = ((c - cc) % width + width) % width;
            g.at(gr, gc) += taps[static_cast<std::size_t>(r) * fw + c];
        }
    return g;
}

inline SpectralOperator spectral_of_kernel(const Kernel& k, int height, int width) {
    return spectral_transform(pad_filter(k.taps.data(), k.height, k.width, height, width));
}

/// Periodic-boundary convolution: pointwise product of spectra.
inline ImageGrid circular_convolve(const ImageGrid& image, const Kernel& kernel) {
    SpectralOperator img_hat = spectral_transform(image);
    SpectralOperator k_hat = spectral_of_kernel(kernel, image.height, image.width);
    for (std::size_t i = 0; i < img_hat.coefficients.size(); ++i) img_hat.coefficients[i] *= k_hat.coefficients[i];
    return inverse_spectral(img_hat);
}

} // namespace decun
