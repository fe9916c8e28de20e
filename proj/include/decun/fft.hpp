#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "decun/error.hpp"

namespace decun {

using Complex = std::complex<double>;

namespace fft {

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline int next_pow2(int n) {
    int m = 1;
    while (m < n) m <<= 1;
    return m;
}

/// One-dimensional DFT plan for a fixed length.
///
/// Power-of-two lengths run an in-place iterative radix-2 transform; other
/// lengths go through Bluestein's chirp-z reduction onto a power-of-two
/// convolution. Forward is unnormalized (X_k = sum_n x_n e^{-2*pi*i*k*n/N});
/// the inverse here is also unnormalized, callers divide by N once.
class Plan1d {
public:
    explicit Plan1d(int n) : n_(n) {
        if (n < 1) throw DimensionError("fft: transform length must be >= 1");
        if (is_pow2(n_)) {
            init_radix2(n_, twiddle_, bitrev_);
        } else {
            init_bluestein();
        }
    }

    int size() const { return n_; }

    void forward(Complex* x) const { transform(x, false); }
    void inverse(Complex* x) const { transform(x, true); }

private:
    static void init_radix2(int n, std::vector<Complex>& tw, std::vector<int>& rev) {
        tw.resize(static_cast<std::size_t>(n / 2 > 0 ? n / 2 : 1));
        for (int k = 0; k < n / 2; ++k) {
            const double a = -6.283185307179586476925286766559 * k / n;
            tw[static_cast<std::size_t>(k)] = Complex(std::cos(a), std::sin(a));
        }
        rev.assign(static_cast<std::size_t>(n), 0);
        int bits = 0;
        while ((1 << bits) < n) ++bits;
        for (int i = 0; i < n; ++i) {
            int r = 0;
            for (int b = 0; b < bits; ++b)
                if (i & (1 << b)) r |= 1 << (bits - 1 - b);
            rev[static_cast<std::size_t>(i)] = r;
        }
    }

    void init_bluestein() {
        // Chirp c_j = e^{-i*pi*j^2/n}; exact integer reduction j^2 mod 2n keeps
        // the twiddle arguments small and precise.
        chirp_.resize(static_cast<std::size_t>(n_));
        for (int j = 0; j < n_; ++j) {
            const long long q = (static_cast<long long>(j) * j) % (2LL * n_);
            const double a = -3.14159265358979323846264338327950288 * static_cast<double>(q) / n_;
            chirp_[static_cast<std::size_t>(j)] = Complex(std::cos(a), std::sin(a));
        }
        m_ = next_pow2(2 * n_ - 1);
        init_radix2(m_, twiddle_, bitrev_);
        // B = FFT of the wrapped conjugate chirp, with the 1/m inverse
        // normalization folded in.
        chirp_fft_.assign(static_cast<std::size_t>(m_), Complex(0.0, 0.0));
        chirp_fft_[0] = std::conj(chirp_[0]);
        for (int j = 1; j < n_; ++j) {
            chirp_fft_[static_cast<std::size_t>(j)] = std::conj(chirp_[static_cast<std::size_t>(j)]);
            chirp_fft_[static_cast<std::size_t>(m_ - j)] = std::conj(chirp_[static_cast<std::size_t>(j)]);
        }
        radix2(chirp_fft_.data(), m_, false);
        const double inv_m = 1.0 / m_;
        for (auto& v : chirp_fft_) v *= inv_m;
    }

    // In-place radix-2 over the precomputed tables (length must equal the
    // table length: n_ for pow2 plans, m_ for Bluestein plans).
    void radix2(Complex* x, int n, bool inverse) const {
        for (int i = 0; i < n; ++i) {
            const int j = bitrev_[static_cast<std::size_t>(i)];
            if (j > i) std::swap(x[i], x[j]);
        }
        for (int len = 2; len <= n; len <<= 1) {
            const int half = len >> 1;
            const int step = n / len;
            for (int start = 0; start < n; start += len) {
                int tw_idx = 0;
                for (int k = 0; k < half; ++k) {
                    Complex w = twiddle_[static_cast<std::size_t>(tw_idx)];
                    if (inverse) w = std::conj(w);
                    const Complex odd = x[start + k + half] * w;
                    const Complex even = x[start + k];
                    x[start + k] = even + odd;
                    x[start + k + half] = even - odd;
                    tw_idx += step;
                }
            }
        }
    }

    void transform(Complex* x, bool inverse) const {
        if (is_pow2(n_)) {
            radix2(x, n_, inverse);
            return;
        }
        // Bluestein: y_k = c_k * (a (*) b)_k with a_j = x_j c_j, b the
        // conjugate chirp; inverse via conj(forward(conj(x))).
        std::vector<Complex> a(static_cast<std::size_t>(m_), Complex(0.0, 0.0));
        for (int j = 0; j < n_; ++j) {
            const Complex v = inverse ? std::conj(x[j]) : x[j];
            a[static_cast<std::size_t>(j)] = v * chirp_[static_cast<std::size_t>(j)];
        }
        radix2(a.data(), m_, false);
        for (int j = 0; j < m_; ++j) a[static_cast<std::size_t>(j)] *= chirp_fft_[static_cast<std::size_t>(j)];
        radix2(a.data(), m_, true); // 1/m folded into chirp_fft_
        for (int k = 0; k < n_; ++k) {
            Complex v = a[static_cast<std::size_t>(k)] * chirp_[static_cast<std::size_t>(k)];
            x[k] = inverse ? std::conj(v) : v;
        }
    }

    int n_;
    int m_ = 0;
    std::vector<Complex> twiddle_;
    std::vector<int> bitrev_;
    std::vector<Complex> chirp_;
    std::vector<Complex> chirp_fft_;
};

/// Row-major 2D DFT built from two 1D plans. Forward unnormalized, inverse
/// divides by height*width.
class Plan2d {
public:
    Plan2d(int height, int width)
        : h_(height), w_(width), row_(width), col_(height) {}

    int height() const { return h_; }
    int width() const { return w_; }

    void forward(Complex* data) const { transform(data, false); }

    void inverse(Complex* data) const {
        transform(data, true);
        const double scale = 1.0 / (static_cast<double>(h_) * static_cast<double>(w_));
        const std::size_t total = static_cast<std::size_t>(h_) * static_cast<std::size_t>(w_);
        for (std::size_t i = 0; i < total; ++i) data[i] *= scale;
    }

private:
    void transform(Complex* data, bool inverse) const {
        for (int r = 0; r < h_; ++r) {
            Complex* row = data + static_cast<std::size_t>(r) * w_;
            inverse ? row_.inverse(row) : row_.forward(row);
        }
        std::vector<Complex> tmp(static_cast<std::size_t>(h_));
        for (int c = 0; c < w_; ++c) {
            for (int r = 0; r < h_; ++r) tmp[static_cast<std::size_t>(r)] = data[static_cast<std::size_t>(r) * w_ + c];
            inverse ? col_.inverse(tmp.data()) : col_.forward(tmp.data());
            for (int r = 0; r < h_; ++r) data[static_cast<std::size_t>(r) * w_ + c] = tmp[static_cast<std::size_t>(r)];
        }
    }

    int h_, w_;
    Plan1d row_, col_;
};

} // namespace fft
} // namespace decun
