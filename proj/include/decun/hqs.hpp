#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "decun/fft.hpp"
#include "decun/filter_bank.hpp"
#include "decun/image.hpp"
#include "decun/kernel.hpp"
#include "decun/shrinkage.hpp"
#include "decun/spectral.hpp"

namespace decun {

/// Classic solver configuration: data weight mu, relaxation weight beta, a
/// fixed filter bank (default: the two gradient filters) and iteration count.
struct HqsConfig {
    double mu = 5.0e4;
    double beta = 50.0;
    int iterations = 30;
    FilterBank filters = make_gradient_pair();

    void validate() const {
        if (!(mu > 0.0)) throw ParameterError("HqsConfig: mu must be > 0");
        if (!(beta > 0.0)) throw ParameterError("HqsConfig: beta must be > 0");
        if (iterations < 1) throw ParameterError("HqsConfig: iterations must be >= 1");
    }
};

/// Result of one layer application: the latent estimate u and the filter
/// responses D_i u (pre-threshold).
struct LayerApply {
    ImageGrid u;
    GridStack du;
};

/// Reusable buffers for SpectralSolver::apply; one per running thread.
struct SolverScratch {
    std::vector<std::vector<Complex>> filter_hat;
    std::vector<double> denom;
    std::vector<Complex> accum;
    std::vector<Complex> channel;
    std::vector<Complex> row_poly;
};

/// Frequency-domain engine for the per-layer subproblem: all circulant
/// operators are diagonalized on the y-grid, so the quadratic u-solve is an
/// elementwise division. One instance is bound to (y, kernel, mu) and is
/// immutable after construction; apply() is safe to call concurrently with
/// per-thread scratch.
class SpectralSolver {
public:
    SpectralSolver(const ImageGrid& y, const SpectralOperator& kernel_op, double mu,
                   int max_filter_radius = 7)
        : h_(y.height), w_(y.width), mu_(mu), plan_(y.height, y.width) {
        if (!(mu > 0.0)) throw ParameterError("SpectralSolver: mu must be > 0");
        if (kernel_op.height != h_ || kernel_op.width != w_)
            throw DimensionError("SpectralSolver: kernel operator grid does not match image");
        const std::size_t total = y.data.size();
        std::vector<Complex> yhat(total);
        for (std::size_t i = 0; i < total; ++i) yhat[i] = Complex(y.data[i], 0.0);
        plan_.forward(yhat.data());
        ksq_.resize(total);
        khat_conj_yhat_.resize(total);
        for (std::size_t i = 0; i < total; ++i) {
            const Complex k = kernel_op.coefficients[i];
            ksq_[i] = std::norm(k);
            khat_conj_yhat_[i] = std::conj(k) * yhat[i];
        }
        build_phase_tables(max_filter_radius);
    }

    SpectralSolver(const ImageGrid& y, const Kernel& kernel, double mu, int max_filter_radius = 7)
        : SpectralSolver(y, spectral_of_kernel(kernel, y.height, y.width), mu, max_filter_radius) {}

    int height() const { return h_; }
    int width() const { return w_; }
    double mu() const { return mu_; }

    /// One Eq.-style alternation half: u <- M^{-1}(D^T w + (mu/beta) K^T y)
    /// and the responses D_i u. Throws NumericalError when the denominator
    /// degenerates (Assumption-1 violation / near-singular frequency bin).
    LayerApply apply(const FilterBank& filters, double beta, const GridStack& w,
                     SolverScratch& scratch) const {
        if (!(beta > 0.0)) throw ParameterError("SpectralSolver: beta must be > 0");
        if (static_cast<int>(w.size()) != filters.count)
            throw DimensionError("SpectralSolver: w channel count " + std::to_string(w.size()) +
                                 " does not match filter count " + std::to_string(filters.count));
        for (const auto& ch : w)
            if (ch.height != h_ || ch.width != w_)
                throw DimensionError("SpectralSolver: w channel grid does not match image");

        const std::size_t total = static_cast<std::size_t>(h_) * w_;
        const int c_count = filters.count;
        scratch.filter_hat.resize(static_cast<std::size_t>(c_count));
        for (int i = 0; i < c_count; ++i) filter_spectrum(filters, i, scratch);
        scratch.denom.assign(total, 0.0);
        scratch.accum.assign(total, Complex(0.0, 0.0));

        // Denominator sum_i |d_i|^2 + (mu/beta)|k|^2, with the raw Assumption-1
        // quantity sum_i |d_i|^2 + |k|^2 tracked alongside.
        const double ratio = mu_ / beta;
        double min_raw = std::numeric_limits<double>::infinity();
        double min_denom = std::numeric_limits<double>::infinity();
        std::size_t argmin_raw = 0, argmin_denom = 0;
        for (std::size_t j = 0; j < total; ++j) {
            double dsum = 0.0;
            for (int i = 0; i < c_count; ++i) dsum += std::norm(scratch.filter_hat[static_cast<std::size_t>(i)][j]);
            const double raw = dsum + ksq_[j];
            const double denom = dsum + ratio * ksq_[j];
            scratch.denom[j] = denom;
            if (raw < min_raw) {
                min_raw = raw;
                argmin_raw = j;
            }
            if (denom < min_denom) {
                min_denom = denom;
                argmin_denom = j;
            }
        }
        if (min_raw <= 1e-12)
            throw NumericalError("Assumption 1 violated: filters and kernel share a null direction at frequency bin (" +
                                 std::to_string(argmin_raw / static_cast<std::size_t>(w_)) + ", " +
                                 std::to_string(argmin_raw % static_cast<std::size_t>(w_)) + ")");
        if (min_denom <= 1e-12)
            throw NumericalError("ill-posed u-solve: near-singular frequency bin (" +
                                 std::to_string(argmin_denom / static_cast<std::size_t>(w_)) + ", " +
                                 std::to_string(argmin_denom % static_cast<std::size_t>(w_)) + ")");

        for (std::size_t j = 0; j < total; ++j) scratch.accum[j] = ratio * khat_conj_yhat_[j];
        scratch.channel.resize(total);
        for (int i = 0; i < c_count; ++i) {
            const ImageGrid& ch = w[static_cast<std::size_t>(i)];
            for (std::size_t j = 0; j < total; ++j) scratch.channel[j] = Complex(ch.data[j], 0.0);
            plan_.forward(scratch.channel.data());
            const auto& dh = scratch.filter_hat[static_cast<std::size_t>(i)];
            for (std::size_t j = 0; j < total; ++j) scratch.accum[j] += std::conj(dh[j]) * scratch.channel[j];
        }
        for (std::size_t j = 0; j < total; ++j) scratch.accum[j] /= scratch.denom[j];

        LayerApply result;
        result.u = ImageGrid(h_, w_);
        scratch.channel = scratch.accum;
        plan_.inverse(scratch.channel.data());
        for (std::size_t j = 0; j < total; ++j) result.u.data[j] = scratch.channel[j].real();

        result.du.reserve(static_cast<std::size_t>(c_count));
        for (int i = 0; i < c_count; ++i) {
            const auto& dh = scratch.filter_hat[static_cast<std::size_t>(i)];
            for (std::size_t j = 0; j < total; ++j) scratch.channel[j] = dh[j] * scratch.accum[j];
            plan_.inverse(scratch.channel.data());
            ImageGrid g(h_, w_);
            for (std::size_t j = 0; j < total; ++j) g.data[j] = scratch.channel[j].real();
            result.du.push_back(std::move(g));
        }
        return result;
    }

    LayerApply apply(const FilterBank& filters, double beta, const GridStack& w) const {
        SolverScratch scratch;
        return apply(filters, beta, w, scratch);
    }

private:
    void build_phase_tables(int max_radius) {
        max_radius_ = max_radius;
        phase_row_.resize(static_cast<std::size_t>(max_radius) + 1);
        phase_col_.resize(static_cast<std::size_t>(max_radius) + 1);
        for (int d = 0; d <= max_radius; ++d) {
            auto& pr = phase_row_[static_cast<std::size_t>(d)];
            pr.resize(static_cast<std::size_t>(h_));
            for (int r = 0; r < h_; ++r) {
                const double a = -6.283185307179586476925286766559 * d * r / h_;
                pr[static_cast<std::size_t>(r)] = Complex(std::cos(a), std::sin(a));
            }
            auto& pc = phase_col_[static_cast<std::size_t>(d)];
            pc.resize(static_cast<std::size_t>(w_));
            for (int c = 0; c < w_; ++c) {
                const double a = -6.283185307179586476925286766559 * d * c / w_;
                pc[static_cast<std::size_t>(c)] = Complex(std::cos(a), std::sin(a));
            }
        }
    }

    Complex phase_row(int d, int r) const {
        if (d >= 0) {
            if (d <= max_radius_) return phase_row_[static_cast<std::size_t>(d)][static_cast<std::size_t>(r)];
        } else if (-d <= max_radius_) {
            return std::conj(phase_row_[static_cast<std::size_t>(-d)][static_cast<std::size_t>(r)]);
        }
        const double a = -6.283185307179586476925286766559 * d * r / h_;
        return Complex(std::cos(a), std::sin(a));
    }

    Complex phase_col(int d, int c) const {
        if (d >= 0) {
            if (d <= max_radius_) return phase_col_[static_cast<std::size_t>(d)][static_cast<std::size_t>(c)];
        } else if (-d <= max_radius_) {
            return std::conj(phase_col_[static_cast<std::size_t>(-d)][static_cast<std::size_t>(c)]);
        }
        const double a = -6.283185307179586476925286766559 * d * c / w_;
        return Complex(std::cos(a), std::sin(a));
    }

    // Frequency response of filter i by direct tap-phase evaluation; with the
    // small centered footprints this is exact and cheaper than padding + FFT.
    void filter_spectrum(const FilterBank& filters, int i, SolverScratch& scratch) const {
        if (filters.height > h_ || filters.width > w_)
            throw DimensionError("SpectralSolver: filter footprint exceeds grid");
        const std::size_t total = static_cast<std::size_t>(h_) * w_;
        auto& out = scratch.filter_hat[static_cast<std::size_t>(i)];
        out.assign(total, Complex(0.0, 0.0));
        scratch.row_poly.resize(static_cast<std::size_t>(w_));
        const int cr = filters.height / 2;
        const int cc = filters.width / 2;
        for (int fr = 0; fr < filters.height; ++fr) {
            bool any = false;
            for (int fc = 0; fc < filters.width; ++fc)
                if (filters.at(i, fr, fc) != 0.0) any = true;
            if (!any) continue;
            for (int c = 0; c < w_; ++c) {
                Complex s(0.0, 0.0);
                for (int fc = 0; fc < filters.width; ++fc) {
                    const double t = filters.at(i, fr, fc);
                    if (t != 0.0) s += t * phase_col(fc - cc, c);
                }
                scratch.row_poly[static_cast<std::size_t>(c)] = s;
            }
            for (int r = 0; r < h_; ++r) {
                const Complex pr = phase_row(fr - cr, r);
                Complex* row = out.data() + static_cast<std::size_t>(r) * w_;
                for (int c = 0; c < w_; ++c) row[static_cast<std::size_t>(c)] += pr * scratch.row_poly[static_cast<std::size_t>(c)];
            }
        }
    }

    int h_, w_;
    double mu_;
    int max_radius_ = 0;
    fft::Plan2d plan_;
    std::vector<double> ksq_;
    std::vector<Complex> khat_conj_yhat_;
    std::vector<std::vector<Complex>> phase_row_;
    std::vector<std::vector<Complex>> phase_col_;
};

/// Solves M u = D^T w + (mu/beta) K^T y for u on the grid of y.
inline ImageGrid solve_u(const GridStack& w, const FilterBank& filters, const SpectralOperator& kernel_op,
                         const ImageGrid& y, double mu, double beta) {
    SpectralSolver solver(y, kernel_op, mu, std::max(7, std::max(filters.height, filters.width) / 2));
    return solver.apply(filters, beta, w).u;
}

inline GridStack soft_threshold_stack(const GridStack& v, double lambda) {
    GridStack out;
    out.reserve(v.size());
    for (const auto& g : v) out.push_back(soft_threshold(g, lambda));
    return out;
}

struct HqsResult {
    ImageGrid u;
    GridStack w;
    // When recording: w^0 (initial), then w after each iteration.
    std::optional<std::vector<GridStack>> w_snapshots;
};

/// Runs the fixed-parameter splitting iteration: per alternation, the spectral
/// u-solve followed by elementwise soft-thresholding with lambda = 1/beta.
inline HqsResult hqs_run(const ImageGrid& y, const Kernel& kernel, const HqsConfig& config,
                         GridStack initial_w = {}, bool record_w = false) {
    config.validate();
    SpectralSolver solver(y, kernel, config.mu,
                          std::max(7, std::max(config.filters.height, config.filters.width) / 2));
    SolverScratch scratch;
    GridStack w = initial_w.empty() ? zero_stack(config.filters.count, y.height, y.width)
                                    : std::move(initial_w);
    HqsResult result;
    if (record_w) {
        result.w_snapshots.emplace();
        result.w_snapshots->push_back(w);
    }
    const double lambda = 1.0 / config.beta;
    for (int it = 0; it < config.iterations; ++it) {
        LayerApply step = solver.apply(config.filters, config.beta, w, scratch);
        w = soft_threshold_stack(step.du, lambda);
        result.u = std::move(step.u);
        if (record_w) result.w_snapshots->push_back(w);
    }
    result.w = std::move(w);
    return result;
}

/// Spatial response of one bank filter under periodic boundaries.
inline ImageGrid apply_filter(const ImageGrid& image, const FilterBank& bank, int i) {
    SpectralOperator img_hat = spectral_transform(image);
    SpectralOperator f_hat =
        spectral_transform(pad_filter(bank.filter(i), bank.height, bank.width, image.height, image.width));
    for (std::size_t j = 0; j < img_hat.coefficients.size(); ++j) img_hat.coefficients[j] *= f_hat.coefficients[j];
    return inverse_spectral(img_hat);
}

/// The relaxed splitting objective:
/// (mu/2)||y - K u||^2 + sum_i ||w_i||_1 + (beta/2) sum_i ||D_i u - w_i||^2.
inline double hqs_objective(const ImageGrid& y, const Kernel& kernel, const FilterBank& filters,
                            double mu, double beta, const ImageGrid& u, const GridStack& w) {
    ImageGrid ku = circular_convolve(u, kernel);
    double data = 0.0;
    for (std::size_t j = 0; j < y.data.size(); ++j) {
        const double d = y.data[j] - ku.data[j];
        data += d * d;
    }
    double l1 = 0.0, relax = 0.0;
    for (int i = 0; i < filters.count; ++i) {
        ImageGrid du = apply_filter(u, filters, i);
        const ImageGrid& wi = w[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < du.data.size(); ++j) {
            l1 += std::abs(wi.data[j]);
            const double d = du.data[j] - wi.data[j];
            relax += d * d;
        }
    }
    return 0.5 * mu * data + l1 + 0.5 * beta * relax;
}

} // namespace decun
