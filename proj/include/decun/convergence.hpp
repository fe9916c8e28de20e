#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "decun/forward.hpp"
#include "decun/hqs.hpp"
#include "decun/model.hpp"

namespace decun {

/// Limit state of the iteration: w* (and u* recomputed from it), with the
/// relative movement of one further iteration as a convergence certificate.
struct FixedPoint {
    GridStack w_star;
    ImageGrid u_star;
    double residual = 0.0;
    bool warned = false;
};

/// Runs the fixed-parameter iteration to (numerical) convergence from zeros.
/// Throws NumericalError when one further iteration still moves w by more
/// than strict_tol relative; sets `warned` above warn_tol.
inline FixedPoint fixed_point(const FilterBank& limit_filters, double beta_bar, double mu,
                              const ImageGrid& y, const Kernel& kernel, int iterations = 500,
                              double strict_tol = 1e-6, double warn_tol = 1e-9) {
    HqsConfig config;
    config.mu = mu;
    config.beta = beta_bar;
    config.iterations = iterations;
    config.filters = limit_filters;
    HqsResult run = hqs_run(y, kernel, config);

    SpectralSolver solver(y, kernel, mu, std::max(7, std::max(limit_filters.height, limit_filters.width) / 2));
    LayerApply extra = solver.apply(limit_filters, beta_bar, run.w);
    GridStack w_next = soft_threshold_stack(extra.du, 1.0 / beta_bar);

    FixedPoint fp;
    const double ref = stack_norm(run.w);
    const double moved = stack_distance(w_next, run.w);
    fp.residual = moved / std::max(ref, 1e-300);
    if (fp.residual >= strict_tol)
        throw NumericalError("fixed_point: not converged after " + std::to_string(iterations) +
                             " iterations, residual " + std::to_string(fp.residual));
    fp.warned = fp.residual >= warn_tol;
    fp.w_star = std::move(run.w);
    fp.u_star = std::move(extra.u); // Eq. u_J evaluated at w*
    return fp;
}

/// Spectral radius of G = D M^{-1} D^T, evaluated per frequency:
/// rho = max_omega sum_i|d_i|^2 / (sum_i|d_i|^2 + (mu/beta)|k|^2).
inline double spectral_radius_G(const FilterBank& filters, const SpectralOperator& kernel_op,
                                double mu, double beta) {
    if (!(mu > 0.0) || !(beta > 0.0)) throw ParameterError("spectral_radius_G: mu and beta must be > 0");
    const int h = kernel_op.height, w = kernel_op.width;
    const std::size_t total = kernel_op.coefficients.size();
    std::vector<double> dsum(total, 0.0);
    for (int i = 0; i < filters.count; ++i) {
        SpectralOperator f = spectral_transform(pad_filter(filters.filter(i), filters.height, filters.width, h, w));
        for (std::size_t j = 0; j < total; ++j) dsum[j] += std::norm(f.coefficients[j]);
    }
    const double ratio = mu / beta;
    double rho = 0.0;
    for (std::size_t j = 0; j < total; ++j) {
        const double ksq = std::norm(kernel_op.coefficients[j]);
        if (dsum[j] + ksq <= 1e-12)
            throw NumericalError("spectral_radius_G: Assumption 1 violated at frequency bin (" +
                                 std::to_string(j / static_cast<std::size_t>(w)) + ", " +
                                 std::to_string(j % static_cast<std::size_t>(w)) + ")");
        const double value = dsum[j] / (dsum[j] + ratio * ksq);
        if (value > rho) rho = value;
    }
    return rho;
}

inline double spectral_radius_G(const FilterBank& filters, const Kernel& kernel, double mu, double beta,
                                int height, int width) {
    return spectral_radius_G(filters, spectral_of_kernel(kernel, height, width), mu, beta);
}

/// lambda_max = max{lambda_1, ..., lambda_l0, sqrt((1 + rho(G*))/2)} with
/// lambda_l = sqrt(rho((G^l)^2)) = rho(G^l) (G^l is symmetric PSD here).
inline double lambda_max(const DecunModel& model, const Kernel& kernel, int l0_window, int height,
                         int width) {
    if (l0_window < 1) throw ParameterError("lambda_max: l0_window must be >= 1");
    const SpectralOperator kernel_op = spectral_of_kernel(kernel, height, width);
    double result = std::sqrt(0.5 * (1.0 + spectral_radius_G(model.d_bar, kernel_op, model.mu, model.beta_bar)));
    const int window = std::min(l0_window, model.layers);
    for (int l = 1; l <= window; ++l) {
        const LayerParams p = model.layer_params(l);
        const double lam = spectral_radius_G(p.filters, kernel_op, model.mu, p.beta);
        if (lam > result) result = lam;
    }
    return result;
}

/// b_l = 3|xi_l| ||u*|| + 2|gamma_l| / beta_bar^2 for one layer index (index 0
/// extends the schedule formulas, as used by the rate-bound sums).
inline double b_value(const ScheduleSpec& schedule, int l, double u_star_norm, double beta_bar) {
    const ScheduleCoeffs c = schedule.evaluate(l, beta_bar);
    return 3.0 * std::abs(c.xi) * u_star_norm + 2.0 * std::abs(c.gamma) / (beta_bar * beta_bar);
}

/// Per-layer perturbation magnitudes b_1..b_L.
inline std::vector<double> b_sequence(const ScheduleSpec& schedule, double u_star_norm, double beta_bar,
                                      int layer_count) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(layer_count));
    for (int l = 1; l <= layer_count; ++l) out.push_back(b_value(schedule, l, u_star_norm, beta_bar));
    return out;
}

/// General rate bound, evaluated as the finite discrete convolution
/// bound_m = lambda^m ||w^0 - w*|| + sum_{i=0}^{m-1} lambda^{m-1-i} b_i,
/// for m = 1..L; bound_m dominates ||w^m - w*||.
inline std::vector<double> rate_bound_general(const ScheduleSpec& schedule, double lambda_max_value,
                                              double w0_dist, double u_star_norm, double beta_bar,
                                              int layer_count) {
    if (!(lambda_max_value > 0.0 && lambda_max_value < 1.0))
        throw ParameterError("rate_bound_general: lambda_max must lie in (0, 1)");
    std::vector<double> bounds(static_cast<std::size_t>(layer_count), 0.0);
    std::vector<double> b(static_cast<std::size_t>(layer_count), 0.0);
    for (int i = 0; i < layer_count; ++i) b[static_cast<std::size_t>(i)] = b_value(schedule, i, u_star_norm, beta_bar);
    double pow_lambda = 1.0;
    for (int m = 1; m <= layer_count; ++m) {
        pow_lambda *= lambda_max_value;
        double conv = 0.0;
        for (int i = 0; i < m; ++i)
            conv += std::pow(lambda_max_value, m - 1 - i) * b[static_cast<std::size_t>(i)];
        bounds[static_cast<std::size_t>(m - 1)] = pow_lambda * w0_dist + conv;
    }
    return bounds;
}

/// Closed-form geometric-schedule bound:
/// bound_m = lambda^m ||w0 - w*|| + 3||u*|| (xi^m - lambda^m)/(xi - lambda)
///           + (2/beta_bar^2) (gamma^m - lambda^m)/(gamma - lambda).
/// Cross-checked against the discrete-convolution evaluation; a mismatch
/// beyond 1e-10 relative raises NumericalError instead of guessing a sign
/// convention.
inline std::vector<double> rate_bound_geometric(double xi, double gamma, double lambda_max_value,
                                                double w0_dist, double u_star_norm, double beta_bar,
                                                int layer_count) {
    if (!(xi > 0.0 && xi < 1.0) || !(gamma > 0.0 && gamma < 1.0))
        throw ParameterError("rate_bound_geometric: xi and gamma must lie in (0, 1)");
    if (std::abs(xi - lambda_max_value) < 1e-12 || std::abs(gamma - lambda_max_value) < 1e-12)
        throw NumericalError("rate_bound_geometric: schedule rate coincides with lambda_max; "
                             "use rate_bound_general (discrete convolution) instead");
    std::vector<double> closed(static_cast<std::size_t>(layer_count), 0.0);
    for (int m = 1; m <= layer_count; ++m) {
        const double lm = std::pow(lambda_max_value, m);
        const double term_xi = 3.0 * u_star_norm * (std::pow(xi, m) - lm) / (xi - lambda_max_value);
        const double term_gamma =
            2.0 / (beta_bar * beta_bar) * (std::pow(gamma, m) - lm) / (gamma - lambda_max_value);
        closed[static_cast<std::size_t>(m - 1)] = lm * w0_dist + term_xi + term_gamma;
    }
    const std::vector<double> conv = rate_bound_general(ScheduleSpec::exponential(xi, gamma),
                                                        lambda_max_value, w0_dist, u_star_norm,
                                                        beta_bar, layer_count);
    for (int m = 0; m < layer_count; ++m) {
        const double a = closed[static_cast<std::size_t>(m)], b = conv[static_cast<std::size_t>(m)];
        if (std::abs(a - b) > 1e-10 * std::max({1.0, std::abs(a), std::abs(b)}))
            throw NumericalError("rate_bound_geometric: closed form disagrees with discrete convolution at layer " +
                                 std::to_string(m + 1));
    }
    return closed;
}

/// p-series bound:
/// bound_m = lambda^m ||w0 - w*||
///           + (3||u*|| + 2/beta_bar^2) sum_{i=0}^{m-1} lambda^{m-1-i} (1/(i+1))^p.
inline std::vector<double> rate_bound_pseries(double p, double lambda_max_value, double w0_dist,
                                              double u_star_norm, double beta_bar, int layer_count) {
    if (!(p >= 1.0)) throw ParameterError("rate_bound_pseries: p must be >= 1");
    std::vector<double> bounds(static_cast<std::size_t>(layer_count), 0.0);
    const double coeff = 3.0 * u_star_norm + 2.0 / (beta_bar * beta_bar);
    for (int m = 1; m <= layer_count; ++m) {
        double sum = 0.0;
        for (int i = 0; i < m; ++i)
            sum += std::pow(lambda_max_value, m - 1 - i) * std::pow(1.0 / (i + 1.0), p);
        bounds[static_cast<std::size_t>(m - 1)] = std::pow(lambda_max_value, m) * w0_dist + coeff * sum;
    }
    return bounds;
}

struct TraceRow {
    int l = 0;
    double error = 0.0;
    double log_error = 0.0;
    double lambda = 0.0;
    std::optional<double> bound; // normalized by ||w*||, absent when no analytic bound applies
};

struct ConvergenceTrace {
    std::vector<TraceRow> rows;
};

/// Per-layer error trace Error_l = ||w^l - w*|| / ||w*|| for l = 1..L, with the
/// per-layer contraction factor lambda_l and (for summable schedules) the
/// Theorem-style analytic bound normalized by ||w*||.
inline ConvergenceTrace error_trace(const DecunModel& model, const ImageGrid& y, const Kernel& kernel,
                                    const FixedPoint& fp) {
    const double w_star_norm = stack_norm(fp.w_star);
    if (w_star_norm <= 0.0)
        throw NumericalError("error_trace: degenerate reference, ||w*|| = 0");

    DecunResult run = decun_forward(model, y, kernel, {}, /*record=*/true);
    const SpectralOperator kernel_op = spectral_of_kernel(kernel, y.height, y.width);

    std::vector<double> bounds;
    if (model.schedule.summable()) {
        const double lam = lambda_max(model, kernel, model.layers, y.height, y.width);
        const double w0_dist = stack_distance(run.trace->w.front(), fp.w_star);
        bounds = rate_bound_general(model.schedule, lam, w0_dist, norm(fp.u_star), model.beta_bar,
                                    model.layers);
    }

    ConvergenceTrace trace;
    trace.rows.reserve(static_cast<std::size_t>(model.layers));
    for (int l = 1; l <= model.layers; ++l) {
        TraceRow row;
        row.l = l;
        row.error = stack_distance(run.trace->w[static_cast<std::size_t>(l)], fp.w_star) / w_star_norm;
        row.log_error = row.error > 0.0 ? std::log(row.error) : -std::numeric_limits<double>::infinity();
        const LayerParams params = model.layer_params(l);
        row.lambda = spectral_radius_G(params.filters, kernel_op, model.mu, params.beta);
        if (!bounds.empty()) row.bound = bounds[static_cast<std::size_t>(l - 1)] / w_star_norm;
        trace.rows.push_back(row);
    }
    return trace;
}

/// Divergence heuristic for run manifests: the error tail stopped decreasing
/// (mean of the last 5 layers >= mean of the 5 before) or stayed above 1e-2.
inline bool trace_divergent(const ConvergenceTrace& trace) {
    const std::size_t n = trace.rows.size();
    if (n < 10) return false;
    auto mean_range = [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += trace.rows[i].error;
        return s / static_cast<double>(hi - lo);
    };
    const double tail = mean_range(n - 5, n);
    const double before = mean_range(n - 10, n - 5);
    return tail >= 1e-2 || tail >= before;
}

/// CSV export: "l,error,log_error,lambda_l,bound", one row per layer, 15
/// significant digits; bound is "nan" when no analytic bound applies.
inline void write_trace_csv(const ConvergenceTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_trace_csv: cannot open " + path);
    out << "l,error,log_error,lambda_l,bound\n";
    char buf[256];
    for (const auto& row : trace.rows) {
        const double bound = row.bound ? *row.bound : std::numeric_limits<double>::quiet_NaN();
        std::snprintf(buf, sizeof(buf), "%d,%.15g,%.15g,%.15g,%.15g", row.l, row.error, row.log_error,
                      row.lambda, bound);
        out << buf << "\n";
    }
    if (!out) throw IoError("write_trace_csv: write failed for " + path);
}

} // namespace decun
