#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "decun/hqs.hpp"
#include "decun/model.hpp"

namespace decun {

/// Per-layer snapshots: w holds the initial state plus one entry per executed
/// layer; u holds one entry per executed layer.
struct LayerTrace {
    std::vector<GridStack> w;
    std::vector<ImageGrid> u;
};

/// Numerical diagnostics gathered during a forward pass; min_threshold_gap is
/// the smallest ||D u| - lambda| seen over all soft-threshold applications
/// (small values flag proximity to the shrinkage kink).
struct ForwardStats {
    double min_threshold_gap = std::numeric_limits<double>::infinity();
};

struct DecunResult {
    ImageGrid u;
    GridStack w;
    std::optional<LayerTrace> trace;
};

namespace detail {

inline GridStack threshold_with_stats(const GridStack& v, double lambda, ForwardStats* stats) {
    GridStack out = soft_threshold_stack(v, lambda);
    if (stats) {
        for (const auto& g : v)
            for (double x : g.data) {
                const double gap = std::abs(std::abs(x) - lambda);
                if (gap < stats->min_threshold_gap) stats->min_threshold_gap = gap;
            }
    }
    return out;
}

} // namespace detail

/// Runs layers first..L of the unrolled network against a prebuilt solver,
/// starting from the given w. Exposed so resumed evaluations (training) and
/// the full forward share one code path.
inline DecunResult decun_forward_range(const DecunModel& model, const SpectralSolver& solver,
                                       SolverScratch& scratch, GridStack w, int first_layer,
                                       bool record = false, ForwardStats* stats = nullptr) {
    DecunResult result;
    if (record) {
        result.trace.emplace();
        result.trace->w.push_back(w);
    }
    for (int l = first_layer; l <= model.layers; ++l) {
        const LayerParams params = model.layer_params(l);
        LayerApply step;
        try {
            step = solver.apply(params.filters, params.beta, w, scratch);
        } catch (const NumericalError& e) {
            throw NumericalError("layer " + std::to_string(l) + ": " + e.what());
        }
        w = detail::threshold_with_stats(step.du, 1.0 / params.beta, stats);
        result.u = std::move(step.u);
        if (record) {
            result.trace->w.push_back(w);
            result.trace->u.push_back(result.u);
        }
    }
    result.w = std::move(w);
    return result;
}

/// Full unrolled forward pass: layer l computes u^l from w^{l-1} with the
/// schedule-perturbed parameters, then w^l = s_{1/beta_l}(D^l u^l).
inline DecunResult decun_forward(const DecunModel& model, const ImageGrid& y, const Kernel& kernel,
                                 GridStack w0 = {}, bool record = false, ForwardStats* stats = nullptr) {
    model.validate();
    SpectralSolver solver(y, kernel, model.mu,
                          std::max(7, std::max(model.d_bar.height, model.d_bar.width) / 2));
    SolverScratch scratch;
    GridStack w = w0.empty() ? zero_stack(model.filters, y.height, y.width) : std::move(w0);
    return decun_forward_range(model, solver, scratch, std::move(w), 1, record, stats);
}

/// The per-layer affine map h^l(w) = D^l u^l(w); matches the value used inside
/// decun_forward bit-for-bit (same solver path).
inline GridStack apply_h(const DecunModel& model, int l, const GridStack& w, const SpectralSolver& solver,
                         SolverScratch& scratch) {
    const LayerParams params = model.layer_params(l);
    return solver.apply(params.filters, params.beta, w, scratch).du;
}

inline GridStack apply_h(const DecunModel& model, int l, const GridStack& w, const ImageGrid& y,
                         const Kernel& kernel) {
    SpectralSolver solver(y, kernel, model.mu,
                          std::max(7, std::max(model.d_bar.height, model.d_bar.width) / 2));
    SolverScratch scratch;
    return apply_h(model, l, w, solver, scratch);
}

} // namespace decun
