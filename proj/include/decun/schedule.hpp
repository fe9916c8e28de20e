#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "decun/error.hpp"
#include "decun/rng.hpp"

namespace decun {

enum class ScheduleKind { zero, exponential, p_series, gaussian_random };

inline std::string to_string(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::zero: return "zero";
        case ScheduleKind::exponential: return "exponential";
        case ScheduleKind::p_series: return "p_series";
        case ScheduleKind::gaussian_random: return "gaussian_random";
    }
    return "?";
}

/// Per-layer coefficient pair (xi_l, gamma_l).
struct ScheduleCoeffs {
    double xi = 0.0;
    double gamma = 0.0;
};

/// The vanishing (or, for gaussian_random, deliberately non-vanishing)
/// sequences controlling per-layer deviation from the limit parameters.
///
/// Conventions (layer index l starts at 1; index 0 extends the formulas and is
/// used by the analytic rate bounds):
///   exponential:     xi_l = xi^l,  gamma_l = gamma^l
///   p_series:        xi_l = gamma_l = (1/(l+1))^p
///   gaussian_random: xi_l, gamma_l ~ N(0, (l/divisor)^2), derived per layer
///                    from the seed; gamma_l is clamped in evaluate() so the
///                    effective beta stays >= 0.05 * beta_bar
///   zero:            xi_l = gamma_l = 0 (classic HQS limit)
struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::zero;
    double xi = 0.0;
    double gamma = 0.0;
    double p = 1.0;
    std::uint64_t seed = 0;
    double divisor = 60.0;

    static ScheduleSpec zero() { return ScheduleSpec{}; }

    static ScheduleSpec exponential(double xi, double gamma) {
        ScheduleSpec s;
        s.kind = ScheduleKind::exponential;
        s.xi = xi;
        s.gamma = gamma;
        s.validate();
        return s;
    }

    static ScheduleSpec p_series(double p) {
        ScheduleSpec s;
        s.kind = ScheduleKind::p_series;
        s.p = p;
        s.validate();
        return s;
    }

    static ScheduleSpec gaussian_random(std::uint64_t seed, double divisor = 60.0) {
        ScheduleSpec s;
        s.kind = ScheduleKind::gaussian_random;
        s.seed = seed;
        s.divisor = divisor;
        s.validate();
        return s;
    }

    void validate() const {
        switch (kind) {
            case ScheduleKind::exponential:
                if (!(xi > 0.0 && xi < 1.0) || !(gamma > 0.0 && gamma < 1.0))
                    throw ParameterError("ScheduleSpec: exponential requires 0 < xi < 1 and 0 < gamma < 1");
                break;
            case ScheduleKind::p_series:
                if (!(p >= 1.0)) throw ParameterError("ScheduleSpec: p_series requires p >= 1");
                break;
            case ScheduleKind::gaussian_random:
                if (!(divisor > 0.0)) throw ParameterError("ScheduleSpec: gaussian_random divisor must be > 0");
                break;
            case ScheduleKind::zero:
                break;
        }
    }

    /// True when sum_l |xi_l| converges (the convergence theorems apply).
    bool summable() const { return kind != ScheduleKind::gaussian_random; }

    ScheduleCoeffs evaluate(int l, double beta_bar) const {
        if (l < 0) throw ParameterError("ScheduleSpec: layer index must be >= 0");
        ScheduleCoeffs c;
        switch (kind) {
            case ScheduleKind::zero:
                break;
            case ScheduleKind::exponential:
                c.xi = std::pow(xi, l);
                c.gamma = std::pow(gamma, l);
                break;
            case ScheduleKind::p_series:
                c.xi = std::pow(1.0 / (l + 1.0), p);
                c.gamma = c.xi;
                break;
            case ScheduleKind::gaussian_random: {
                const double sigma = l / divisor;
                Rng rng(derive_seed(seed, static_cast<std::uint64_t>(l)));
                c.xi = sigma * rng.normal();
                c.gamma = sigma * rng.normal();
                const double floor = -0.95 * beta_bar;
                if (c.gamma < floor) c.gamma = floor;
                break;
            }
        }
        return c;
    }
};

} // namespace decun
