#pragma once

// Adaptive Dormand-Prince 5(4) integrator over Eigen-valued states.
//
// The state may be any dense Eigen object (real or complex, vector or
// matrix). Output is produced by stepping exactly onto each requested time,
// so reported values carry the full fifth-order accuracy of accepted steps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <utility>

#include "wgfb/errors.hpp"

namespace wgfb {

struct OdeTolerances {
    double rtol = 1e-9;
    double atol = 1e-11;
    std::size_t max_steps = 50'000'000;
};

struct OdeStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
};

/// Post-accept hook that leaves the state unchanged.
struct NoProjection {
    template <class State>
    void operator()(State&) const noexcept {}
};

namespace detail {

// Hairer's RMS norm of `e` scaled by atol + rtol * max(|y0|, |y1|).
template <class State>
double scaled_rms(const State& e, const State& y0, const State& y1, const OdeTolerances& tol) {
    const auto scale = tol.atol + tol.rtol * y0.array().abs().max(y1.array().abs());
    const double sum = (e.array().abs() / scale).square().sum();
    return std::sqrt(sum / static_cast<double>(e.size()));
}

template <class State>
double rms(const State& v, const State& y0, const OdeTolerances& tol) {
    const auto scale = tol.atol + tol.rtol * y0.array().abs();
    return std::sqrt((v.array().abs() / scale).square().sum() / static_cast<double>(v.size()));
}

}  // namespace detail

/// Integrates dy/dt = rhs(t, y) from times.front(), calling
/// observe(index, t, y) at every entry of `times` (including the first).
///
/// `project` runs on every accepted state, before it is observed or used as
/// the start of the next step. Throws IntegrationError if the step size
/// underflows or the step budget is exhausted.
template <class State, class Rhs, class Observer, class Projection = NoProjection>
OdeStats integrate_adaptive(Rhs&& rhs, State y, std::span<const double> times,
                            const OdeTolerances& tol, Observer&& observe,
                            Projection&& project = {}) {
    if (times.empty()) {
        return {};
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw InvalidParameter("output times must be strictly increasing");
        }
    }
    if (!(tol.rtol > 0.0) || !(tol.atol > 0.0)) {
        throw InvalidParameter("integrator tolerances must be positive");
    }

    // Dormand-Prince tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeStats stats;
    double t = times.front();
    project(y);
    observe(std::size_t{0}, t, static_cast<const State&>(y));
    if (times.size() == 1) {
        return stats;
    }

    State k1 = rhs(t, static_cast<const State&>(y));
    ++stats.rhs_evaluations;

    // Initial step guess (Hairer, Norsett & Wanner, II.4).
    double h;
    {
        const double d0 = detail::rms(y, y, tol);
        const double d1 = detail::rms(k1, y, tol);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, times.back() - t);
        State y1 = y + h0 * k1;
        State f1 = rhs(t + h0, static_cast<const State&>(y1));
        ++stats.rhs_evaluations;
        const double d2 = detail::rms(State(f1 - k1), y, tol) / h0;
        const double dmax = std::max(d1, d2);
        const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
        h = std::min(100.0 * h0, h1);
    }

    bool last_rejected = false;
    std::size_t next = 1;
    while (next < times.size()) {
        const double target = times[next];
        const double remaining = target - t;
        bool hits_target = false;
        double step = h;
        if (step >= remaining * (1.0 - 1e-12)) {
            step = remaining;
            hits_target = true;
        }
        if (step < 1e-14 * std::max(1.0, std::abs(t))) {
            throw IntegrationError("step size underflow", t);
        }
        if (stats.accepted + stats.rejected >= tol.max_steps) {
            throw IntegrationError("step budget exhausted", t);
        }

        State k2 = rhs(t + c2 * step, State(y + step * (a21 * k1)));
        State k3 = rhs(t + c3 * step, State(y + step * (a31 * k1 + a32 * k2)));
        State k4 = rhs(t + c4 * step, State(y + step * (a41 * k1 + a42 * k2 + a43 * k3)));
        State k5 = rhs(t + c5 * step,
                       State(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        State k6 = rhs(t + step,
                       State(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        State y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        State k7 = rhs(t + step, static_cast<const State&>(y_new));
        stats.rhs_evaluations += 6;

        State err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err_norm = detail::scaled_rms(err, y, y_new, tol);
        if (!std::isfinite(err_norm)) {
            throw IntegrationError("non-finite error estimate", t);
        }

        if (err_norm <= 1.0) {
            ++stats.accepted;
            t = hits_target ? target : t + step;
            y = std::move(y_new);
            project(y);
            // FSAL reuse is only valid when the projection did not move y.
            if constexpr (std::is_same_v<std::decay_t<Projection>, NoProjection>) {
                k1 = std::move(k7);
            } else {
                k1 = rhs(t, static_cast<const State&>(y));
                ++stats.rhs_evaluations;
            }
            if (hits_target) {
                observe(next, t, static_cast<const State&>(y));
                ++next;
            }
            double factor = err_norm == 0.0 ? 10.0 : 0.9 * std::pow(err_norm, -0.2);
            factor = std::clamp(factor, 0.2, last_rejected ? 1.0 : 10.0);
            // A step shortened to hit an output time says nothing about the
            // natural step, so keep the larger of the two.
            h = hits_target ? std::max(h, step * factor) : step * factor;
            last_rejected = false;
        } else {
            ++stats.rejected;
            h = step * std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
            last_rejected = true;
        }
    }
    return stats;
}

}  // namespace wgfb
