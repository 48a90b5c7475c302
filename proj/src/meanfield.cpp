#include "wgfb/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wgfb/errors.hpp"

namespace wgfb {

Magnetization mf_rhs(const Magnetization& m, const SystemParams& params) {
    const double gamma = params.gamma_total;
    const double kappa = params.kappa();
    const double omega = params.omega;
    return {gamma * m.x() * m.z(),
            -2.0 * omega * m.z() + gamma * kappa * m.y() * m.z(),
            2.0 * omega * m.y() - gamma * m.x() * m.x() - gamma * kappa * m.y() * m.y()};
}

Eigen::Matrix3d mf_jacobian(const Magnetization& m, const SystemParams& params) {
    const double gamma = params.gamma_total;
    const double kappa = params.kappa();
    const double omega = params.omega;
    Eigen::Matrix3d jac;
    jac << gamma * m.z(), 0.0, gamma * m.x(),
           0.0, gamma * kappa * m.z(), -2.0 * omega + gamma * kappa * m.y(),
           -2.0 * gamma * m.x(), 2.0 * omega - 2.0 * gamma * kappa * m.y(), 0.0;
    return jac;
}

std::vector<MeanFieldSample> integrate(const Magnetization& m0, const SystemParams& params,
                                       std::span<const double> times, const OdeTolerances& tol) {
    params.validate();
    if (!m0.allFinite()) {
        throw InvalidParameter("initial magnetization must be finite");
    }
    std::vector<MeanFieldSample> out;
    out.reserve(times.size());
    integrate_adaptive([&](double, const Magnetization& m) { return Magnetization(mf_rhs(m, params)); },
                       m0, times, tol,
                       [&](std::size_t, double t, const Magnetization& m) { out.push_back({t, m}); });
    return out;
}

MotionConstant constant_of_motion(const Magnetization& m, const SystemParams& params) {
    const double gamma = params.gamma_total;
    const double kappa = params.kappa();
    const double omega = params.omega;
    if (kappa == 0.0) {
        if (!(omega > 0.0)) {
            throw DomainError("C_0 requires Omega > 0");
        }
        return {m.x() * std::exp(gamma * m.y() / (2.0 * omega)), MotionConstantBranch::KappaZero};
    }
    if (m.x() == 0.0 && kappa > 0.0) {
        // The m_x = 0 manifold is the C = 0 level set, including its fixed point.
        return {0.0, MotionConstantBranch::Kappa};
    }
    const double denominator = gamma * kappa * m.y() - 2.0 * omega;
    if (denominator == 0.0) {
        throw DomainError("C_kappa denominator Gamma kappa m_y - 2 Omega vanishes");
    }
    const bool integer_kappa = std::floor(kappa) == kappa;
    if (m.x() < 0.0 && !integer_kappa) {
        throw DomainError("C_kappa: m_x^kappa is not real for m_x < 0 and non-integer kappa = " +
                          std::to_string(kappa));
    }
    if (m.x() == 0.0 && kappa < 0.0) {
        throw DomainError("C_kappa: m_x^kappa diverges at m_x = 0 for kappa < 0");
    }
    const double value = gamma * std::pow(m.x(), kappa) / denominator;
    if (!std::isfinite(value)) {
        throw DomainError("C_kappa is not finite");
    }
    return {value, MotionConstantBranch::Kappa};
}

Eigen::Vector2d reduced_rhs(double my, double mz, const SystemParams& params) {
    const double gk = params.gamma_total * params.kappa();
    return {-2.0 * params.omega * mz + gk * my * mz, 2.0 * params.omega * my - gk * my * my};
}

double second_order_mz_acceleration(double my, double mz, const SystemParams& params) {
    // Expanded form; equal to the factored expression but finite at Omega = 0.
    const double omega = params.omega;
    const double gk = params.gamma_total * params.kappa();
    return -(2.0 * omega - 2.0 * gk * my) * (2.0 * omega - gk * my) * mz;
}

const char* to_string(Phase phase) noexcept {
    switch (phase) {
        case Phase::TimeCrystal:
            return "time_crystal";
        case Phase::Stationary:
            return "stationary";
    }
    return "unknown";
}

double critical_omega(const SystemParams& params) {
    return 0.25 * std::abs(params.kappa()) * params.gamma_total;
}

PhaseLabel classify_phase(const SystemParams& params) {
    params.validate();
    const double omega_c = critical_omega(params);
    if (params.omega > omega_c) {
        return {Phase::TimeCrystal, std::numeric_limits<double>::quiet_NaN()};
    }
    if (params.omega == omega_c) {
        return {Phase::Stationary, 0.0};
    }
    const double kappa = params.kappa();
    const double ratio = 2.0 * params.omega / (params.gamma_total * kappa);
    const double mz = -std::copysign(1.0, kappa) * std::sqrt(std::max(0.0, 0.25 - ratio * ratio));
    return {Phase::Stationary, mz};
}

Magnetization stationary_point(const SystemParams& params) {
    const PhaseLabel label = classify_phase(params);
    if (label.phase != Phase::Stationary) {
        throw DomainError("no stationary point in the time-crystal phase");
    }
    const double kappa = params.kappa();
    if (kappa == 0.0) {
        throw DomainError("stationary point undefined for kappa = 0");
    }
    // dm_z/dt = m_y (2 Omega - Gamma kappa m_y) = 0 on the m_x = 0 manifold.
    return {0.0, 2.0 * params.omega / (params.gamma_total * kappa), label.mz_ss};
}

NumericPhase verify_phase_numerically(const SystemParams& params, const PhaseCheckOptions& options,
                                      const Magnetization& m0) {
    params.validate();
    if (std::abs(m0.x()) > 1e-12) {
        throw InvalidParameter("verify_phase_numerically: m0 must satisfy m_x = 0");
    }
    if (!(options.horizon > 0.0) || !(options.tail_fraction > 0.0) ||
        !(options.tail_fraction <= 1.0) || !(options.sample_spacing > 0.0)) {
        throw InvalidParameter("verify_phase_numerically: invalid options");
    }
    const std::vector<double> times = uniform_times(options.horizon, options.sample_spacing);
    const auto samples = integrate(m0, params, times, options.tolerances);

    const double tail_start = options.horizon * (1.0 - options.tail_fraction);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : samples) {
        if (s.t >= tail_start) {
            lo = std::min(lo, s.m.z());
            hi = std::max(hi, s.m.z());
            sum += s.m.z();
            ++count;
        }
    }
    NumericPhase out;
    out.peak_to_peak = hi - lo;
    out.late_mean_mz = sum / static_cast<double>(count);
    if (out.peak_to_peak > options.amplitude_threshold) {
        out.label = {Phase::TimeCrystal, std::numeric_limits<double>::quiet_NaN()};
    } else {
        out.label = {Phase::Stationary, out.late_mean_mz};
    }
    return out;
}

std::vector<double> uniform_times(double t_max, double dt) {
    if (!(t_max > 0.0) || !(dt > 0.0) || !std::isfinite(t_max)) {
        throw InvalidParameter("uniform_times: t_max and dt must be positive");
    }
    const auto steps = static_cast<std::size_t>(std::llround(t_max / dt));
    std::vector<double> times;
    times.reserve(steps + 2);
    for (std::size_t k = 0; k <= steps; ++k) {
        times.push_back(static_cast<double>(k) * dt);
    }
    if (times.back() < t_max * (1.0 - 1e-12)) {
        times.push_back(t_max);
    } else {
        times.back() = t_max;
    }
    return times;
}

}  // namespace wgfb
