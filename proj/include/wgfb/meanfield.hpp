#pragma once

// Thermodynamic-limit dynamics of the magnetization m = <J>/N:
//
//   dm_x/dt = Gamma m_x m_z
//   dm_y/dt = -2 Omega m_z + Gamma kappa m_y m_z
//   dm_z/dt = 2 Omega m_y - Gamma m_x^2 - Gamma kappa m_y^2
//
// |m| is conserved; the canonical start is the ground state (0, 0, -1/2).

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wgfb/ode.hpp"
#include "wgfb/params.hpp"

namespace wgfb {

using Magnetization = Eigen::Vector3d;

[[nodiscard]] inline Magnetization ground_magnetization() { return {0.0, 0.0, -0.5}; }

/// Mean-field tolerances: tighter than the finite-N engine since the state is
/// tiny and norm and C_kappa conservation are checked at the 1e-9 level.
[[nodiscard]] inline OdeTolerances meanfield_tolerances() { return {1e-12, 1e-14, 50'000'000}; }

[[nodiscard]] Magnetization mf_rhs(const Magnetization& m, const SystemParams& params);

/// Analytic Jacobian of mf_rhs with respect to m.
[[nodiscard]] Eigen::Matrix3d mf_jacobian(const Magnetization& m, const SystemParams& params);

struct MeanFieldSample {
    double t = 0.0;
    Magnetization m;
};

[[nodiscard]] std::vector<MeanFieldSample> integrate(const Magnetization& m0,
                                                     const SystemParams& params,
                                                     std::span<const double> times,
                                                     const OdeTolerances& tol = meanfield_tolerances());

enum class MotionConstantBranch { Kappa, KappaZero };

struct MotionConstant {
    double value = 0.0;
    MotionConstantBranch branch = MotionConstantBranch::Kappa;
};

/// C_kappa = Gamma m_x^kappa / (Gamma kappa m_y - 2 Omega) for kappa != 0,
/// C_0 = m_x exp(Gamma m_y / (2 Omega)) for kappa == 0.
/// Throws DomainError where the expression is not real and finite; on the
/// m_x = 0 manifold with kappa > 0 the value is 0 even at the fixed point.
[[nodiscard]] MotionConstant constant_of_motion(const Magnetization& m, const SystemParams& params);

/// Eq. of motion restricted to the m_x = 0 manifold; returns (dm_y, dm_z).
[[nodiscard]] Eigen::Vector2d reduced_rhs(double my, double mz, const SystemParams& params);

/// The restoring force of the equivalent second-order equation
/// d^2 m_z/dt^2 = -4 Omega^2 (1 - Gamma kappa m_y / Omega)(1 - Gamma kappa m_y / (2 Omega)) m_z.
[[nodiscard]] double second_order_mz_acceleration(double my, double mz, const SystemParams& params);

enum class Phase { TimeCrystal, Stationary };

[[nodiscard]] const char* to_string(Phase phase) noexcept;

struct PhaseLabel {
    Phase phase = Phase::Stationary;
    double mz_ss = 0.0;  ///< stationary m_z; NaN in the time-crystal phase
};

/// Critical drive Omega_c = |kappa| Gamma / 4.
[[nodiscard]] double critical_omega(const SystemParams& params);

/// TimeCrystal iff Omega > |kappa| Gamma / 4. The boundary itself is
/// Stationary with mz_ss = 0.
[[nodiscard]] PhaseLabel classify_phase(const SystemParams& params);

/// Stable fixed point on the m_x = 0 manifold: (0, 2 Omega/(Gamma kappa), mz_ss).
/// Throws DomainError in the time-crystal phase and for kappa = 0.
[[nodiscard]] Magnetization stationary_point(const SystemParams& params);

struct PhaseCheckOptions {
    double horizon = 500.0;
    double amplitude_threshold = 1e-3;
    double tail_fraction = 0.2;
    double sample_spacing = 0.05;
    OdeTolerances tolerances{1e-10, 1e-12, 50'000'000};
};

struct NumericPhase {
    PhaseLabel label;
    double late_mean_mz = 0.0;
    double peak_to_peak = 0.0;
};

/// Integrates to Gamma t = horizon and labels TimeCrystal when the
/// peak-to-peak amplitude of m_z over the tail window exceeds the threshold.
/// m0 must lie on the m_x = 0 manifold.
[[nodiscard]] NumericPhase verify_phase_numerically(const SystemParams& params,
                                                    const PhaseCheckOptions& options = {},
                                                    const Magnetization& m0 = ground_magnetization());

/// Uniform grid 0, dt, 2 dt, ... up to and including t_max.
[[nodiscard]] std::vector<double> uniform_times(double t_max, double dt);

}  // namespace wgfb
