#pragma once

// Gaussian quantum-fluctuation layer in the thermodynamic limit.
//
// The covariance Sigma_ab = <{F_a, F_b}>/2 of the fluctuation operators
// F_a = (J_a - <J_a>)/sqrt(N) obeys
//
//   dSigma/dt = -s A s + G Sigma + Sigma G^T,
//
// where s_ab = eps_abd m_d is the commutator matrix, A the symmetric part of
// the dissipator and G the drift matrix, all evaluated at the running m(t).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgfb/meanfield.hpp"
#include "wgfb/ode.hpp"
#include "wgfb/params.hpp"

namespace wgfb {

struct StructureMatrices {
    Eigen::Matrix3d a;          ///< (Gamma/2) diag(1 + kappa^2, 2, 0)
    Eigen::Matrix3d b;          ///< antisymmetric, b(0,1) = -(Gamma/2)(kappa + 1)
    Eigen::Matrix3d h;          ///< -(g Gamma/2)(e1 e2^T + e2 e1^T)
    Eigen::Vector3d omega_vec;  ///< (2 Omega, 0, 0)
};

[[nodiscard]] StructureMatrices structure_matrices(const SystemParams& params);

/// s_ab = sum_d eps_abd m_d.
[[nodiscard]] Eigen::Matrix3d s_matrix(const Magnetization& m);

/// Closed-form drift matrix.
[[nodiscard]] Eigen::Matrix3d G_matrix(const Magnetization& m, const SystemParams& params);

struct GeneratorDecomposition {
    Eigen::Matrix3d d_local;       ///< D^L from the linear drive
    Eigen::Matrix3d d_coherent;    ///< D^C from the two-axis Hamiltonian
    Eigen::Matrix3d d_dissipative; ///< D^B from the antisymmetric dissipator part
    Eigen::Matrix3d q_coherent;    ///< Q^C = s (h^T + h)
    Eigen::Matrix3d q_dissipative; ///< Q^B = s B

    [[nodiscard]] Eigen::Matrix3d sum() const {
        return d_local + d_coherent + d_dissipative + q_coherent + q_dissipative;
    }
};

/// The drift matrix assembled term by term from Levi-Civita contractions of
/// the structure matrices. Its sum() equals G_matrix().
[[nodiscard]] GeneratorDecomposition generator_decomposition(const Magnetization& m,
                                                             const SystemParams& params);

/// -s A s, the noise (diffusion) term of the covariance equation.
[[nodiscard]] Eigen::Matrix3d noise_matrix(const Magnetization& m, const SystemParams& params);

struct CovarianceState {
    Magnetization m;
    Eigen::Matrix3d sigma;
};

/// Coherent all-ground product state: m = (0, 0, -1/2), Sigma = diag(1/4, 1/4, 0).
[[nodiscard]] CovarianceState initial_covariance();

/// dSigma/dt for a given state.
[[nodiscard]] Eigen::Matrix3d covariance_rhs(const Magnetization& m, const Eigen::Matrix3d& sigma,
                                             const SystemParams& params);

struct PrincipalFrame {
    Eigen::Matrix3d rotation;    ///< proper rotation with rotation * n = e_z
    double j = 0.0;              ///< |m|
    Eigen::Matrix2d sigma_hat;   ///< upper-left block of R Sigma R^T, divided by j
    double classical_variance = 0.0;  ///< (R Sigma R^T)(2, 2), diagnostics only
};

/// Rotation about n x e_z by arccos(n . e_z); identity for n = +e_z and a
/// rotation by pi about x for n = -e_z. Throws UndefinedDirection if
/// |m| <= direction_tolerance.
[[nodiscard]] Eigen::Matrix3d align_to_z(const Magnetization& m, double direction_tolerance = 1e-10);

[[nodiscard]] PrincipalFrame principal_frame(const Magnetization& m, const Eigen::Matrix3d& sigma,
                                             double direction_tolerance = 1e-10);

/// xi = 2 * min eigenvalue of sigma_hat.
[[nodiscard]] double squeezing_xi(const PrincipalFrame& frame);

struct FluctuationSample {
    double t = 0.0;
    Magnetization m;
    Eigen::Matrix3d sigma;
    double xi = 0.0;  ///< NaN when the principal direction is undefined
};

/// Co-integrates m (3 components) and the 6 independent Sigma entries.
[[nodiscard]] std::vector<FluctuationSample> evolve_covariance(
    const Magnetization& m0, const Eigen::Matrix3d& sigma0, const SystemParams& params,
    std::span<const double> times, const OdeTolerances& tol = meanfield_tolerances());

/// Sigma(t) = X Sigma0 X^T - int_0^t X_{t,u} s(u) A s(u) X_{t,u}^T du with the
/// time-ordered propagator X of G, accumulated on a uniform grid of
/// `intervals` (even) steps and integrated by composite Simpson.
[[nodiscard]] Eigen::Matrix3d covariance_by_propagator(const Magnetization& m0,
                                                       const Eigen::Matrix3d& sigma0,
                                                       const SystemParams& params, double t,
                                                       int intervals = 2000);

struct LandscapePoint {
    double omega_over_gamma = 0.0;
    double g = 0.0;
    double xi = 0.0;
    std::string error;  ///< empty on success
};

/// xi(t_eval) on the Cartesian grid omegas x gs (row-major: omega outer).
/// Per-point failures are recorded in LandscapePoint::error.
[[nodiscard]] std::vector<LandscapePoint> squeezing_landscape(std::span<const double> omegas,
                                                              std::span<const double> gs,
                                                              double t_eval = 100.0,
                                                              double gamma_total = 1.0,
                                                              unsigned threads = 0);

}  // namespace wgfb
