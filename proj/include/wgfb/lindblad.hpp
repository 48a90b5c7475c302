#pragma once

// Finite-N feedback master equation on the Dicke ladder:
//
//   d rho/dt = -i [H, rho] + D(L_R) rho + D(L_L) rho
//   H   = 2 Omega Jx - (g gamma / 2) {Jx, Jy}
//   L_R = sqrt(gamma/2) (kappa Jx - i Jy),   L_L = sqrt(gamma/2) (Jx - i Jy)
//
// with gamma = Gamma / N and D(L) rho = L rho L^+ - {L^+ L, rho} / 2.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "wgfb/collective_spin.hpp"
#include "wgfb/ode.hpp"
#include "wgfb/params.hpp"

namespace wgfb {

using SparseCMatrix = Eigen::SparseMatrix<Complex>;

struct LindbladModel {
    SystemParams params;
    int n_emitters = 0;
    CMatrix hamiltonian;
    CMatrix jump_right;
    CMatrix jump_left;

    [[nodiscard]] int dimension() const noexcept { return n_emitters + 1; }
    /// Single-emitter rate gamma = Gamma / N.
    [[nodiscard]] double single_emitter_rate() const noexcept {
        return params.gamma_total / n_emitters;
    }
};

[[nodiscard]] LindbladModel build_model(const SystemParams& params, int n_emitters);

/// Right-hand side of the master equation, evaluated term by term from the
/// commutator and dissipator definitions.
[[nodiscard]] CMatrix apply_generator(const LindbladModel& model, const CMatrix& rho);

/// Sparse superoperator acting on column-stacked vec(rho), i.e.
/// vec(rho)[i + j * dim] = rho(i, j).
[[nodiscard]] SparseCMatrix build_liouvillian(const LindbladModel& model);

[[nodiscard]] Eigen::VectorXcd vectorize(const CMatrix& rho);
[[nodiscard]] CMatrix unvectorize(const Eigen::VectorXcd& v, int dim);

struct SpectrumOptions {
    int max_emitters = 80;         ///< dense-eigensolver memory guard
    double zero_tolerance = 1e-8;  ///< relative to max |Re lambda|
};

/// Dense real representation of the Liouvillian in the orthonormal
/// Hermitian basis {E_kk, (E_kl + E_lk)/sqrt2, i(E_kl - E_lk)/sqrt2}.
/// Its spectrum equals that of build_liouvillian(). Guarded by max_emitters.
[[nodiscard]] Eigen::MatrixXd real_liouvillian(const LindbladModel& model,
                                               const SpectrumOptions& options = {});

struct SpectrumResult {
    std::vector<Complex> eigenvalues;
    std::size_t zero_mode_index = 0;
    double gap = 0.0;  ///< min |Re lambda| over non-zero modes
    /// Imaginary part of the slowest mode: oscillation frequency in the
    /// time-crystal phase, zero for a purely relaxational gap.
    double gap_frequency = 0.0;
};

/// Full Liouvillian spectrum and spectral gap. Throws ComputationError when
/// the zero mode is not unique or a real part exceeds +1e-8.
[[nodiscard]] SpectrumResult spectral_gap(const LindbladModel& model,
                                          const SpectrumOptions& options = {});

struct SteadyStateOptions {
    int max_emitters = 400;
    double residual_tolerance = 1e-10;
};

/// Null vector of the Liouvillian (sparse LU with the trace condition
/// replacing one balance equation), Hermitized and trace-normalized.
/// Throws DegenerateSteadyState if the null space is not one-dimensional.
[[nodiscard]] DickeDensityMatrix steady_state(const LindbladModel& model,
                                              const SteadyStateOptions& options = {});

/// Lower-level null-vector solver on an explicit superoperator, exposed so
/// the degenerate path can be exercised directly.
[[nodiscard]] Eigen::VectorXcd liouvillian_null_vector(const SparseCMatrix& liouvillian, int dim,
                                                       double residual_tolerance = 1e-10);

/// Observables recorded along finite-N trajectories.
struct FiniteNSample {
    double t = 0.0;
    Eigen::Vector3d magnetization;    ///< <J_alpha> / N
    Eigen::Matrix3d second_moments;   ///< <{J_alpha, J_beta}> / 2
    Eigen::Matrix3d covariance;       ///< (second_moments - <J><J>^T) / N
    double xi = 0.0;                  ///< finite-size squeezing, NaN if direction undefined
};

[[nodiscard]] FiniteNSample measure(const CMatrix& rho, const SpinOperators& ops, double t = 0.0);

struct EvolveOptions {
    OdeTolerances tolerances{};
    bool hermitize = true;
};

/// Integrates rho(t) as a matrix ODE from rho0 over `times` (times[0] = 0).
[[nodiscard]] std::vector<FiniteNSample> evolve(const LindbladModel& model,
                                                const DickeDensityMatrix& rho0,
                                                std::span<const double> times,
                                                const EvolveOptions& options = {});

/// Same as evolve() but also returns the final density matrix.
[[nodiscard]] std::vector<FiniteNSample> evolve(const LindbladModel& model,
                                                const DickeDensityMatrix& rho0,
                                                std::span<const double> times,
                                                const EvolveOptions& options,
                                                CMatrix& final_rho);

/// xi_N = 2 min(Delta^2 J_perp) / (N j) with j = |<J>| / N.
/// `in_plane_angle` rotates the orthonormal pair spanning the plane normal to
/// <J>; the result does not depend on it.
[[nodiscard]] double squeezing_from_moments(const Eigen::Vector3d& mean_j,
                                            const Eigen::Matrix3d& second_moments, int n_emitters,
                                            double in_plane_angle = 0.0,
                                            double direction_tolerance = 1e-10);

[[nodiscard]] double finite_size_squeezing(const DickeDensityMatrix& state,
                                           double in_plane_angle = 0.0);

/// Full 2^N tensor-product evolution from the all-ground product state,
/// propagated with the matrix exponential of the 4^N-dimensional generator.
/// Independent of the Dicke-basis operators and of the adaptive integrator.
/// Refuses N > 4.
[[nodiscard]] std::vector<FiniteNSample> brute_force_oracle(const SystemParams& params,
                                                            int n_emitters,
                                                            std::span<const double> times);

}  // namespace wgfb
