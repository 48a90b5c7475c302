#include "wgfb/lindblad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <lapacke.h>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "wgfb/errors.hpp"

namespace wgfb {

namespace {

constexpr Complex kI{0.0, 1.0};

CMatrix dissipator(const CMatrix& jump, const CMatrix& rho) {
    const CMatrix jdj = jump.adjoint() * jump;
    return jump * rho * jump.adjoint() - 0.5 * (jdj * rho + rho * jdj);
}

SparseCMatrix to_sparse(const CMatrix& m) {
    return m.sparseView(Complex(1.0, 0.0), 1e-300);
}

SparseCMatrix sparse_identity(int dim) {
    SparseCMatrix id(dim, dim);
    id.setIdentity();
    return id;
}

// Symmetrized products {J_a, J_b}/2 cached for repeated trace evaluation.
struct ObservableSet {
    int n_emitters = 0;
    std::array<CMatrix, 3> j;
    std::array<std::array<CMatrix, 3>, 3> sym;

    explicit ObservableSet(const SpinOperators& ops) : n_emitters(ops.n_emitters) {
        j = {ops.jx, ops.jy, ops.jz};
        for (int a = 0; a < 3; ++a) {
            for (int b = a; b < 3; ++b) {
                sym[a][b] = 0.5 * (j[a] * j[b] + j[b] * j[a]);
                sym[b][a] = sym[a][b];
            }
        }
    }

    [[nodiscard]] FiniteNSample operator()(const CMatrix& rho, double t) const {
        FiniteNSample s;
        s.t = t;
        Eigen::Vector3d mean_j;
        for (int a = 0; a < 3; ++a) {
            mean_j(a) = expectation(rho, j[a]).real();
        }
        for (int a = 0; a < 3; ++a) {
            for (int b = a; b < 3; ++b) {
                s.second_moments(a, b) = expectation(rho, sym[a][b]).real();
                s.second_moments(b, a) = s.second_moments(a, b);
            }
        }
        const double n = n_emitters;
        s.magnetization = mean_j / n;
        s.covariance = (s.second_moments - mean_j * mean_j.transpose()) / n;
        s.xi = squeezing_from_moments(mean_j, s.second_moments, n_emitters);
        return s;
    }
};

double max_abs_coeff(const SparseCMatrix& m) {
    double out = 0.0;
    for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
        for (SparseCMatrix::InnerIterator it(m, c); it; ++it) {
            out = std::max(out, std::abs(it.value()));
        }
    }
    return out;
}

int null_space_multiplicity(const SparseCMatrix& liouvillian, double rel_tol) {
    const CMatrix dense(liouvillian);
    Eigen::BDCSVD<CMatrix> svd(dense);
    const auto& sv = svd.singularValues();
    const double scale = sv.size() > 0 ? std::max(sv(0), 1.0) : 1.0;
    int count = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) <= rel_tol * scale) {
            ++count;
        }
    }
    return count;
}

}  // namespace

LindbladModel build_model(const SystemParams& params, int n_emitters) {
    params.validate();
    const SpinOperators ops = build_spin_operators(n_emitters);

    LindbladModel model;
    model.params = params;
    model.n_emitters = n_emitters;
    const double gamma = params.gamma_total / n_emitters;
    const double g = params.feedback_g;
    const double kappa = params.kappa();

    model.hamiltonian =
        2.0 * params.omega * ops.jx - (0.5 * g * gamma) * (ops.jx * ops.jy + ops.jy * ops.jx);
    const double amp = std::sqrt(0.5 * gamma);
    model.jump_right = amp * (kappa * ops.jx - kI * ops.jy);
    model.jump_left = amp * (ops.jx - kI * ops.jy);
    return model;
}

CMatrix apply_generator(const LindbladModel& model, const CMatrix& rho) {
    if (rho.rows() != model.dimension() || rho.cols() != model.dimension()) {
        throw InvalidParameter("apply_generator: density matrix has wrong dimension");
    }
    const CMatrix& h = model.hamiltonian;
    return -kI * (h * rho - rho * h) + dissipator(model.jump_right, rho) +
           dissipator(model.jump_left, rho);
}

SparseCMatrix build_liouvillian(const LindbladModel& model) {
    const int dim = model.dimension();
    const SparseCMatrix id = sparse_identity(dim);
    const SparseCMatrix h = to_sparse(model.hamiltonian);
    const SparseCMatrix h_t = SparseCMatrix(h.transpose());

    // vec(A X B) = (B^T kron A) vec(X) for column stacking.
    SparseCMatrix liouv = -kI * (Eigen::kroneckerProduct(id, h).eval() -
                                 Eigen::kroneckerProduct(h_t, id).eval());
    for (const CMatrix* jump_dense : {&model.jump_right, &model.jump_left}) {
        const SparseCMatrix jump = to_sparse(*jump_dense);
        const SparseCMatrix jump_conj = SparseCMatrix(jump.conjugate());
        const SparseCMatrix jdj = SparseCMatrix(jump.adjoint()) * jump;
        const SparseCMatrix jdj_t = SparseCMatrix(jdj.transpose());
        liouv += Eigen::kroneckerProduct(jump_conj, jump).eval();
        liouv -= 0.5 * Eigen::kroneckerProduct(id, jdj).eval();
        liouv -= 0.5 * Eigen::kroneckerProduct(jdj_t, id).eval();
    }
    liouv.prune(Complex(0.0, 0.0), 1e-300);
    liouv.makeCompressed();
    return liouv;
}

Eigen::VectorXcd vectorize(const CMatrix& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

CMatrix unvectorize(const Eigen::VectorXcd& v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
        throw InvalidParameter("unvectorize: length is not dim^2");
    }
    return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

Eigen::MatrixXd real_liouvillian(const LindbladModel& model, const SpectrumOptions& options) {
    if (model.n_emitters > options.max_emitters) {
        throw InvalidParameter("dense spectrum refused: N = " + std::to_string(model.n_emitters) +
                               " exceeds cap " + std::to_string(options.max_emitters));
    }
    const int dim = model.dimension();
    const Eigen::Index size = static_cast<Eigen::Index>(dim) * dim;
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

    // Columns are vec(B_k) for the orthonormal Hermitian basis B_k.
    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(2 * size);
    Eigen::Index col = 0;
    for (int k = 0; k < dim; ++k) {
        triplets.emplace_back(k + k * dim, col++, Complex(1.0, 0.0));
    }
    for (int k = 0; k < dim; ++k) {
        for (int l = k + 1; l < dim; ++l) {
            triplets.emplace_back(k + l * dim, col, Complex(inv_sqrt2, 0.0));
            triplets.emplace_back(l + k * dim, col, Complex(inv_sqrt2, 0.0));
            ++col;
            triplets.emplace_back(k + l * dim, col, Complex(0.0, inv_sqrt2));
            triplets.emplace_back(l + k * dim, col, Complex(0.0, -inv_sqrt2));
            ++col;
        }
    }
    SparseCMatrix basis(size, size);
    basis.setFromTriplets(triplets.begin(), triplets.end());

    const SparseCMatrix liouv = build_liouvillian(model);
    const SparseCMatrix rotated = SparseCMatrix(basis.adjoint()) * (liouv * basis);

    Eigen::MatrixXd real = Eigen::MatrixXd::Zero(size, size);
    double max_imag = 0.0;
    double max_abs = 0.0;
    for (Eigen::Index c = 0; c < rotated.outerSize(); ++c) {
        for (SparseCMatrix::InnerIterator it(rotated, c); it; ++it) {
            real(it.row(), it.col()) = it.value().real();
            max_imag = std::max(max_imag, std::abs(it.value().imag()));
            max_abs = std::max(max_abs, std::abs(it.value()));
        }
    }
    if (max_imag > 1e-12 * std::max(1.0, max_abs)) {
        throw ComputationError("Liouvillian is not Hermiticity preserving (imag residue " +
                               std::to_string(max_imag) + ")");
    }
    return real;
}

SpectrumResult spectral_gap(const LindbladModel& model, const SpectrumOptions& options) {
    Eigen::MatrixXd liouv = real_liouvillian(model, options);
    const auto size = static_cast<lapack_int>(liouv.rows());
    std::vector<double> wr(size), wi(size);
    const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', size, liouv.data(), size,
                                          wr.data(), wi.data(), nullptr, 1, nullptr, 1);
    if (info != 0) {
        throw ComputationError("dgeev failed with info " + std::to_string(info));
    }

    SpectrumResult result;
    result.eigenvalues.reserve(size);
    double max_re = 0.0;
    for (lapack_int i = 0; i < size; ++i) {
        result.eigenvalues.emplace_back(wr[i], wi[i]);
        max_re = std::max(max_re, std::abs(wr[i]));
        if (wr[i] > 1e-8) {
            throw ComputationError("Liouvillian eigenvalue with positive real part " +
                                   std::to_string(wr[i]));
        }
    }
    const double zero_tol = options.zero_tolerance * std::max(max_re, 1e-300);

    int zero_count = 0;
    double gap = std::numeric_limits<double>::infinity();
    double gap_frequency = 0.0;
    for (std::size_t i = 0; i < result.eigenvalues.size(); ++i) {
        const Complex lambda = result.eigenvalues[i];
        if (std::abs(lambda) <= zero_tol) {
            ++zero_count;
            result.zero_mode_index = i;
        } else if (std::abs(lambda.real()) < gap) {
            gap = std::abs(lambda.real());
            gap_frequency = std::abs(lambda.imag());
        }
    }
    if (zero_count != 1) {
        throw DegenerateSteadyState(zero_count);
    }
    result.gap = gap;
    result.gap_frequency = gap_frequency;
    return result;
}

Eigen::VectorXcd liouvillian_null_vector(const SparseCMatrix& liouvillian, int dim,
                                         double residual_tolerance) {
    const Eigen::Index size = static_cast<Eigen::Index>(dim) * dim;
    if (liouvillian.rows() != size || liouvillian.cols() != size) {
        throw InvalidParameter("liouvillian_null_vector: superoperator is not dim^2 square");
    }

    // Replace the balance equation for rho(0,0) by tr(rho) = 1. The rows of a
    // trace-preserving generator sum (over diagonal indices) to zero, so this
    // removes exactly the redundant equation when the null space is simple.
    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(liouvillian.nonZeros() + dim);
    for (Eigen::Index c = 0; c < liouvillian.outerSize(); ++c) {
        for (SparseCMatrix::InnerIterator it(liouvillian, c); it; ++it) {
            if (it.row() != 0) {
                triplets.emplace_back(it.row(), it.col(), it.value());
            }
        }
    }
    for (int k = 0; k < dim; ++k) {
        triplets.emplace_back(0, k + static_cast<Eigen::Index>(k) * dim, Complex(1.0, 0.0));
    }
    SparseCMatrix system(size, size);
    system.setFromTriplets(triplets.begin(), triplets.end());
    system.makeCompressed();

    Eigen::SparseLU<SparseCMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(system);
    Eigen::VectorXcd x;
    bool ok = lu.info() == Eigen::Success;
    if (ok) {
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(size);
        rhs(0) = 1.0;
        x = lu.solve(rhs);
        ok = lu.info() == Eigen::Success && x.allFinite();
    }
    const double liouv_scale = std::max(1.0, max_abs_coeff(liouvillian));
    if (ok) {
        ok = (liouvillian * x).norm() <= residual_tolerance * liouv_scale * std::max(1.0, x.norm());
    }
    if (!ok) {
        const int multiplicity =
            size <= 6561 ? null_space_multiplicity(liouvillian, 1e-10) : -1;
        if (multiplicity == 1) {
            throw ComputationError("steady-state solve failed to reach the residual tolerance");
        }
        throw DegenerateSteadyState(multiplicity);
    }
    return x;
}

DickeDensityMatrix steady_state(const LindbladModel& model, const SteadyStateOptions& options) {
    if (model.n_emitters > options.max_emitters) {
        throw InvalidParameter("steady state refused: N = " + std::to_string(model.n_emitters) +
                               " exceeds cap " + std::to_string(options.max_emitters));
    }
    const int dim = model.dimension();
    const SparseCMatrix liouv = build_liouvillian(model);
    const Eigen::VectorXcd x = liouvillian_null_vector(liouv, dim, options.residual_tolerance);

    CMatrix rho = unvectorize(x, dim);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();

    const double residual = (liouv * vectorize(rho)).norm();
    const double liouv_scale = std::max(1.0, max_abs_coeff(liouv));
    if (residual > options.residual_tolerance * liouv_scale) {
        throw ComputationError("steady-state residual " + std::to_string(residual) +
                               " above tolerance");
    }
    return {model.n_emitters, std::move(rho)};
}

FiniteNSample measure(const CMatrix& rho, const SpinOperators& ops, double t) {
    return ObservableSet(ops)(rho, t);
}

std::vector<FiniteNSample> evolve(const LindbladModel& model, const DickeDensityMatrix& rho0,
                                  std::span<const double> times, const EvolveOptions& options,
                                  CMatrix& final_rho) {
    if (rho0.n_emitters != model.n_emitters || rho0.rho.rows() != model.dimension() ||
        rho0.rho.cols() != model.dimension()) {
        throw InvalidParameter("evolve: initial state does not match the model size");
    }
    if (times.empty() || times.front() != 0.0) {
        throw InvalidParameter("evolve: time grid must start at 0");
    }
    if (!is_valid_density_matrix(rho0.rho)) {
        throw InvalidParameter("evolve: initial state is not a valid density matrix");
    }

    const ObservableSet observables(build_spin_operators(model.n_emitters));

    // rho' = -i (K rho - rho K^+) + sum_k L_k rho L_k^+ with
    // K = H - (i/2) sum_k L_k^+ L_k. For Hermitian rho, rho K^+ = (K rho)^+.
    CMatrix k_dense = model.hamiltonian;
    for (const CMatrix* jump : {&model.jump_right, &model.jump_left}) {
        k_dense -= 0.5 * kI * (jump->adjoint() * *jump);
    }
    const SparseCMatrix k_eff = to_sparse(k_dense);
    const SparseCMatrix l_right = to_sparse(model.jump_right);
    const SparseCMatrix l_left = to_sparse(model.jump_left);

    auto rhs = [&](double, const CMatrix& rho) -> CMatrix {
        const CMatrix k_rho = k_eff * rho;
        CMatrix out = -kI * k_rho + kI * k_rho.adjoint();
        for (const SparseCMatrix* jump : {&l_right, &l_left}) {
            const CMatrix l_rho = *jump * rho;
            out.noalias() += (*jump * l_rho.adjoint()).adjoint();
        }
        return out;
    };

    std::vector<FiniteNSample> samples;
    samples.reserve(times.size());
    auto observe = [&](std::size_t, double t, const CMatrix& rho) {
        samples.push_back(observables(rho, t));
    };

    if (options.hermitize) {
        integrate_adaptive(rhs, rho0.rho, times, options.tolerances, observe,
                           [&](CMatrix& rho) {
                               rho = 0.5 * (rho + rho.adjoint()).eval();
                               final_rho = rho;
                           });
    } else {
        integrate_adaptive(rhs, rho0.rho, times, options.tolerances,
                           [&](std::size_t i, double t, const CMatrix& rho) {
                               observe(i, t, rho);
                               final_rho = rho;
                           });
    }
    return samples;
}

std::vector<FiniteNSample> evolve(const LindbladModel& model, const DickeDensityMatrix& rho0,
                                  std::span<const double> times, const EvolveOptions& options) {
    CMatrix final_rho;
    return evolve(model, rho0, times, options, final_rho);
}

double squeezing_from_moments(const Eigen::Vector3d& mean_j, const Eigen::Matrix3d& second_moments,
                              int n_emitters, double in_plane_angle, double direction_tolerance) {
    const double length = mean_j.norm();
    if (!(length > direction_tolerance * n_emitters)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const Eigen::Vector3d n = mean_j / length;
    // Seed with the axis least aligned with n, then Gram-Schmidt.
    Eigen::Index seed_axis = 0;
    n.cwiseAbs().minCoeff(&seed_axis);
    Eigen::Vector3d seed = Eigen::Vector3d::Zero();
    seed(seed_axis) = 1.0;
    Eigen::Vector3d e1 = (seed - seed.dot(n) * n).normalized();
    Eigen::Vector3d e2 = n.cross(e1);
    const double c = std::cos(in_plane_angle);
    const double s = std::sin(in_plane_angle);
    const Eigen::Vector3d u = c * e1 + s * e2;
    const Eigen::Vector3d v = -s * e1 + c * e2;

    const Eigen::Matrix3d cov = second_moments - mean_j * mean_j.transpose();
    const double a = u.dot(cov * u);
    const double b = u.dot(cov * v);
    const double d = v.dot(cov * v);
    const double min_eig = 0.5 * (a + d) - std::hypot(0.5 * (a - d), b);
    // 2 min / (N j) with N j = |<J>|.
    return 2.0 * min_eig / length;
}

double finite_size_squeezing(const DickeDensityMatrix& state, double in_plane_angle) {
    const SpinOperators ops = build_spin_operators(state.n_emitters);
    const FiniteNSample s = measure(state.rho, ops);
    const Eigen::Vector3d mean_j = s.magnetization * state.n_emitters;
    if (!(mean_j.norm() > 1e-10 * state.n_emitters)) {
        throw UndefinedDirection("finite_size_squeezing: <J> vanishes, direction undefined");
    }
    return squeezing_from_moments(mean_j, s.second_moments, state.n_emitters, in_plane_angle);
}

std::vector<FiniteNSample> brute_force_oracle(const SystemParams& params, int n_emitters,
                                              std::span<const double> times) {
    if (n_emitters < 1 || n_emitters > 4) {
        throw InvalidParameter("brute_force_oracle supports 1 <= N <= 4, got " +
                               std::to_string(n_emitters));
    }
    params.validate();
    if (times.empty() || times.front() != 0.0) {
        throw InvalidParameter("brute_force_oracle: time grid must start at 0");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw InvalidParameter("brute_force_oracle: times must be increasing");
        }
    }

    // Single-site Pauli matrices in the (|e>, |g>) basis.
    CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, -kI, kI, 0;
    sz << 1, 0, 0, -1;
    const int hilbert = 1 << n_emitters;

    auto site_operator = [&](const CMatrix& pauli, int site) {
        CMatrix out = CMatrix::Identity(1, 1);
        for (int k = 0; k < n_emitters; ++k) {
            const CMatrix factor = k == site ? pauli : CMatrix::Identity(2, 2);
            out = Eigen::kroneckerProduct(out, factor).eval();
        }
        return out;
    };
    std::array<CMatrix, 3> j;
    for (auto& m : j) {
        m = CMatrix::Zero(hilbert, hilbert);
    }
    for (int k = 0; k < n_emitters; ++k) {
        j[0] += 0.5 * site_operator(sx, k);
        j[1] += 0.5 * site_operator(sy, k);
        j[2] += 0.5 * site_operator(sz, k);
    }

    const double gamma = params.gamma_total / n_emitters;
    const CMatrix h = 2.0 * params.omega * j[0] -
                      (0.5 * params.feedback_g * gamma) * (j[0] * j[1] + j[1] * j[0]);
    const std::array<CMatrix, 2> jumps = {
        std::sqrt(0.5 * gamma) * (params.kappa() * j[0] - kI * j[1]),
        std::sqrt(0.5 * gamma) * (j[0] - kI * j[1])};

    const CMatrix id = CMatrix::Identity(hilbert, hilbert);
    CMatrix liouv = -kI * (Eigen::kroneckerProduct(id, h).eval() -
                           Eigen::kroneckerProduct(h.transpose(), id).eval());
    for (const auto& l : jumps) {
        const CMatrix ldl = l.adjoint() * l;
        liouv += Eigen::kroneckerProduct(l.conjugate(), l).eval();
        liouv -= 0.5 * Eigen::kroneckerProduct(id, ldl).eval();
        liouv -= 0.5 * Eigen::kroneckerProduct(ldl.transpose(), id).eval();
    }

    std::array<std::array<CMatrix, 3>, 3> sym;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            sym[a][b] = 0.5 * (j[a] * j[b] + j[b] * j[a]);
        }
    }

    Eigen::VectorXcd state = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(hilbert) * hilbert);
    state((hilbert - 1) + static_cast<Eigen::Index>(hilbert - 1) * hilbert) = 1.0;

    std::vector<FiniteNSample> samples;
    samples.reserve(times.size());
    CMatrix propagator;
    double propagator_dt = -1.0;
    double previous = 0.0;
    for (const double t : times) {
        const double dt = t - previous;
        if (dt > 0.0) {
            if (std::abs(dt - propagator_dt) > 1e-13 * dt) {
                propagator = (liouv * dt).exp();
                propagator_dt = dt;
            }
            state = propagator * state;
        }
        previous = t;

        const CMatrix rho = Eigen::Map<const CMatrix>(state.data(), hilbert, hilbert);
        FiniteNSample s;
        s.t = t;
        Eigen::Vector3d mean_j;
        for (int a = 0; a < 3; ++a) {
            mean_j(a) = (rho * j[a]).trace().real();
            for (int b = 0; b < 3; ++b) {
                s.second_moments(a, b) = (rho * sym[a][b]).trace().real();
            }
        }
        s.magnetization = mean_j / n_emitters;
        s.covariance = (s.second_moments - mean_j * mean_j.transpose()) / n_emitters;
        s.xi = squeezing_from_moments(mean_j, s.second_moments, n_emitters);
        samples.push_back(s);
    }
    return samples;
}

}  // namespace wgfb
