#include "wgfb/collective_spin.hpp"

#include <cmath>
#include <string>

#include "wgfb/errors.hpp"

namespace wgfb {

namespace {

void require_emitters(int n_emitters) {
    if (n_emitters < 1) {
        throw InvalidParameter("n_emitters must be a positive integer, got " +
                               std::to_string(n_emitters));
    }
}

}  // namespace

SpinOperators build_spin_operators(int n_emitters) {
    require_emitters(n_emitters);
    const int dim = n_emitters + 1;
    const double j = 0.5 * n_emitters;

    SpinOperators ops;
    ops.n_emitters = n_emitters;
    ops.jz = CMatrix::Zero(dim, dim);
    ops.j_minus = CMatrix::Zero(dim, dim);
    for (int row = 0; row < dim; ++row) {
        const double m = j - row;
        ops.jz(row, row) = m;
        // <j, m-1| J- |j, m> = sqrt(j(j+1) - m(m-1)); |j, m-1> sits one row below.
        if (row + 1 < dim) {
            ops.j_minus(row + 1, row) = std::sqrt(j * (j + 1.0) - m * (m - 1.0));
        }
    }
    const CMatrix j_plus = ops.j_minus.adjoint();
    ops.jx = 0.5 * (j_plus + ops.j_minus);
    ops.jy = Complex(0.0, -0.5) * (j_plus - ops.j_minus);
    return ops;
}

DickeDensityMatrix ground_state(int n_emitters) {
    require_emitters(n_emitters);
    DickeDensityMatrix state;
    state.n_emitters = n_emitters;
    state.rho = CMatrix::Zero(n_emitters + 1, n_emitters + 1);
    state.rho(n_emitters, n_emitters) = 1.0;
    return state;
}

Complex expectation(const CMatrix& rho, const CMatrix& op) {
    if (rho.rows() != op.rows() || rho.cols() != op.cols() || rho.rows() != rho.cols()) {
        throw InvalidParameter("expectation: dimension mismatch (" + std::to_string(rho.rows()) +
                               "x" + std::to_string(rho.cols()) + " vs " +
                               std::to_string(op.rows()) + "x" + std::to_string(op.cols()) + ")");
    }
    // tr(rho op) without forming the product.
    return (rho.transpose().array() * op.array()).sum();
}

Complex expectation(const DickeDensityMatrix& state, const CMatrix& op) {
    return expectation(state.rho, op);
}

bool is_valid_density_matrix(const CMatrix& rho, double trace_tol, double positivity_tol) {
    if (rho.rows() != rho.cols() || rho.rows() == 0) {
        return false;
    }
    const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        return false;
    }
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > trace_tol) {
        return false;
    }
    const CMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() >= -positivity_tol;
}

}  // namespace wgfb
