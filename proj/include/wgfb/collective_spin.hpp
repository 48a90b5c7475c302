#pragma once

// Collective spin operators on the maximal-spin Dicke sector j = N/2.
//
// Basis ordering is |j, m> with m = +j, j-1, ..., -j: row 0 is the fully
// excited state and row N the fully ground state. Every module shares it.

#include <complex>

#include <Eigen/Dense>

namespace wgfb {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

struct SpinOperators {
    int n_emitters = 0;
    CMatrix jx;
    CMatrix jy;
    CMatrix jz;
    CMatrix j_minus;  ///< lowering operator jx - i jy

    [[nodiscard]] int dimension() const noexcept { return n_emitters + 1; }
    [[nodiscard]] double spin_length() const noexcept { return 0.5 * n_emitters; }
};

/// Density matrix restricted to the j = N/2 sector.
struct DickeDensityMatrix {
    int n_emitters = 0;
    CMatrix rho;
};

/// Throws InvalidParameter for n_emitters < 1.
[[nodiscard]] SpinOperators build_spin_operators(int n_emitters);

/// |j, -j><j, -j|, every emitter in its ground state.
[[nodiscard]] DickeDensityMatrix ground_state(int n_emitters);

/// tr(rho * op). Throws InvalidParameter on a dimension mismatch.
[[nodiscard]] Complex expectation(const DickeDensityMatrix& state, const CMatrix& op);
[[nodiscard]] Complex expectation(const CMatrix& rho, const CMatrix& op);

/// Trace, Hermiticity and positivity check with the standard tolerances
/// (|tr - 1| <= 1e-10, eigenvalues >= -1e-9).
[[nodiscard]] bool is_valid_density_matrix(const CMatrix& rho, double trace_tol = 1e-10,
                                           double positivity_tol = 1e-9);

}  // namespace wgfb
