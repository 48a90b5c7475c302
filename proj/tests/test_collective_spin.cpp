#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"
#include "wgfb/collective_spin.hpp"
#include "wgfb/errors.hpp"

using namespace wgfb;
using wgfb::test::max_abs;

TEST_CASE("N=1 operators are half the Pauli matrices") {
    const SpinOperators ops = build_spin_operators(1);
    CHECK(ops.dimension() == 2);
    CHECK(ops.jz(0, 0).real() == doctest::Approx(0.5));
    CHECK(ops.jz(1, 1).real() == doctest::Approx(-0.5));
    CHECK(std::abs(ops.jx(0, 1) - 0.5) < 1e-15);
    CHECK(std::abs(ops.jx(1, 0) - 0.5) < 1e-15);
    CHECK(std::abs(ops.jx(0, 0)) < 1e-15);
}

TEST_CASE("N=2 operators are spin-1 matrices") {
    const SpinOperators ops = build_spin_operators(2);
    CMatrix jz_expected = CMatrix::Zero(3, 3);
    jz_expected.diagonal() << 1.0, 0.0, -1.0;
    CHECK(max_abs(ops.jz - jz_expected) < 1e-15);
    CHECK(std::abs(ops.j_minus(1, 0) - std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(ops.j_minus(2, 1) - std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(ops.j_minus(0, 1)) == 0.0);
}

TEST_CASE("Casimir equals j(j+1) for N=4") {
    const SpinOperators ops = build_spin_operators(4);
    const CMatrix c = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
    CHECK(max_abs(c - 6.0 * CMatrix::Identity(5, 5)) < 1e-12);
}

TEST_CASE("commutation relations and Casimir up to N=200") {
    const Complex i(0.0, 1.0);
    for (int n : {1, 2, 3, 7, 20, 64, 101, 200}) {
        CAPTURE(n);
        const SpinOperators ops = build_spin_operators(n);
        const double j = ops.spin_length();
        const CMatrix xy = ops.jx * ops.jy - ops.jy * ops.jx - i * ops.jz;
        const CMatrix yz = ops.jy * ops.jz - ops.jz * ops.jy - i * ops.jx;
        const CMatrix zx = ops.jz * ops.jx - ops.jx * ops.jz - i * ops.jy;
        CHECK(xy.norm() <= 1e-12 * ops.jz.norm());
        CHECK(yz.norm() <= 1e-12 * ops.jx.norm());
        CHECK(zx.norm() <= 1e-12 * ops.jy.norm());
        const CMatrix casimir = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
        CHECK((casimir - j * (j + 1) * CMatrix::Identity(n + 1, n + 1)).norm() <= 1e-10);
        CHECK(max_abs(ops.jx - ops.jx.adjoint()) < 1e-14);
        CHECK(max_abs(ops.jy - ops.jy.adjoint()) < 1e-14);
    }
}

TEST_CASE("ground state is the lowest ladder state") {
    CMatrix two = CMatrix::Zero(3, 3);
    two(2, 2) = 1.0;
    CHECK(max_abs(ground_state(2).rho - two) == 0.0);
    CMatrix one = CMatrix::Zero(2, 2);
    one(1, 1) = 1.0;
    CHECK(max_abs(ground_state(1).rho - one) == 0.0);
    for (int n : {1, 5, 40}) {
        const SpinOperators ops = build_spin_operators(n);
        CHECK(expectation(ground_state(n), ops.jz).real() == doctest::Approx(-0.5 * n));
    }
}

TEST_CASE("expectation values in the N=4 ground state") {
    const SpinOperators ops = build_spin_operators(4);
    const DickeDensityMatrix g = ground_state(4);
    CHECK(expectation(g, ops.jz).real() == doctest::Approx(-2.0));
    CHECK(std::abs(expectation(g, ops.jx)) < 1e-15);
    const Complex jx2 = expectation(g, ops.jx * ops.jx);
    CHECK(jx2.real() == doctest::Approx(1.0));
    CHECK(std::abs(jx2.imag()) <= 1e-10);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS((void)build_spin_operators(0), InvalidParameter);
    CHECK_THROWS_AS((void)build_spin_operators(-3), InvalidParameter);
    const SpinOperators ops = build_spin_operators(3);
    CHECK_THROWS_AS((void)expectation(ground_state(2), ops.jz), InvalidParameter);
}

TEST_CASE("density matrix validity") {
    std::mt19937_64 rng(7);
    CHECK(is_valid_density_matrix(test::random_density_matrix(6, rng)));
    CMatrix bad = CMatrix::Zero(2, 2);
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    CHECK_FALSE(is_valid_density_matrix(bad));
    CMatrix not_hermitian = CMatrix::Identity(2, 2) / 2.0;
    not_hermitian(0, 1) = 0.1;
    CHECK_FALSE(is_valid_density_matrix(not_hermitian));
    CHECK_FALSE(is_valid_density_matrix(CMatrix::Identity(2, 2)));
}
