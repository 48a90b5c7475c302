#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "test_helpers.hpp"
#include "wgfb/errors.hpp"
#include "wgfb/lindblad.hpp"
#include "wgfb/meanfield.hpp"

using namespace wgfb;
using wgfb::test::max_abs;

namespace {

const SystemParams kParamSets[] = {
    {0.3, 1.0, 0.5}, {0.75, 1.0, 0.5}, {0.3, 1.0, -0.5}, {0.2, 2.0, -1.5}, {0.0, 1.0, 0.0}, {1.1, 0.7, 0.9},
};

Eigen::VectorXcd eigenvalues_of(const Eigen::MatrixXcd& m) {
    return Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(m, false).eigenvalues();
}

}  // namespace

TEST_CASE("model construction") {
    const LindbladModel m = build_model({0.4, 1.0, 0.5}, 6);
    CHECK(max_abs(m.hamiltonian - m.hamiltonian.adjoint()) <= 1e-12);

    SUBCASE("kappa = 0 leaves only the -i Jy part of the right jump") {
        const LindbladModel z = build_model({0.3, 1.0, -0.5}, 5);
        const SpinOperators ops = build_spin_operators(5);
        const double gamma = 1.0 / 5;
        CHECK(max_abs(z.jump_right - std::sqrt(gamma / 2) * (Complex(0, -1) * ops.jy)) < 1e-14);
    }
    SUBCASE("g = 0 gives two identical lowering channels at gamma/2") {
        const LindbladModel z = build_model({0.3, 1.0, 0.0}, 4);
        const SpinOperators ops = build_spin_operators(4);
        const double gamma = 1.0 / 4;
        CHECK(max_abs(z.jump_right - std::sqrt(gamma / 2) * ops.j_minus) < 1e-14);
        CHECK(max_abs(z.jump_left - std::sqrt(gamma / 2) * ops.j_minus) < 1e-14);
        CHECK(max_abs(z.hamiltonian - 2.0 * 0.3 * ops.jx) < 1e-14);
    }
    SUBCASE("N = 2 uses gamma = Gamma / 2") {
        const LindbladModel z = build_model({0.3, 1.0, 0.0}, 2);
        CHECK(z.single_emitter_rate() == doctest::Approx(0.5));
        const SpinOperators ops = build_spin_operators(2);
        CHECK(max_abs(z.jump_left - std::sqrt(0.25) * ops.j_minus) < 1e-14);
    }
    CHECK_THROWS_AS((void)build_model({0.3, -1.0, 0.0}, 2), InvalidParameter);
    CHECK_THROWS_AS((void)build_model({0.3, 1.0, 0.0}, 0), InvalidParameter);
}

TEST_CASE("superoperator matches direct evaluation") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    for (const SystemParams& p : kParamSets) {
        for (int n : {1, 2, 5, 12}) {
            const LindbladModel model = build_model(p, n);
            const SparseCMatrix l = build_liouvillian(model);
            CMatrix x(n + 1, n + 1);
            for (int i = 0; i <= n; ++i) {
                for (int j = 0; j <= n; ++j) {
                    x(i, j) = Complex(normal(rng), normal(rng));
                }
            }
            const Eigen::VectorXcd lhs = l * vectorize(x);
            const Eigen::VectorXcd rhs = vectorize(apply_generator(model, x));
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("vectorization is column stacking") {
    CMatrix x(2, 2);
    x << 1.0, 2.0, 3.0, 4.0;
    const Eigen::VectorXcd v = vectorize(x);
    CHECK(v(1).real() == 3.0);
    CHECK(v(2).real() == 2.0);
    CHECK(max_abs(unvectorize(v, 2) - x) == 0.0);
    CHECK_THROWS_AS((void)unvectorize(v, 3), InvalidParameter);
}

TEST_CASE("trace preservation: vec(I) is a left null vector") {
    for (const SystemParams& p : kParamSets) {
        const int n = 7;
        const Eigen::VectorXcd id = vectorize(CMatrix::Identity(n + 1, n + 1));
        const SparseCMatrix l = build_liouvillian(build_model(p, n));
        const Eigen::RowVectorXcd left = id.adjoint() * l;
        CHECK(left.cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("single decaying emitter has gap gamma/2") {
    const SpectrumResult s = spectral_gap(build_model({0.0, 1.0, 0.0}, 1));
    CHECK(s.gap == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.eigenvalues.size() == 4);
}

TEST_CASE("real-basis spectrum equals the complex superoperator spectrum") {
    for (const SystemParams& p : kParamSets) {
        const LindbladModel model = build_model(p, 4);
        const Eigen::VectorXcd a = eigenvalues_of(Eigen::MatrixXcd(build_liouvillian(model)));
        const Eigen::VectorXcd b = eigenvalues_of(real_liouvillian(model).cast<Complex>());
        REQUIRE(a.size() == b.size());
        double worst = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            worst = std::max(worst, (b.array() - a(i)).abs().minCoeff());
        }
        // Degenerate, non-normal spectra: eigenvalues only determined to ~sqrt(eps).
        CHECK(worst <= 1e-7);
    }
}

TEST_CASE("spectrum properties") {
    for (const SystemParams& p : kParamSets) {
        if (p.omega == 0.0 && p.feedback_g == 0.0) {
            continue;
        }
        const SpectrumResult s = spectral_gap(build_model(p, 8));
        double max_re = -1.0;
        int zeros = 0;
        for (const Complex& z : s.eigenvalues) {
            max_re = std::max(max_re, z.real());
            zeros += std::abs(z) <= 1e-8 ? 1 : 0;
        }
        CHECK(max_re <= 1e-8);
        CHECK(zeros == 1);
        CHECK(s.gap > 0.0);
    }
    CHECK_THROWS_AS((void)spectral_gap(build_model({0.3, 1.0, 0.5}, 90)), InvalidParameter);
}

TEST_CASE("steady state") {
    SUBCASE("undriven ensemble relaxes to the ground state") {
        const DickeDensityMatrix ss = steady_state(build_model({0.0, 1.0, 0.0}, 6));
        CHECK(max_abs(ss.rho - ground_state(6).rho) <= 1e-10);
    }
    SUBCASE("null vector, positivity, mean-field neighbourhood") {
        const LindbladModel model = build_model({0.3, 1.0, 0.5}, 50);
        const DickeDensityMatrix ss = steady_state(model);
        const Eigen::VectorXcd r = build_liouvillian(model) * vectorize(ss.rho);
        CHECK(r.cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(is_valid_density_matrix(ss.rho, 1e-10, 1e-9));
        const SpinOperators ops = build_spin_operators(50);
        CHECK(std::abs(expectation(ss, ops.jz).real() / 50 + 0.4) <= 0.05);
    }
    SUBCASE("degenerate null space is reported with its multiplicity") {
        const SparseCMatrix zero(9, 9);
        try {
            (void)liouvillian_null_vector(zero, 3);
            FAIL("expected DegenerateSteadyState");
        } catch (const DegenerateSteadyState& e) {
            CHECK(e.multiplicity() == 9);
        }
    }
    CHECK_THROWS_AS((void)steady_state(build_model({0.3, 1.0, 0.5}, 500)), InvalidParameter);
}

TEST_CASE("stationary magnetization approaches the mean field from above") {
    double previous = -1.0;
    for (int n : {25, 50, 100}) {
        const DickeDensityMatrix ss = steady_state(build_model({0.3, 1.0, 0.5}, n));
        const double mz = measure(ss.rho, build_spin_operators(n)).magnetization.z();
        CAPTURE(n);
        CHECK(mz > -0.4);
        CHECK(previous < 0.0);
        CHECK(std::abs(mz + 0.4) < std::abs(previous + 0.4));
        previous = mz;
    }
}

TEST_CASE("evolution") {
    SUBCASE("dark ground state stays put") {
        const auto times = uniform_times(10.0, 1.0);
        const auto traj = evolve(build_model({0.0, 1.0, 0.0}, 5), ground_state(5), times);
        for (const auto& s : traj) {
            CHECK(std::abs(s.magnetization.z() + 0.5) < 1e-12);
            CHECK(s.magnetization.head<2>().norm() < 1e-12);
        }
    }
    SUBCASE("trace, Hermiticity and positivity along a trajectory") {
        const LindbladModel model = build_model({0.75, 1.0, 0.5}, 10);
        const auto times = uniform_times(20.0, 0.5);
        for (double t_end : {5.0, 20.0}) {
            CMatrix rho;
            const std::vector<double> grid = uniform_times(t_end, 0.5);
            (void)evolve(model, ground_state(10), grid, {}, rho);
            CHECK(std::abs(rho.trace() - 1.0) <= 1e-8);
            CHECK(max_abs(rho - rho.adjoint()) <= 1e-8);
            const double lmin = Eigen::SelfAdjointEigenSolver<CMatrix>(rho).eigenvalues().minCoeff();
            CHECK(lmin >= -1e-7);
        }
    }
    SUBCASE("damped oscillations in the time-crystal phase") {
        const auto times = uniform_times(60.0, 0.1);
        const auto traj = evolve(build_model({0.75, 1.0, 0.5}, 50), ground_state(50), times);
        const int maxima =
            test::count_local_maxima(traj, [](const FiniteNSample& s) { return s.magnetization.z(); });
        CHECK(maxima >= 3);
        auto range = [&](double a, double b) {
            double lo = 1.0, hi = -1.0;
            for (const auto& s : traj) {
                if (s.t >= a && s.t <= b) {
                    lo = std::min(lo, s.magnetization.z());
                    hi = std::max(hi, s.magnetization.z());
                }
            }
            return hi - lo;
        };
        CHECK(range(40.0, 60.0) < range(0.0, 20.0));
        CHECK(range(40.0, 60.0) > 1e-3);
    }
    CHECK_THROWS_AS((void)evolve(build_model({0.3, 1.0, 0.5}, 3), ground_state(4), uniform_times(1, 0.5)),
                    InvalidParameter);
}

TEST_CASE("finite-size squeezing") {
    for (int n : {1, 4, 30}) {
        CHECK(finite_size_squeezing(ground_state(n)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    const DickeDensityMatrix ss = steady_state(build_model({0.3, 1.0, 0.5}, 100));
    const double xi = finite_size_squeezing(ss);
    CHECK(xi < 1.0);
    for (double angle : {0.3, 1.1, 2.0, -2.5}) {
        CHECK(std::abs(finite_size_squeezing(ss, angle) - xi) <= 1e-12);
    }
    const DickeDensityMatrix mixed{2, CMatrix::Identity(3, 3) / 3.0};
    CHECK_THROWS_AS((void)finite_size_squeezing(mixed), UndefinedDirection);
}

TEST_CASE("tensor-product oracle agrees with the Dicke engine") {
    const auto times = uniform_times(20.0, 0.25);
    SUBCASE("N = 1 has identical dimension") {
        const SystemParams p{0.4, 1.0, 0.5};
        const auto a = evolve(build_model(p, 1), ground_state(1), times);
        const auto b = brute_force_oracle(p, 1, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            CHECK((a[k].magnetization - b[k].magnetization).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
    SUBCASE("N = 2, g = 1/2, Omega = 0.4") {
        const SystemParams p{0.4, 1.0, 0.5};
        const auto a = evolve(build_model(p, 2), ground_state(2), times);
        const auto b = brute_force_oracle(p, 2, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            CHECK(std::abs(a[k].magnetization.z() - b[k].magnetization.z()) <= 1e-8);
        }
    }
    SUBCASE("N = 3, g = -1/2, Omega = 0.3") {
        const SystemParams p{0.3, 1.0, -0.5};
        const auto a = evolve(build_model(p, 3), ground_state(3), times);
        const auto b = brute_force_oracle(p, 3, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            CHECK((a[k].magnetization - b[k].magnetization).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
    CHECK_THROWS_AS((void)brute_force_oracle({0.3, 1.0, 0.5}, 5, times), InvalidParameter);
}
