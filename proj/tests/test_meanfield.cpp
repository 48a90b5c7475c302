#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "test_helpers.hpp"
#include "wgfb/errors.hpp"
#include "wgfb/meanfield.hpp"

using namespace wgfb;

namespace {

double eq6(double omega, double gamma, double kappa) {
    const double r = 2.0 * omega / (gamma * kappa);
    return -(kappa > 0 ? 1.0 : -1.0) * std::sqrt(0.25 - r * r);
}

}  // namespace

TEST_CASE("equations of motion: hand-evaluated values") {
    const Magnetization d = mf_rhs(ground_magnetization(), {0.3, 1.0, 0.5});
    CHECK(std::abs(d.x()) < 1e-15);
    CHECK(d.y() == doctest::Approx(0.3));
    CHECK(std::abs(d.z()) < 1e-15);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const SystemParams p{std::abs(u(rng)), 1.0 + u(rng) * 0.5, 2.0 * u(rng)};
        CHECK(mf_rhs({0.0, 0.5 * u(rng), 0.5 * u(rng)}, p).x() == 0.0);
    }

    const double a = 0.2, b = -0.3, omega = 0.4;
    const Magnetization h = mf_rhs({0.0, a, b}, {omega, 1.0, -0.5});
    CHECK(std::abs(h.x()) < 1e-15);
    CHECK(h.y() == doctest::Approx(-2.0 * omega * b));
    CHECK(h.z() == doctest::Approx(2.0 * omega * a));
}

TEST_CASE("analytic Jacobian matches finite differences") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 20; ++k) {
        const SystemParams p{std::abs(u(rng)) * 2.0, 0.5 + std::abs(u(rng)), 3.0 * u(rng)};
        const Magnetization m(u(rng), u(rng), u(rng));
        const Eigen::Matrix3d j = mf_jacobian(m, p);
        const double h = 1e-6;
        for (int c = 0; c < 3; ++c) {
            Magnetization e = Magnetization::Zero();
            e(c) = h;
            const Magnetization col = (mf_rhs(m + e, p) - mf_rhs(m - e, p)) / (2 * h);
            CHECK((col - j.col(c)).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("kappa = 0 is a harmonic oscillator at frequency 2 Omega") {
    const double omega = 0.37;
    const auto times = uniform_times(50.0, 0.05);
    const auto traj = integrate(ground_magnetization(), {omega, 1.0, -0.5}, times);
    for (const auto& s : traj) {
        CHECK(std::abs(s.m.z() + 0.5 * std::cos(2.0 * omega * s.t)) <= 1e-7);
    }
}

TEST_CASE("stationary value from the ground state") {
    const std::vector<double> times{0.0, 200.0};
    const auto traj = integrate(ground_magnetization(), {0.3, 1.0, 0.5}, times);
    CHECK(std::abs(traj.back().m.z() - eq6(0.3, 1.0, 2.0)) < 1e-4);
}

TEST_CASE("undamped oscillations inside the time-crystal phase") {
    const auto times = uniform_times(200.0, 0.05);
    const auto traj = integrate(ground_magnetization(), {0.75, 1.0, 0.5}, times);
    auto peak_to_peak = [&](double a, double b) {
        double lo = 1.0, hi = -1.0;
        for (const auto& s : traj) {
            if (s.t >= a && s.t <= b) {
                lo = std::min(lo, s.m.z());
                hi = std::max(hi, s.m.z());
            }
        }
        return hi - lo;
    };
    const double early = peak_to_peak(0.0, 50.0);
    const double late = peak_to_peak(150.0, 200.0);
    CHECK(early > 0.1);
    CHECK(std::abs(late - early) <= 1e-3 * early);
}

TEST_CASE("norm and constant of motion are conserved") {
    const auto times = uniform_times(500.0, 0.25);
    const SystemParams cases[] = {{0.3, 1.0, 0.5}, {0.75, 1.0, 0.5}, {0.3, 1.0, -0.5},
                                  {0.2, 1.0, -1.5}, {0.9, 1.3, 0.2}};
    for (const SystemParams& p : cases) {
        const auto traj = integrate(ground_magnetization(), p, times);
        double worst_norm = 0.0, worst_c = 0.0;
        for (const auto& s : traj) {
            worst_norm = std::max(worst_norm, std::abs(s.m.squaredNorm() - 0.25));
            try {
                worst_c = std::max(worst_c, std::abs(constant_of_motion(s.m, p).value));
            } catch (const DomainError&) {
            }
        }
        CAPTURE(p.omega);
        CAPTURE(p.feedback_g);
        CHECK(worst_norm <= 1e-9);
        CHECK(worst_c <= 1e-7);
    }

    // Away from m_x = 0 the constant is non-trivial.
    const SystemParams p{0.75, 1.0, 0.5};
    const Magnetization m0(0.3, 0.2, -std::sqrt(0.25 - 0.13));
    const double c0 = constant_of_motion(m0, p).value;
    CHECK(std::abs(c0) > 0.01);
    for (const auto& s : integrate(m0, p, times)) {
        CHECK(std::abs(constant_of_motion(s.m, p).value - c0) <= 1e-7 * std::abs(c0));
    }
    const SystemParams z{0.3, 1.0, -0.5};
    const double z0 = constant_of_motion(m0, z).value;
    for (const auto& s : integrate(m0, z, times)) {
        CHECK(std::abs(constant_of_motion(s.m, z).value - z0) <= 1e-7 * std::abs(z0));
    }
}

TEST_CASE("constant of motion: values, branches and domain") {
    const auto c = constant_of_motion(ground_magnetization(), {0.3, 1.0, 0.5});
    CHECK(c.value == 0.0);
    CHECK(c.branch == MotionConstantBranch::Kappa);
    const auto c0 = constant_of_motion({0.0, 0.2, -0.3}, {0.3, 1.0, -0.5});
    CHECK(c0.value == 0.0);
    CHECK(c0.branch == MotionConstantBranch::KappaZero);
    // Fixed point of the C = 0 manifold.
    CHECK(constant_of_motion(stationary_point({0.3, 1.0, 0.5}), {0.3, 1.0, 0.5}).value == 0.0);

    CHECK_THROWS_AS((void)constant_of_motion({0.1, 0.2, 0.3}, {0.0, 1.0, -0.5}), DomainError);
    CHECK_THROWS_AS((void)constant_of_motion({-0.1, 0.2, 0.3}, {0.3, 1.0, 0.3}), DomainError);
    CHECK_NOTHROW((void)constant_of_motion({-0.1, 0.2, 0.3}, {0.3, 1.0, 0.5}));
    CHECK_THROWS_AS((void)constant_of_motion({0.0, 0.2, 0.3}, {0.3, 1.0, -1.5}), DomainError);
    CHECK_THROWS_AS((void)constant_of_motion({0.1, 0.3, 0.3}, {0.3, 1.0, 0.5}), DomainError);
}

TEST_CASE("reduced equations") {
    const Eigen::Vector2d r = reduced_rhs(0.0, -0.5, {0.3, 1.0, 0.5});
    CHECK(r(0) == doctest::Approx(0.3));
    CHECK(std::abs(r(1)) < 1e-15);

    const auto times = uniform_times(60.0, 0.01);
    for (const SystemParams& p : {SystemParams{0.3, 1.0, 0.5}, SystemParams{0.75, 1.0, 0.5},
                                  SystemParams{0.2, 1.0, -1.5}}) {
        const auto full = integrate(ground_magnetization(), p, times);
        using State = Eigen::Vector2d;
        std::vector<State> reduced;
        integrate_adaptive([&](double, const State& y) -> State { return reduced_rhs(y(0), y(1), p); },
                           State(0.0, -0.5), std::span<const double>(times), meanfield_tolerances(),
                           [&](std::size_t, double, const State& y) { reduced.push_back(y); });
        double worst = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            worst = std::max(worst, std::abs(full[k].m.y() - reduced[k](0)));
            worst = std::max(worst, std::abs(full[k].m.z() - reduced[k](1)));
        }
        CHECK(worst <= 1e-9);

        // Second-order form: central second difference of m_z against the force law,
        // bounded by the truncation term h^2/12 max|d^4 m_z/dt^4| plus rounding.
        const double h = times[1] - times[0];
        auto z = [&](std::size_t k) { return reduced[k](1); };
        double worst_fd = 0.0, max_d4 = 0.0;
        for (std::size_t k = 2; k + 2 < times.size(); ++k) {
            const double fd = (z(k + 1) - 2.0 * z(k) + z(k - 1)) / (h * h);
            worst_fd = std::max(worst_fd, std::abs(fd - second_order_mz_acceleration(reduced[k](0), z(k), p)));
            const double d4 = (z(k + 2) - 4.0 * z(k + 1) + 6.0 * z(k) - 4.0 * z(k - 1) + z(k - 2)) / std::pow(h, 4);
            max_d4 = std::max(max_d4, std::abs(d4));
        }
        CHECK(worst_fd <= 1.5 * h * h / 12.0 * max_d4 + 1e-12 / (h * h));
    }
}

TEST_CASE("second-order force law equals the factored paper form") {
    const SystemParams p{0.4, 1.0, 0.5};
    const double my = 0.13, mz = -0.31, gk = p.gamma_total * p.kappa();
    const double factored = -4.0 * p.omega * p.omega * (1.0 - gk * my / p.omega) *
                            (1.0 - gk * my / (2.0 * p.omega)) * mz;
    CHECK(second_order_mz_acceleration(my, mz, p) == doctest::Approx(factored).epsilon(1e-13));
}

TEST_CASE("analytic phase classification") {
    const PhaseLabel a = classify_phase({0.3, 1.0, 0.5});
    CHECK(a.phase == Phase::Stationary);
    CHECK(a.mz_ss == doctest::Approx(-0.4).epsilon(1e-14));
    CHECK(classify_phase({0.6, 1.0, 0.5}).phase == Phase::TimeCrystal);
    CHECK(std::isnan(classify_phase({0.6, 1.0, 0.5}).mz_ss));
    const PhaseLabel b = classify_phase({0.3, 1.0, -1.5});
    CHECK(b.phase == Phase::Stationary);
    CHECK(b.mz_ss == doctest::Approx(0.4).epsilon(1e-14));
    for (double omega : {1e-6, 0.01, 0.3, 1.0}) {
        CHECK(classify_phase({omega, 1.0, -0.5}).phase == Phase::TimeCrystal);
    }
    const PhaseLabel edge = classify_phase({0.5, 1.0, 0.5});
    CHECK(edge.phase == Phase::Stationary);
    CHECK(edge.mz_ss == 0.0);
    CHECK(critical_omega({0.0, 1.0, 0.5}) == doctest::Approx(0.5));
    CHECK(critical_omega({0.0, 2.0, -1.5}) == doctest::Approx(1.0));
    CHECK(std::string(to_string(Phase::TimeCrystal)) == "time_crystal");
    CHECK(std::string(to_string(Phase::Stationary)) == "stationary");
}

TEST_CASE("stationary point is a fixed point on the unit-half sphere") {
    for (const SystemParams& p : {SystemParams{0.3, 1.0, 0.5}, SystemParams{0.1, 1.0, 1.0},
                                  SystemParams{0.2, 1.0, -1.5}, SystemParams{0.45, 1.0, 0.5}}) {
        const Magnetization m = stationary_point(p);
        CHECK(mf_rhs(m, p).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(m.norm() == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(m.x() == 0.0);
    }
    CHECK_THROWS_AS((void)stationary_point({0.6, 1.0, 0.5}), DomainError);
    CHECK_THROWS_AS((void)stationary_point({0.3, 1.0, -0.5}), DomainError);
}

TEST_CASE("numeric phase check") {
    const NumericPhase s = verify_phase_numerically({0.25, 1.0, 0.5});
    CHECK(s.label.phase == Phase::Stationary);
    CHECK(std::abs(s.late_mean_mz - eq6(0.25, 1.0, 2.0)) <= 1e-4);
    CHECK(verify_phase_numerically({0.6, 1.0, 0.5}).label.phase == Phase::TimeCrystal);
    CHECK(verify_phase_numerically({0.3, 1.0, -0.5}).label.phase == Phase::TimeCrystal);
    CHECK_THROWS_AS((void)verify_phase_numerically({0.3, 1.0, 0.5}, {}, {0.1, 0.0, -0.4}), InvalidParameter);
}

TEST_CASE("uniform time grid") {
    const auto t = uniform_times(1.0, 0.1);
    REQUIRE(t.size() == 11);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 1.0);
    CHECK_THROWS_AS((void)uniform_times(-1.0, 0.1), InvalidParameter);
}
