#include <doctest.h>

#include <cmath>
#include <vector>

#include "wgfb/errors.hpp"
#include "wgfb/lindblad.hpp"
#include "wgfb/power_law.hpp"

using namespace wgfb;

TEST_CASE("exact power laws") {
    std::vector<std::pair<double, double>> inv, root;
    for (double x : {1.0, 2.0, 5.0, 10.0, 40.0}) {
        inv.emplace_back(x, 4.0 / x);
        root.emplace_back(x, 2.0 / std::sqrt(x));
    }
    const PowerLawFit a = fit_power_law(inv);
    CHECK(a.slope == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(a.intercept == doctest::Approx(std::log(4.0)).epsilon(1e-13));
    CHECK(a.residual < 1e-12);
    CHECK(a.points == 5);
    CHECK(fit_power_law(root).slope == doctest::Approx(-0.5).epsilon(1e-13));
}

TEST_CASE("window selection") {
    std::vector<std::pair<double, double>> pairs;
    for (double x = 1.0; x <= 10.0; x += 1.0) {
        pairs.emplace_back(x, x < 5.0 ? 1.0 : x * x);
    }
    const PowerLawFit fit = fit_power_law(pairs, 5.0, 10.0);
    CHECK(fit.points == 6);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("errors") {
    const std::vector<std::pair<double, double>> two{{1.0, 1.0}, {2.0, 2.0}};
    CHECK_THROWS_AS((void)fit_power_law(two), InvalidParameter);
    const std::vector<std::pair<double, double>> neg{{1.0, 1.0}, {2.0, -2.0}, {3.0, 3.0}};
    CHECK_THROWS_AS((void)fit_power_law(neg), DomainError);
    const std::vector<std::pair<double, double>> zero{{0.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}};
    CHECK_THROWS_AS((void)fit_power_law(zero), DomainError);
}

TEST_CASE("gap data at the critical point") {
    std::vector<std::pair<double, double>> pairs;
    for (int n : {10, 20, 30}) {
        pairs.emplace_back(n, spectral_gap(build_model({0.5, 1.0, 0.5}, n)).gap);
    }
    const double slope = fit_power_law(pairs).slope;
    CHECK(slope >= -0.65);
    CHECK(slope <= -0.35);
}
