#include "wgfb/power_law.hpp"

#include <cmath>
#include <vector>

#include "wgfb/errors.hpp"

namespace wgfb {

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> pairs, double x_min,
                          double x_max) {
    std::vector<double> lx, ly;
    for (const auto& [x, y] : pairs) {
        if (x < x_min || x > x_max) {
            continue;
        }
        if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
            throw DomainError("fit_power_law: values must be positive and finite");
        }
        lx.push_back(std::log(x));
        ly.push_back(std::log(y));
    }
    if (lx.size() < 3) {
        throw InvalidParameter("fit_power_law: need at least 3 points in the window");
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) {
        throw DomainError("fit_power_law: all x values coincide");
    }
    PowerLawFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    fit.points = lx.size();
    return fit;
}

}  // namespace wgfb
