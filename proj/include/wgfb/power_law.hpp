#pragma once

#include <limits>
#include <span>
#include <utility>

namespace wgfb {

struct PowerLawFit {
    double slope = 0.0;
    double intercept = 0.0;  ///< log-space intercept: log y = intercept + slope log x
    double residual = 0.0;   ///< RMS of log residuals
    std::size_t points = 0;
};

/// Unweighted least squares of log y against log x over points with
/// x in [x_min, x_max]. Needs at least 3 points in the window; throws
/// DomainError for non-positive values.
[[nodiscard]] PowerLawFit fit_power_law(std::span<const std::pair<double, double>> pairs,
                                        double x_min = 0.0,
                                        double x_max = std::numeric_limits<double>::infinity());

}  // namespace wgfb
