#pragma once

namespace wgfb {

/// Physical parameters of the driven ensemble with feedback.
///
/// Rates are in units of the collective decay rate Gamma = gamma * N, which
/// defaults to 1 and therefore sets the unit of time. The single-emitter rate
/// gamma is derived inside the finite-N model and never appears here.
struct SystemParams {
    double omega = 0.0;        ///< drive Rabi frequency
    double gamma_total = 1.0;  ///< collective rate Gamma
    double feedback_g = 0.0;   ///< dimensionless feedback strength g

    /// kappa = 2g + 1 scales the x-component of the right-moving jump operator.
    [[nodiscard]] constexpr double kappa() const noexcept { return 2.0 * feedback_g + 1.0; }

    /// Throws InvalidParameter unless gamma_total > 0, omega >= 0 and all finite.
    void validate() const;
};

}  // namespace wgfb
