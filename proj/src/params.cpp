#include "wgfb/params.hpp"

#include <cmath>
#include <string>

#include "wgfb/errors.hpp"

namespace wgfb {

void SystemParams::validate() const {
    if (!std::isfinite(omega) || !std::isfinite(gamma_total) || !std::isfinite(feedback_g)) {
        throw InvalidParameter("system parameters must be finite");
    }
    if (gamma_total <= 0.0) {
        throw InvalidParameter("gamma_total must be positive, got " + std::to_string(gamma_total));
    }
    if (omega < 0.0) {
        throw InvalidParameter("omega must be non-negative, got " + std::to_string(omega));
    }
}

}  // namespace wgfb
