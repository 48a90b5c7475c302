#include "wgfb/fluctuations.hpp"

#include <cmath>
#include <limits>

#include "wgfb/errors.hpp"
#include "wgfb/parallel.hpp"

namespace wgfb {

namespace {

constexpr double levi_civita(int a, int b, int c) noexcept {
    if (a == b || b == c || a == c) {
        return 0.0;
    }
    // Even permutations of (0, 1, 2).
    return ((a == 0 && b == 1) || (a == 1 && b == 2) || (a == 2 && b == 0)) ? 1.0 : -1.0;
}

using JointState = Eigen::Matrix<double, 9, 1>;

JointState pack(const Magnetization& m, const Eigen::Matrix3d& sigma) {
    JointState y;
    y << m, sigma(0, 0), sigma(0, 1), sigma(0, 2), sigma(1, 1), sigma(1, 2), sigma(2, 2);
    return y;
}

Eigen::Matrix3d unpack_sigma(const JointState& y) {
    Eigen::Matrix3d sigma;
    sigma << y(3), y(4), y(5),
             y(4), y(6), y(7),
             y(5), y(7), y(8);
    return sigma;
}

double xi_or_nan(const Magnetization& m, const Eigen::Matrix3d& sigma) {
    if (!(m.norm() > 1e-10)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return squeezing_xi(principal_frame(m, sigma));
}

}  // namespace

StructureMatrices structure_matrices(const SystemParams& params) {
    const double gamma = params.gamma_total;
    const double kappa = params.kappa();
    StructureMatrices sm;
    sm.a = (0.5 * gamma) * Eigen::Vector3d(1.0 + kappa * kappa, 2.0, 0.0).asDiagonal();
    sm.b.setZero();
    sm.b(0, 1) = -0.5 * gamma * (kappa + 1.0);
    sm.b(1, 0) = 0.5 * gamma * (kappa + 1.0);
    sm.h.setZero();
    sm.h(0, 1) = sm.h(1, 0) = -0.5 * params.feedback_g * gamma;
    sm.omega_vec = {2.0 * params.omega, 0.0, 0.0};
    return sm;
}

Eigen::Matrix3d s_matrix(const Magnetization& m) {
    Eigen::Matrix3d s;
    s << 0.0, m.z(), -m.y(),
         -m.z(), 0.0, m.x(),
         m.y(), -m.x(), 0.0;
    return s;
}

Eigen::Matrix3d G_matrix(const Magnetization& m, const SystemParams& params) {
    const double gamma = params.gamma_total;
    const double kappa = params.kappa();
    const double omega = params.omega;
    Eigen::Matrix3d g;
    g << gamma * m.z(), 0.0, gamma * m.x(),
         0.0, kappa * gamma * m.z(), kappa * gamma * m.y() - 2.0 * omega,
         -2.0 * gamma * m.x(), 2.0 * omega - 2.0 * kappa * gamma * m.y(), 0.0;
    return g;
}

GeneratorDecomposition generator_decomposition(const Magnetization& m, const SystemParams& params) {
    const StructureMatrices sm = structure_matrices(params);
    const Eigen::Matrix3d h_sym = sm.h + sm.h.transpose();
    const Eigen::Matrix3d s = s_matrix(m);

    GeneratorDecomposition out;
    out.d_local.setZero();
    out.d_coherent.setZero();
    out.d_dissipative.setZero();
    for (int a = 0; a < 3; ++a) {
        for (int c = 0; c < 3; ++c) {
            for (int mu = 0; mu < 3; ++mu) {
                out.d_local(a, c) -= sm.omega_vec(mu) * levi_civita(mu, a, c);
                for (int nu = 0; nu < 3; ++nu) {
                    out.d_coherent(a, c) -= h_sym(mu, nu) * levi_civita(nu, a, c) * m(mu);
                    out.d_dissipative(a, c) -= sm.b(mu, nu) * m(nu) * levi_civita(mu, a, c);
                }
            }
        }
    }
    out.q_coherent = s * h_sym;
    out.q_dissipative = s * sm.b;
    return out;
}

Eigen::Matrix3d noise_matrix(const Magnetization& m, const SystemParams& params) {
    const Eigen::Matrix3d s = s_matrix(m);
    return -s * structure_matrices(params).a * s;
}

CovarianceState initial_covariance() {
    return {ground_magnetization(), Eigen::Vector3d(0.25, 0.25, 0.0).asDiagonal()};
}

Eigen::Matrix3d covariance_rhs(const Magnetization& m, const Eigen::Matrix3d& sigma,
                               const SystemParams& params) {
    const Eigen::Matrix3d g = G_matrix(m, params);
    return noise_matrix(m, params) + g * sigma + sigma * g.transpose();
}

Eigen::Matrix3d align_to_z(const Magnetization& m, double direction_tolerance) {
    const double length = m.norm();
    if (!(length > direction_tolerance)) {
        throw UndefinedDirection("magnetization too small to define a principal direction");
    }
    const Eigen::Vector3d n = m / length;
    const Eigen::Vector3d axis = n.cross(Eigen::Vector3d::UnitZ());
    const double sin_theta = axis.norm();
    const double cos_theta = n.z();
    if (sin_theta < 1e-12) {
        if (cos_theta > 0.0) {
            return Eigen::Matrix3d::Identity();
        }
        return Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
    }
    const Eigen::Vector3d k = axis / sin_theta;
    Eigen::Matrix3d cross;
    cross << 0.0, -k.z(), k.y(),
             k.z(), 0.0, -k.x(),
             -k.y(), k.x(), 0.0;
    return cos_theta * Eigen::Matrix3d::Identity() + sin_theta * cross +
           (1.0 - cos_theta) * k * k.transpose();
}

PrincipalFrame principal_frame(const Magnetization& m, const Eigen::Matrix3d& sigma,
                               double direction_tolerance) {
    PrincipalFrame frame;
    frame.rotation = align_to_z(m, direction_tolerance);
    frame.j = m.norm();
    const Eigen::Matrix3d rotated = frame.rotation * sigma * frame.rotation.transpose();
    frame.sigma_hat = rotated.topLeftCorner<2, 2>() / frame.j;
    frame.sigma_hat = 0.5 * (frame.sigma_hat + frame.sigma_hat.transpose()).eval();
    frame.classical_variance = rotated(2, 2);
    return frame;
}

double squeezing_xi(const PrincipalFrame& frame) {
    const Eigen::Matrix2d& c = frame.sigma_hat;
    const double mean = 0.5 * (c(0, 0) + c(1, 1));
    const double radius = std::hypot(0.5 * (c(0, 0) - c(1, 1)), c(0, 1));
    const double lmax = mean + radius;
    if (!(lmax > 0.0)) {
        return 2.0 * (mean - radius);
    }
    // det / lmax avoids the cancellation in mean - radius when one quadrature
    // grows without bound (g < -1/2).
    return 2.0 * (c(0, 0) * c(1, 1) - c(0, 1) * c(0, 1)) / lmax;
}

std::vector<FluctuationSample> evolve_covariance(const Magnetization& m0,
                                                 const Eigen::Matrix3d& sigma0,
                                                 const SystemParams& params,
                                                 std::span<const double> times,
                                                 const OdeTolerances& tol) {
    params.validate();
    if (!m0.allFinite() || !sigma0.allFinite()) {
        throw InvalidParameter("evolve_covariance: initial state must be finite");
    }
    if ((sigma0 - sigma0.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
        throw InvalidParameter("evolve_covariance: sigma0 must be symmetric");
    }
    if (!times.empty() && times.front() != 0.0) {
        throw InvalidParameter("evolve_covariance: time grid must start at 0");
    }

    auto rhs = [&](double, const JointState& y) -> JointState {
        const Magnetization m = y.head<3>();
        return pack(mf_rhs(m, params), covariance_rhs(m, unpack_sigma(y), params));
    };
    std::vector<FluctuationSample> out;
    out.reserve(times.size());
    integrate_adaptive(rhs, pack(m0, sigma0), times, tol,
                       [&](std::size_t, double t, const JointState& y) {
                           const Magnetization m = y.head<3>();
                           const Eigen::Matrix3d sigma = unpack_sigma(y);
                           out.push_back({t, m, sigma, xi_or_nan(m, sigma)});
                       });
    return out;
}

Eigen::Matrix3d covariance_by_propagator(const Magnetization& m0, const Eigen::Matrix3d& sigma0,
                                         const SystemParams& params, double t, int intervals) {
    params.validate();
    if (!(t > 0.0)) {
        return sigma0;
    }
    if (intervals < 2 || intervals % 2 != 0) {
        throw InvalidParameter("covariance_by_propagator: intervals must be even and >= 2");
    }

    // Augmented state (m, vec X) with dX/du = G(u) X, X(0) = I.
    using Augmented = Eigen::Matrix<double, 12, 1>;
    auto rhs = [&](double, const Augmented& y) -> Augmented {
        const Magnetization m = y.head<3>();
        const Eigen::Map<const Eigen::Matrix3d> x(y.data() + 3);
        const Eigen::Matrix3d dx = G_matrix(m, params) * x;
        Augmented dy;
        dy.head<3>() = mf_rhs(m, params);
        Eigen::Map<Eigen::Matrix3d>(dy.data() + 3) = dx;
        return dy;
    };
    Augmented y0;
    y0.head<3>() = m0;
    Eigen::Map<Eigen::Matrix3d>(y0.data() + 3) = Eigen::Matrix3d::Identity();

    std::vector<double> grid(static_cast<std::size_t>(intervals) + 1);
    for (int k = 0; k <= intervals; ++k) {
        grid[k] = t * static_cast<double>(k) / intervals;
    }
    const Eigen::Matrix3d a = structure_matrices(params).a;
    Eigen::Matrix3d integral = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d x_final = Eigen::Matrix3d::Identity();
    const double du = t / intervals;
    integrate_adaptive(rhs, y0, grid, OdeTolerances{1e-13, 1e-15, 50'000'000},
                       [&](std::size_t k, double, const Augmented& y) {
                           const Magnetization m = y.head<3>();
                           const Eigen::Matrix3d x = Eigen::Map<const Eigen::Matrix3d>(y.data() + 3);
                           const Eigen::Matrix3d x_inv = x.inverse();
                           const Eigen::Matrix3d s = s_matrix(m);
                           const Eigen::Matrix3d f = x_inv * (s * a * s) * x_inv.transpose();
                           const double w = (k == 0 || k == grid.size() - 1) ? 1.0
                                            : (k % 2 == 1)                   ? 4.0
                                                                             : 2.0;
                           integral += (w * du / 3.0) * f;
                           x_final = x;
                       });
    return x_final * (sigma0 - integral) * x_final.transpose();
}

std::vector<LandscapePoint> squeezing_landscape(std::span<const double> omegas,
                                                std::span<const double> gs, double t_eval,
                                                double gamma_total, unsigned threads) {
    if (!(t_eval > 0.0)) {
        throw InvalidParameter("squeezing_landscape: t_eval must be positive");
    }
    std::vector<LandscapePoint> out(omegas.size() * gs.size());
    const CovarianceState start = initial_covariance();
    const std::vector<double> times = {0.0, t_eval};
    parallel_for(out.size(), threads, [&](std::size_t idx) {
        LandscapePoint& p = out[idx];
        p.omega_over_gamma = omegas[idx / gs.size()];
        p.g = gs[idx % gs.size()];
        try {
            const SystemParams params{p.omega_over_gamma * gamma_total, gamma_total, p.g};
            const auto traj = evolve_covariance(start.m, start.sigma, params, times);
            p.xi = traj.back().xi;
            if (!std::isfinite(p.xi)) {
                p.error = "xi undefined at t_eval";
            }
        } catch (const std::exception& e) {
            p.xi = std::numeric_limits<double>::quiet_NaN();
            p.error = e.what();
        }
    });
    return out;
}

}  // namespace wgfb
