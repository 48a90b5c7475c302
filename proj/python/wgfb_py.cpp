// Python bindings for the core library. Vectors and matrices cross as numpy
// arrays; library exceptions map to ValueError / ArithmeticError / RuntimeError.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <vector>

#include "wgfb/errors.hpp"
#include "wgfb/fluctuations.hpp"
#include "wgfb/lindblad.hpp"
#include "wgfb/meanfield.hpp"
#include "wgfb/power_law.hpp"
#include "wgfb/sweep.hpp"

namespace py = pybind11;
using namespace wgfb;

namespace {

SystemParams make_params(double omega, double g, double gamma_total) {
    SystemParams p{omega, gamma_total, g};
    p.validate();
    return p;
}

}  // namespace

PYBIND11_MODULE(_wgfb, m) {
    m.doc() = "Feedback-controlled emitter ensemble: finite-N, mean-field and fluctuation solvers";

    py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
    py::register_exception<UndefinedDirection>(m, "UndefinedDirection", PyExc_ArithmeticError);
    py::register_exception<ComputationError>(m, "ComputationError", PyExc_RuntimeError);

    m.def("critical_omega",
          [](double g, double gamma_total) { return critical_omega(make_params(0.0, g, gamma_total)); },
          py::arg("g"), py::arg("gamma_total") = 1.0);

    m.def(
        "classify_phase",
        [](double omega, double g, double gamma_total) {
            const PhaseLabel label = classify_phase(make_params(omega, g, gamma_total));
            return py::make_tuple(std::string(to_string(label.phase)), label.mz_ss);
        },
        py::arg("omega"), py::arg("g"), py::arg("gamma_total") = 1.0,
        "Returns (label, mz_ss); mz_ss is nan in the time-crystal phase.");

    m.def(
        "integrate",
        [](double omega, double g, const std::vector<double>& times, const Magnetization& m0,
           double gamma_total) {
            const auto samples = integrate(m0, make_params(omega, g, gamma_total), times);
            Eigen::MatrixXd out(static_cast<Eigen::Index>(samples.size()), 3);
            for (std::size_t i = 0; i < samples.size(); ++i)
                out.row(static_cast<Eigen::Index>(i)) = samples[i].m.transpose();
            return out;
        },
        py::arg("omega"), py::arg("g"), py::arg("times"),
        py::arg("m0") = ground_magnetization(), py::arg("gamma_total") = 1.0,
        "Mean-field trajectory as an array of shape (len(times), 3).");

    m.def(
        "spectral_gap",
        [](double omega, double g, int n, double gamma_total) {
            const SpectrumResult r = spectral_gap(build_model(make_params(omega, g, gamma_total), n));
            return py::make_tuple(r.gap, r.gap_frequency);
        },
        py::arg("omega"), py::arg("g"), py::arg("n"), py::arg("gamma_total") = 1.0,
        "Returns (gap, frequency of the slowest mode).");

    m.def(
        "steady_state_xi",
        [](double omega, double g, int n, double gamma_total) {
            return finite_size_squeezing(steady_state(build_model(make_params(omega, g, gamma_total), n)));
        },
        py::arg("omega"), py::arg("g"), py::arg("n"), py::arg("gamma_total") = 1.0);

    m.def(
        "evolve_covariance",
        [](double omega, double g, const std::vector<double>& times, double gamma_total) {
            const CovarianceState s0 = initial_covariance();
            const auto samples =
                evolve_covariance(s0.m, s0.sigma, make_params(omega, g, gamma_total), times);
            std::vector<double> xi;
            std::vector<Eigen::Matrix3d> sigma;
            for (const auto& s : samples) {
                xi.push_back(s.xi);
                sigma.push_back(s.sigma);
            }
            return py::make_tuple(xi, sigma);
        },
        py::arg("omega"), py::arg("g"), py::arg("times"), py::arg("gamma_total") = 1.0,
        "Covariance from the coherent ground state; returns (xi list, Sigma list).");

    m.def(
        "fit_power_law",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            if (x.size() != y.size()) throw InvalidParameter("x and y differ in length");
            std::vector<std::pair<double, double>> pairs;
            for (std::size_t i = 0; i < x.size(); ++i) pairs.emplace_back(x[i], y[i]);
            const PowerLawFit fit = fit_power_law(pairs);
            return py::make_tuple(fit.slope, fit.intercept, fit.residual);
        },
        py::arg("x"), py::arg("y"), "Returns (slope, intercept, residual) in log space.");

    m.def(
        "run_config",
        [](const std::filesystem::path& path, const std::filesystem::path& output, unsigned threads) {
            RunConfig config = load_config(path);
            if (!output.empty()) config.output = output;
            if (threads != 0) config.threads = threads;
            config.validate();
            const RunSummary summary = run(config);
            return summary.line();
        },
        py::arg("path"), py::arg("output") = std::filesystem::path{}, py::arg("threads") = 0u,
        "Runs a config file and returns the summary line.");
}
