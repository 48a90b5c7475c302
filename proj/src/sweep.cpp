#include "wgfb/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "wgfb/errors.hpp"
#include "wgfb/fluctuations.hpp"
#include "wgfb/lindblad.hpp"
#include "wgfb/meanfield.hpp"
#include "wgfb/parallel.hpp"
#include "wgfb/power_law.hpp"

namespace wgfb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ModeEntry {
    Mode mode;
    std::string_view name;
    std::string_view help;
};

constexpr ModeEntry kModes[] = {
    {Mode::MeanField, "meanfield", "mean-field trajectory"},
    {Mode::FiniteN, "finite-n", "finite-N Dicke-basis trajectories or steady states"},
    {Mode::Fluctuations, "fluctuations", "mean-field plus covariance trajectory"},
    {Mode::PhaseDiagram, "phase-diagram", "analytic and numeric phase labels on a grid"},
    {Mode::GapScaling, "gap-scaling", "Liouvillian gap versus N with a power-law fit"},
    {Mode::SqueezingLandscape, "squeezing-landscape", "xi at t_eval on an (omega, g) grid"},
    {Mode::OracleCheck, "oracle-check", "Dicke engine versus tensor-product oracle"},
};

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) {
        throw InvalidParameter("invalid value for '" + key + "': " + what);
    }
}

void require_positive(double v, const std::string& key) {
    require(std::isfinite(v) && v > 0.0, key, "must be positive and finite");
}

void require_finite(double v, const std::string& key) {
    require(std::isfinite(v), key, "must be finite");
}

// CSV text fields must not break the row structure.
std::string sanitize(std::string text) {
    for (char& c : text) {
        if (c == ',' || c == '\n' || c == '\r' || c == '"') {
            c = c == ',' ? ';' : ' ';
        }
    }
    return text;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::string_view header) : path_(path) {
        if (path.has_parent_path()) {
            std::filesystem::create_directories(path.parent_path());
        }
        out_.open(path, std::ios::binary | std::ios::trunc);
        if (!out_) {
            throw ComputationError("cannot open output file " + path.string());
        }
        out_ << header << '\n';
    }

    template <class... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
        out_ << '\n';
    }

    void close() {
        out_.close();
        if (!out_) {
            throw ComputationError("failed writing " + path_.string());
        }
    }

private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }

    std::filesystem::path path_;
    std::ofstream out_;
};

std::filesystem::path sidecar(const std::filesystem::path& output, std::string_view suffix) {
    std::filesystem::path p = output;
    p += suffix;
    return p;
}

OdeTolerances tolerances_for(const RunConfig& c, OdeTolerances fallback) {
    if (c.rtol) {
        fallback.rtol = *c.rtol;
    }
    if (c.atol) {
        fallback.atol = *c.atol;
    }
    return fallback;
}

std::vector<double> sampled_times(const RunConfig& c) { return uniform_times(c.t_max, c.dt); }

bool keep(std::size_t idx, const RunConfig& c) {
    return idx % static_cast<std::size_t>(c.output_stride) == 0;
}

struct PointError {
    std::string where;
    std::string what;
};

struct Outcome {
    std::size_t points = 0;
    std::vector<PointError> errors;
    std::string note;
    bool passed = true;
};

Outcome run_meanfield(const RunConfig& c) {
    const Magnetization m0(c.mx0, c.my0, c.mz0);
    const auto times = sampled_times(c);
    const auto traj = integrate(m0, c.params, times, tolerances_for(c, meanfield_tolerances()));
    CsvWriter csv(c.output, "t,mx,my,mz,c_kappa");
    Outcome out;
    bool c_defined = true;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (!keep(k, c)) {
            continue;
        }
        const auto& s = traj[k];
        double ck = kNaN;
        try {
            ck = constant_of_motion(s.m, c.params).value;
        } catch (const DomainError&) {
            c_defined = false;
        }
        csv.row(s.t, s.m.x(), s.m.y(), s.m.z(), ck);
        ++out.points;
    }
    csv.close();
    if (!c_defined) {
        out.note = "c_kappa undefined on some rows";
    }
    return out;
}

Outcome run_finite_n(const RunConfig& c) {
    const std::vector<int> ns = c.emitter_counts();
    const auto times = sampled_times(c);
    std::vector<std::vector<FiniteNSample>> results(ns.size());
    std::vector<std::string> failures(ns.size());
    EvolveOptions evolve_options;
    evolve_options.tolerances = tolerances_for(c, OdeTolerances{});

    parallel_for(ns.size(), c.threads, [&](std::size_t i) {
        try {
            const LindbladModel model = build_model(c.params, ns[i]);
            if (c.steady_state) {
                const DickeDensityMatrix ss = steady_state(model);
                const SpinOperators ops = build_spin_operators(ns[i]);
                results[i].push_back(measure(ss.rho, ops, std::numeric_limits<double>::infinity()));
            } else {
                results[i] = evolve(model, ground_state(ns[i]), times, evolve_options);
            }
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });

    CsvWriter csv(c.output, "t,n,mx,my,mz,sigma_xx,sigma_xy,sigma_yy,sigma_zz,xi_n");
    Outcome out;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!failures[i].empty()) {
            out.errors.push_back({"n=" + std::to_string(ns[i]), failures[i]});
            continue;
        }
        for (std::size_t k = 0; k < results[i].size(); ++k) {
            if (!c.steady_state && !keep(k, c)) {
                continue;
            }
            const auto& s = results[i][k];
            csv.row(s.t, ns[i], s.magnetization.x(), s.magnetization.y(), s.magnetization.z(),
                    s.covariance(0, 0), s.covariance(0, 1), s.covariance(1, 1), s.covariance(2, 2),
                    s.xi);
            ++out.points;
        }
    }
    csv.close();
    if (out.errors.size() == ns.size()) {
        throw ComputationError("finite-n: every emitter count failed; first: " +
                               out.errors.front().what);
    }
    return out;
}

Outcome run_fluctuations(const RunConfig& c) {
    const Magnetization m0(c.mx0, c.my0, c.mz0);
    const Eigen::Matrix3d sigma0 = initial_covariance().sigma;
    const auto times = sampled_times(c);
    const auto traj =
        evolve_covariance(m0, sigma0, c.params, times, tolerances_for(c, meanfield_tolerances()));
    CsvWriter csv(c.output, "t,mx,my,mz,sxx,sxy,sxz,syy,syz,szz,xi");
    Outcome out;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (!keep(k, c)) {
            continue;
        }
        const auto& s = traj[k];
        csv.row(s.t, s.m.x(), s.m.y(), s.m.z(), s.sigma(0, 0), s.sigma(0, 1), s.sigma(0, 2),
                s.sigma(1, 1), s.sigma(1, 2), s.sigma(2, 2), s.xi);
        ++out.points;
    }
    csv.close();
    return out;
}

struct PhasePoint {
    double omega_over_gamma = 0.0;
    double g = 0.0;
    PhaseLabel analytic;
    double mz_numeric = kNaN;
    std::string error;
};

Outcome run_phase_diagram(const RunConfig& c) {
    const auto omegas = c.omega_grid.values();
    const auto gs = c.g_grid.values();
    std::vector<PhasePoint> points(omegas.size() * gs.size());
    PhaseCheckOptions options;
    options.horizon = c.horizon;
    options.amplitude_threshold = c.amplitude_threshold;
    options.tolerances = tolerances_for(c, options.tolerances);
    const double gamma = c.params.gamma_total;

    parallel_for(points.size(), c.threads, [&](std::size_t idx) {
        PhasePoint& p = points[idx];
        p.omega_over_gamma = omegas[idx / gs.size()];
        p.g = gs[idx % gs.size()];
        try {
            const SystemParams params{p.omega_over_gamma * gamma, gamma, p.g};
            p.analytic = classify_phase(params);
            const NumericPhase numeric = verify_phase_numerically(params, options);
            if (numeric.label.phase == Phase::Stationary) {
                p.mz_numeric = numeric.late_mean_mz;
            }
        } catch (const std::exception& e) {
            p.error = e.what();
        }
    });

    CsvWriter csv(c.output, "omega_over_gamma,g,phase_label,mz_ss,mz_ss_numeric");
    Outcome out;
    for (const PhasePoint& p : points) {
        if (!p.error.empty()) {
            out.errors.push_back({"omega_over_gamma=" + format_double(p.omega_over_gamma) +
                                      " g=" + format_double(p.g),
                                  p.error});
            csv.row(p.omega_over_gamma, p.g, std::string("error"), kNaN, kNaN);
        } else {
            csv.row(p.omega_over_gamma, p.g, std::string(to_string(p.analytic.phase)),
                    p.analytic.mz_ss, p.mz_numeric);
        }
        ++out.points;
    }
    csv.close();
    if (!points.empty() && out.errors.size() == points.size()) {
        throw ComputationError("phase-diagram: every grid point failed; first: " +
                               out.errors.front().what);
    }
    return out;
}

Outcome run_gap_scaling(const RunConfig& c) {
    const std::vector<int> ns = c.emitter_counts();
    std::vector<double> gaps(ns.size(), kNaN);
    std::vector<std::string> failures(ns.size());
    SpectrumOptions options;
    options.max_emitters = c.spectrum_cap;

    parallel_for(ns.size(), c.threads, [&](std::size_t i) {
        try {
            gaps[i] = spectral_gap(build_model(c.params, ns[i]), options).gap;
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });

    CsvWriter csv(c.output, "n,gap");
    Outcome out;
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        csv.row(ns[i], gaps[i]);
        ++out.points;
        if (!failures[i].empty()) {
            out.errors.push_back({"n=" + std::to_string(ns[i]), failures[i]});
        } else if (gaps[i] > 0.0) {
            pairs.emplace_back(ns[i], gaps[i]);
        }
    }
    csv.close();
    if (out.errors.size() == ns.size()) {
        throw ComputationError("gap-scaling: every emitter count failed; first: " +
                               out.errors.front().what);
    }

    PowerLawFit fit{kNaN, kNaN, kNaN, 0};
    try {
        fit = fit_power_law(pairs);
    } catch (const std::exception& e) {
        out.errors.push_back({"fit", e.what()});
    }
    CsvWriter fit_csv(sidecar(c.output, ".fit"), "slope,residual");
    fit_csv.row(fit.slope, fit.residual);
    fit_csv.close();
    out.note = "slope=" + format_double(fit.slope) + " residual=" + format_double(fit.residual);
    return out;
}

Outcome run_landscape(const RunConfig& c) {
    const auto omegas = c.omega_grid.values();
    const auto gs = c.g_grid.values();
    const auto points =
        squeezing_landscape(omegas, gs, c.t_eval, c.params.gamma_total, c.threads);
    CsvWriter csv(c.output, "omega_over_gamma,g,xi_at_t_eval,error");
    Outcome out;
    for (const LandscapePoint& p : points) {
        csv.row(p.omega_over_gamma, p.g, p.xi, sanitize(p.error));
        ++out.points;
        if (!std::isfinite(p.xi)) {
            out.errors.push_back({"omega_over_gamma=" + format_double(p.omega_over_gamma) +
                                      " g=" + format_double(p.g),
                                  p.error});
        }
    }
    csv.close();
    if (!points.empty() && out.errors.size() == points.size()) {
        throw ComputationError("squeezing-landscape: every grid point failed; first: " +
                               out.errors.front().what);
    }
    return out;
}

// Largest absolute difference over every column the finite-n CSV reports.
double sample_deviation(const FiniteNSample& a, const FiniteNSample& b) {
    double d = (a.magnetization - b.magnetization).cwiseAbs().maxCoeff();
    d = std::max(d, (a.covariance - b.covariance).cwiseAbs().maxCoeff());
    if (std::isfinite(a.xi) != std::isfinite(b.xi)) {
        return std::numeric_limits<double>::infinity();
    }
    if (std::isfinite(a.xi)) {
        d = std::max(d, std::abs(a.xi - b.xi));
    }
    return d;
}

Outcome run_oracle_check(const RunConfig& c) {
    const std::vector<int> ns = c.emitter_counts();
    const auto times = sampled_times(c);
    EvolveOptions evolve_options;
    evolve_options.tolerances = tolerances_for(c, OdeTolerances{1e-11, 1e-13, 50'000'000});

    CsvWriter csv(c.output, "t,n,max_deviation");
    Outcome out;
    double worst = 0.0;
    for (int n : ns) {
        const auto dicke = evolve(build_model(c.params, n), ground_state(n), times, evolve_options);
        const auto oracle = brute_force_oracle(c.params, n, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double d = sample_deviation(dicke[k], oracle[k]);
            worst = std::max(worst, d);
            if (keep(k, c)) {
                csv.row(times[k], n, d);
                ++out.points;
            }
        }
    }
    csv.close();
    out.passed = worst <= c.oracle_tolerance;
    out.note = "max_deviation=" + format_double(worst) + (out.passed ? " pass" : " FAIL");
    return out;
}

void write_meta(const RunConfig& c, const RunSummary& s, const std::vector<PointError>& errors) {
    std::ofstream meta(sidecar(c.output, ".meta"), std::ios::binary | std::ios::trunc);
    meta << "mode = " << mode_name(c.mode) << '\n'
         << "points = " << s.points << '\n'
         << "failures = " << s.failures << '\n'
         << "wall_seconds = " << format_double(s.wall_seconds) << '\n'
         << "threads = " << resolve_threads(c.threads) << '\n';
    if (!s.note.empty()) {
        meta << "note = " << s.note << '\n';
    }
    for (const PointError& e : errors) {
        meta << "error = " << e.where << ": " << e.what << '\n';
    }
}

std::vector<int> expand_n_list(const std::vector<std::string>& tokens) {
    std::vector<int> out;
    for (const std::string& tok : tokens) {
        std::vector<int> parts;
        std::stringstream ss(tok);
        std::string piece;
        while (std::getline(ss, piece, ':')) {
            try {
                std::size_t used = 0;
                parts.push_back(std::stoi(piece, &used));
                require(used == piece.size(), "n-list", "not an integer: " + tok);
            } catch (const std::logic_error&) {
                require(false, "n-list", "not an integer: " + tok);
            }
        }
        if (parts.size() == 1) {
            out.push_back(parts[0]);
        } else if (parts.size() == 2 || parts.size() == 3) {
            const int step = parts.size() == 3 ? parts[2] : 1;
            require(step > 0, "n-list", "range step must be positive: " + tok);
            require(parts[1] >= parts[0], "n-list", "range end before start: " + tok);
            for (int v = parts[0]; v <= parts[1]; v += step) {
                out.push_back(v);
            }
        } else {
            require(false, "n-list", "expected N or start:stop[:step], got " + tok);
        }
    }
    return out;
}

void add_run_options(CLI::App& app, RunConfig& c, std::string& mode_key,
                     std::vector<std::string>& n_tokens, double& rtol, double& atol) {
    app.add_option("--mode", mode_key, "Run mode (required for 'run', optional otherwise)");
    app.add_option("--omega", c.params.omega, "Drive strength Omega");
    app.add_option("--gamma,--gamma-total,--gamma_total", c.params.gamma_total,
                   "Collective decay rate Gamma");
    app.add_option("--g,--feedback-g,--feedback_g", c.params.feedback_g, "Feedback strength g");
    app.add_option("--n-emitters,--n_emitters", c.n_emitters, "Number of emitters N");
    app.add_option("--n-list,--n_list", n_tokens,
                   "Emitter counts: integers or start:stop:step ranges");
    app.add_flag("--steady-state,--steady_state", c.steady_state,
                 "finite-n: emit the stationary state instead of a trajectory");
    app.add_option("--t-max,--t_max", c.t_max, "Final time (Gamma t)");
    app.add_option("--dt", c.dt, "Sampling interval");
    app.add_option("--output-stride,--output_stride", c.output_stride, "Write every k-th sample");
    app.add_option("--mx0", c.mx0, "Initial m_x");
    app.add_option("--my0", c.my0, "Initial m_y");
    app.add_option("--mz0", c.mz0, "Initial m_z");
    app.add_option("--omega-min,--omega_min", c.omega_grid.start, "Grid: first Omega/Gamma");
    app.add_option("--omega-max,--omega_max", c.omega_grid.stop, "Grid: last Omega/Gamma");
    app.add_option("--omega-step,--omega_step", c.omega_grid.step, "Grid: Omega/Gamma spacing");
    app.add_option("--g-min,--g_min", c.g_grid.start, "Grid: first g");
    app.add_option("--g-max,--g_max", c.g_grid.stop, "Grid: last g");
    app.add_option("--g-step,--g_step", c.g_grid.step, "Grid: g spacing");
    app.add_option("--horizon", c.horizon, "phase-diagram: numeric integration horizon");
    app.add_option("--amplitude-threshold,--amplitude_threshold", c.amplitude_threshold,
                   "phase-diagram: late-time peak-to-peak threshold");
    app.add_option("--t-eval,--t_eval", c.t_eval, "squeezing-landscape: evaluation time");
    app.add_option("--rtol", rtol, "Integrator relative tolerance");
    app.add_option("--atol", atol, "Integrator absolute tolerance");
    app.add_option("--oracle-tolerance,--oracle_tolerance", c.oracle_tolerance,
                   "oracle-check: pass threshold");
    app.add_option("--spectrum-cap,--spectrum_cap", c.spectrum_cap,
                   "gap-scaling: largest N for the dense eigensolver");
    app.add_option("--output,--output-path,--output_path", c.output, "Output CSV path");
    app.add_option("--threads", c.threads, "Worker threads (0 = all cores)");
}

}  // namespace

std::string_view mode_name(Mode mode) noexcept {
    for (const ModeEntry& e : kModes) {
        if (e.mode == mode) {
            return e.name;
        }
    }
    return "unknown";
}

std::optional<Mode> parse_mode(std::string_view name) noexcept {
    for (const ModeEntry& e : kModes) {
        if (e.name == name) {
            return e.mode;
        }
    }
    return std::nullopt;
}

const std::vector<Mode>& all_modes() {
    static const std::vector<Mode> modes = [] {
        std::vector<Mode> v;
        for (const ModeEntry& e : kModes) {
            v.push_back(e.mode);
        }
        return v;
    }();
    return modes;
}

std::vector<double> GridRange::values() const {
    const double span = (stop - start) / step;
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    std::vector<double> v(count);
    for (std::size_t k = 0; k < count; ++k) {
        // Snap to 12 decimals so that e.g. 0.3 and g = -0.5 are hit exactly.
        v[k] = std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12;
    }
    return v;
}

std::vector<int> RunConfig::emitter_counts() const {
    return n_list.empty() ? std::vector<int>{n_emitters} : n_list;
}

void RunConfig::validate() const {
    require_finite(params.omega, "omega");
    require(params.omega >= 0.0, "omega", "must be non-negative");
    require_positive(params.gamma_total, "gamma");
    require_finite(params.feedback_g, "g");
    require(n_emitters >= 1, "n-emitters", "must be at least 1");
    for (int n : n_list) {
        require(n >= 1, "n-list", "entries must be at least 1");
    }
    require_positive(t_max, "t-max");
    require_positive(dt, "dt");
    require(dt <= t_max, "dt", "must not exceed t-max");
    require(output_stride >= 1, "output-stride", "must be at least 1");
    require_finite(mx0, "mx0");
    require_finite(my0, "my0");
    require_finite(mz0, "mz0");
    require_finite(omega_grid.start, "omega-min");
    require(omega_grid.start >= 0.0, "omega-min", "must be non-negative");
    require_finite(omega_grid.stop, "omega-max");
    require(omega_grid.stop >= omega_grid.start, "omega-max", "must not be below omega-min");
    require_positive(omega_grid.step, "omega-step");
    require_finite(g_grid.start, "g-min");
    require_finite(g_grid.stop, "g-max");
    require(g_grid.stop >= g_grid.start, "g-max", "must not be below g-min");
    require_positive(g_grid.step, "g-step");
    require_positive(horizon, "horizon");
    require_positive(amplitude_threshold, "amplitude-threshold");
    require_positive(t_eval, "t-eval");
    if (rtol) {
        require_positive(*rtol, "rtol");
    }
    if (atol) {
        require_positive(*atol, "atol");
    }
    require_positive(oracle_tolerance, "oracle-tolerance");
    require(spectrum_cap >= 1, "spectrum-cap", "must be at least 1");
    require(!output.empty(), "output", "must not be empty");

    if (mode == Mode::OracleCheck) {
        for (int n : emitter_counts()) {
            require(n <= 4, "n-emitters", "oracle-check supports N <= 4");
        }
    }
    if (mode == Mode::GapScaling) {
        for (int n : emitter_counts()) {
            require(n <= spectrum_cap, "n-list", "N exceeds spectrum-cap");
        }
    }
    if (mode == Mode::MeanField || mode == Mode::Fluctuations) {
        require(Eigen::Vector3d(mx0, my0, mz0).norm() > 0.0, "mz0",
                "initial magnetization must be non-zero");
    }
}

ParsedCommand parse_command_line(int argc, const char* const* argv, std::ostream& out,
                                 std::ostream& err) {
    ParsedCommand result;
    RunConfig& c = result.config;
    std::string mode_key;
    std::vector<std::string> n_tokens;
    double rtol = 0.0;
    double atol = 0.0;
    result.config_dir = WGFB_DEFAULT_CONFIG_DIR;

    CLI::App app{"Collective-emitter feedback simulations", "wgfb"};
    app.set_config("--config", "", "Config file of key = value pairs", false);
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.fallthrough();
    app.require_subcommand(1, 1);
    add_run_options(app, c, mode_key, n_tokens, rtol, atol);

    std::vector<std::pair<CLI::App*, Mode>> mode_commands;
    for (const ModeEntry& e : kModes) {
        mode_commands.emplace_back(app.add_subcommand(std::string(e.name), std::string(e.help)), e.mode);
    }
    app.add_subcommand("run", "Run the mode named by the 'mode' key");
    CLI::App* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite");
    verify_cmd->add_option("--config-dir", result.config_dir, "Directory of fixture configs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        result.kind = ParsedCommand::Kind::Exit;
        result.exit_code = code == 0 ? kExitOk : kExitValidation;
        return result;
    }

    if (verify_cmd->parsed()) {
        result.kind = ParsedCommand::Kind::Verify;
        return result;
    }

    try {
        std::optional<Mode> chosen;
        for (const auto& [cmd, mode] : mode_commands) {
            if (cmd->parsed()) {
                chosen = mode;
            }
        }
        if (!mode_key.empty()) {
            const auto from_key = parse_mode(mode_key);
            require(from_key.has_value(), "mode", "unknown mode '" + mode_key + "'");
            require(!chosen || *chosen == *from_key, "mode",
                    "'" + mode_key + "' conflicts with subcommand");
            chosen = from_key;
        }
        require(chosen.has_value(), "mode", "'run' needs a mode key");
        c.mode = *chosen;
        c.n_list = expand_n_list(n_tokens);
        if (app.count("--rtol") > 0) {
            c.rtol = rtol;
        }
        if (app.count("--atol") > 0) {
            c.atol = atol;
        }
        c.validate();
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << '\n';
        result.kind = ParsedCommand::Kind::Exit;
        result.exit_code = kExitValidation;
        return result;
    }
    result.kind = ParsedCommand::Kind::Run;
    return result;
}

RunConfig load_config(const std::filesystem::path& path) {
    const std::string path_str = path.string();
    const char* argv[] = {"wgfb", "run", "--config", path_str.c_str()};
    std::ostringstream out;
    std::ostringstream err;
    ParsedCommand parsed = parse_command_line(4, argv, out, err);
    if (parsed.kind != ParsedCommand::Kind::Run) {
        throw InvalidParameter("config " + path_str + ": " + err.str());
    }
    return parsed.config;
}

std::string RunSummary::line() const {
    std::ostringstream s;
    s << "mode=" << mode_name(mode) << " points=" << points << " failures=" << failures;
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", wall_seconds);
    s << " wall=" << wall << "s";
    if (!note.empty()) {
        s << ' ' << note;
    }
    return s.str();
}

RunSummary run(const RunConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    switch (config.mode) {
        case Mode::MeanField: outcome = run_meanfield(config); break;
        case Mode::FiniteN: outcome = run_finite_n(config); break;
        case Mode::Fluctuations: outcome = run_fluctuations(config); break;
        case Mode::PhaseDiagram: outcome = run_phase_diagram(config); break;
        case Mode::GapScaling: outcome = run_gap_scaling(config); break;
        case Mode::SqueezingLandscape: outcome = run_landscape(config); break;
        case Mode::OracleCheck: outcome = run_oracle_check(config); break;
    }
    RunSummary summary;
    summary.mode = config.mode;
    summary.points = outcome.points;
    summary.failures = outcome.errors.size();
    summary.note = outcome.note;
    summary.passed = outcome.passed;
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_meta(config, summary, outcome.errors);
    return summary;
}

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

}  // namespace wgfb
