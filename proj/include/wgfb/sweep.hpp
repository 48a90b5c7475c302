#pragma once

// Configuration-driven runs and CSV emission.
//
// A RunConfig comes from a key = value (TOML subset) file plus command-line
// overrides whose flag names mirror the keys. Every mode writes one CSV with
// a fixed header; floats use 17 significant digits so values round-trip.
// Run metadata (wall time, thread count) goes to a `.meta` sidecar so the
// CSV itself depends only on the configuration.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "wgfb/ode.hpp"
#include "wgfb/params.hpp"

namespace wgfb {

enum class Mode {
    MeanField,
    FiniteN,
    Fluctuations,
    PhaseDiagram,
    GapScaling,
    SqueezingLandscape,
    OracleCheck,
};

[[nodiscard]] std::string_view mode_name(Mode mode) noexcept;
[[nodiscard]] std::optional<Mode> parse_mode(std::string_view name) noexcept;
[[nodiscard]] const std::vector<Mode>& all_modes();

/// Inclusive uniform range; values are start + k * step.
struct GridRange {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    [[nodiscard]] std::vector<double> values() const;
};

struct RunConfig {
    Mode mode = Mode::MeanField;
    SystemParams params{};  ///< physical units; CSV columns use omega / gamma_total

    int n_emitters = 10;
    std::vector<int> n_list;  ///< overrides n_emitters when non-empty
    bool steady_state = false;  ///< finite-n: one stationary row per N

    double t_max = 100.0;
    double dt = 0.1;
    int output_stride = 1;
    double mx0 = 0.0, my0 = 0.0, mz0 = -0.5;

    GridRange omega_grid{0.0, 1.2, 0.05};
    GridRange g_grid{-2.0, 1.0, 0.05};
    double horizon = 500.0;
    double amplitude_threshold = 1e-3;
    double t_eval = 100.0;

    std::optional<double> rtol;  ///< unset: the mode's default tolerance
    std::optional<double> atol;
    double oracle_tolerance = 1e-8;
    int spectrum_cap = 80;

    std::filesystem::path output = "out.csv";
    unsigned threads = 0;

    /// Throws InvalidParameter naming the offending key.
    void validate() const;

    [[nodiscard]] std::vector<int> emitter_counts() const;
};

/// Outcome of argument parsing: either a config to run, or an exit code to
/// return immediately (help, parse errors).
struct ParsedCommand {
    enum class Kind { Run, Verify, Exit };
    Kind kind = Kind::Exit;
    RunConfig config;
    int exit_code = 0;
    std::filesystem::path config_dir;  ///< verify: location of fixture configs
};

/// Parses `wgfb <mode|run|verify> [--config file] [--key value ...]`.
/// Messages for help and errors go to `out` / `err`.
[[nodiscard]] ParsedCommand parse_command_line(int argc, const char* const* argv,
                                               std::ostream& out, std::ostream& err);

/// Loads a fixture config file (whose `mode` key selects the mode).
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

struct RunSummary {
    Mode mode = Mode::MeanField;
    std::size_t points = 0;
    std::size_t failures = 0;
    double wall_seconds = 0.0;
    std::string note;   ///< mode-specific, e.g. fitted slope
    bool passed = true; ///< oracle-check verdict; true otherwise

    [[nodiscard]] std::string line() const;
};

/// Runs a validated config and writes the CSV (plus sidecars). Throws
/// ComputationError when every point of a sweep fails.
RunSummary run(const RunConfig& config);

/// Formats with "%.17g"; NaN and infinities as nan / inf / -inf.
[[nodiscard]] std::string format_double(double value);

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitComputation = 2;

}  // namespace wgfb
