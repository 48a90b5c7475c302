#pragma once

// End-to-end acceptance checks. Each check computes its reference values
// independently (closed forms, the tensor-product oracle, or a second
// numerical route) and reports one pass/fail line.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace wgfb {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::filesystem::path config_dir;   ///< fixture configs for the determinism check
    std::filesystem::path scratch_dir;  ///< where reruns write their CSVs
    unsigned threads = 0;
    std::vector<int> only;              ///< criterion ids to run; empty = all
};

/// "[PASS] 4 gap-scaling (12.3 s): ..." style line.
[[nodiscard]] std::string format_result(const CriterionResult& r);

/// Runs the selected criteria in order, calling `report` after each one.
std::vector<CriterionResult> run_acceptance(
    const VerifyOptions& options,
    const std::function<void(const CriterionResult&)>& report = {});

}  // namespace wgfb
