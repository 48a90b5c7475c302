#include <cstdio>
#include <exception>
#include <iostream>

#include "wgfb/errors.hpp"
#include "wgfb/sweep.hpp"
#include "wgfb/verify.hpp"

int main(int argc, char** argv) {
    using namespace wgfb;
    const ParsedCommand cmd = parse_command_line(argc, argv, std::cout, std::cerr);
    if (cmd.kind == ParsedCommand::Kind::Exit) {
        return cmd.exit_code;
    }
    try {
        if (cmd.kind == ParsedCommand::Kind::Verify) {
            VerifyOptions options;
            options.config_dir = cmd.config_dir;
            options.threads = cmd.config.threads;
            bool all_passed = true;
            (void)run_acceptance(options, [&](const CriterionResult& r) {
                std::cout << format_result(r) << std::endl;
                all_passed = all_passed && r.passed;
            });
            return all_passed ? kExitOk : kExitComputation;
        }
        const RunSummary summary = run(cmd.config);
        std::cout << summary.line() << '\n';
        return summary.passed ? kExitOk : kExitComputation;
    } catch (const InvalidParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "computation failed: " << e.what() << '\n';
        return kExitComputation;
    }
}
