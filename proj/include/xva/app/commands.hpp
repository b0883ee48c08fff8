#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace xva::app {

/// Stable process exit codes.
enum ExitCode : int {
    kOk = 0,
    kVerifyFailed = 1,
    kValidation = 2,
    kInvalidPaths = 3,
    kNumerical = 4,
};

struct CommandOptions {
    std::string config_path;
    std::string out_dir = "out";
    int threads = 0;
    std::optional<std::uint64_t> seed;
    std::string compare_path; // verify only
};

int cmd_simulate(const CommandOptions& options);
int cmd_defaults(const CommandOptions& options);
int cmd_solve(const CommandOptions& options);
int cmd_price(const CommandOptions& options);
int cmd_verify(const CommandOptions& options);

/// Dispatches by name; unknown names give kValidation.
int run_command(const std::string& name, const CommandOptions& options);

} // namespace xva::app
