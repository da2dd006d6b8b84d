#pragma once

#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "jsaforge_cli/config.hpp"

namespace jsaforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;

struct CommandOptions {
    std::filesystem::path out_dir = ".";
    unsigned threads = 1;
};

struct CommandResult {
    std::vector<std::filesystem::path> files;
    std::string summary;  // printed to stdout by the tool
};

std::vector<std::string> command_names();

CommandResult cmd_pm_curve(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_sfg_map(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_reconstruct(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_pump_sweep(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_pair_rate(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_calibrate(const RunConfig& config, const CommandOptions& options);

// Dispatches on config.command().
CommandResult run_command(const RunConfig& config, const CommandOptions& options);

// 1 for usage/config/parse errors, 2 for computation-domain errors.
int exit_code_for(const std::exception& error);

// Full command-line entry point used by the jsaforge executable.
int run_cli(int argc, char** argv);

}  // namespace jsaforge::cli
