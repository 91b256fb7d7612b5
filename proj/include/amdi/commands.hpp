#pragma once

#include <string>

#include "amdi/config.hpp"

namespace amdi {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitEstimation = 3;

struct CommandOutput {
  std::string content;  // JSON document or CSV table
  int exit_code = kExitOk;
};

CommandOutput cmd_rate(const RunConfig& cfg);
CommandOutput cmd_optimize(const RunConfig& cfg);
CommandOutput cmd_sweep(const RunConfig& cfg);
CommandOutput cmd_compare(const RunConfig& cfg);
CommandOutput cmd_mc_validate(const RunConfig& cfg);

// Hybrid over baseline; "inf" when only the baseline vanishes.
double rate_ratio(double hybrid, double baseline);

} // namespace amdi
