#pragma once

#include <string>
#include <vector>

#include "levymc/json_io.hpp"

namespace levymc {

struct CommandOutput {
  int code = 0;
  std::string out;
  std::string err;
};

// Full CLI entry point: args as they would follow the binary name.
// Exit codes: 0 ok, 1 verify failure, 2 config error, 3 runtime error.
CommandOutput run_command(const std::vector<std::string>& args);

// Command bodies, reusable in-process (the binary main is a thin wrapper).
std::string cmd_estimate(const ExperimentConfig& cfg, int workers);
std::string cmd_rates(const ExperimentConfig& cfg, int workers);
std::string cmd_levels(const ExperimentConfig& cfg, int workers);

struct VerifyOutcome {
  bool ok = true;
  std::string report;
};
VerifyOutcome cmd_verify(const ExperimentConfig& cfg, int workers);

}  // namespace levymc
