#pragma once

#include <iosfwd>

#include <nlohmann/json.hpp>

#include "job_config.hpp"

namespace conicvol::cli {

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kConfigError = 2,
  kInfeasible = 3,
  kToleranceFailure = 4,
};

struct RunResult {
  int exit_code = kOk;
  nlohmann::json report;
  // Set for sweep without an output directory: the CSV goes to stdout.
  std::string stdout_text;
};

/// Runs one job. Library errors are mapped onto exit codes and reported in
/// the JSON document under "error".
RunResult run(const JobConfig& config);

/// run() plus printing: the JSON report (or sweep CSV) to `out`, errors to
/// `err`. Returns the exit code.
int run_and_print(const JobConfig& config, std::ostream& out, std::ostream& err);

}  // namespace conicvol::cli
