#pragma once

// Subcommand dispatch and the result record.

#include <iosfwd>
#include <optional>
#include <string>

#include "specflow/cli/config.hpp"

namespace specflow::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kFailure = 1, kSchema = 2, kUnstable = 3 };

struct ResultRecord {
  std::string subcommand;
  json inputs = json::object();       // the validated config
  json input_files = json::object();  // key -> {path, fnv1a}
  std::string config_hash;
  json outputs = json::object();
  bool stable = true;
  std::optional<json> error;
  double wall_time_s = 0.0;

  json to_json() const;
};

struct RunOutcome {
  ResultRecord record;
  int exit_code = kOk;
};

/// Validates and runs one experiment. Schema problems give exit 2 with an
/// error entry; numerical failures give exit 3 with the outputs reached so far;
/// a false stability flag also gives exit 3.
RunOutcome run(const json& config);

/// run() plus output: the record goes to stdout (compact with "json": true)
/// and to the "out" path when given; diagnostics go to err.
int run_and_report(const json& config, std::ostream& out, std::ostream& err);

}  // namespace specflow::cli
