#pragma once

// Command-line front end. Every subcommand is a plain function of a JobConfig
// writing to caller-supplied streams, so the whole surface can be driven from
// tests without spawning processes.

#include "qsink/entanglement.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qsink::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNoLifetime = 2,
  kExitValidation = 3,
};

enum class InitialState { max_entangled, optimal, custom };
enum class OutputFormat { csv, json };

struct JobConfig {
  ChannelParams line1;
  ChannelParams line2;
  /// Search horizon for `lifetime`, trajectory length for `evolve`. When
  /// unset: 1e3 / (sum of rates) and 2 tau respectively.
  std::optional<double> t_max;
  int steps = 201;
  InitialState initial_state = InitialState::optimal;
  std::optional<ComplexMatrix> custom_state;
  std::string output_path; ///< empty: standard output
  OutputFormat format = OutputFormat::csv;
  /// Evaluation time for `sinkhorn`.
  std::optional<double> time;

  /// Throws std::invalid_argument on any violated constraint.
  void validate() const;
};

/// Reads the keys documented in the README; unknown keys are rejected.
JobConfig config_from_json(const nlohmann::json& j);
JobConfig load_config_file(const std::string& path);

/// 17 significant digits, '.' decimal separator.
std::string format_number(double x);

int cmd_lifetime(const JobConfig& config, std::ostream& out, std::ostream& err);
int cmd_optimal_state(const JobConfig& config, std::ostream& out, std::ostream& err);
int cmd_evolve(const JobConfig& config, std::ostream& out, std::ostream& err);
int cmd_sinkhorn(const JobConfig& config, std::ostream& out, std::ostream& err);

/// Runs the oracle cross-check suites. `dense` widens the parameter grid.
int cmd_validate(bool dense, std::ostream& out, std::ostream& err);

/// Full argv dispatch, including option parsing.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qsink::cli
