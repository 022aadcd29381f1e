#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpl/config.hpp"
#include "fpl/extremal.hpp"
#include "fpl/norm_checks.hpp"
#include "fpl/solver.hpp"

namespace fpl::app {

enum ExitCode : int
{
  kSuccess = 0,
  kConfigError = 2,
  kConvergenceFailure = 3,
  kGateViolation = 4,
};

struct RunOptions
{
  std::string subcommand;                 ///< solve, extremal, verify, sweep, check-norms
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;     ///< key=value, applied after the file
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string format = "json";            ///< json or csv
};

/// Schedule exponent used by the extremal subcommands when n_max_exp is not set.
inline constexpr int kExtremalMaxExponent = 22;

/// Runs one subcommand and writes its artifact to `out`. Errors become a structured record and an exit code.
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

Config assemble_config(const RunOptions& options);

nlohmann::json to_json(const SolveReport& report, bool include_fields = true);
nlohmann::json to_json(const ExtremalReport& report);
nlohmann::json to_json(const InequalityVerdict& verdict);
nlohmann::json to_json(const NormCheckReport& report);
nlohmann::json to_json(const Field& field);
nlohmann::json mesh_summary(const Mesh& mesh);

void write_history_csv(std::ostream& os, const SolveReport& report);
void write_verdict_csv(std::ostream& os, const InequalityVerdict& verdict);

struct SweepRow
{
  double p = 0.0;
  double delta = 0.0;
  std::optional<double> nu;
  std::string norm;
  double mu_formula = 0.0;
  double mu_direct = 0.0;
  double rel_gap = 0.0;
  bool converged = false;
  std::string error;
};

/// Grid over sweep_p x sweep_delta x sweep_nu x sweep_norm, run on up to `jobs` threads, rows in grid order.
std::vector<SweepRow> run_sweep(const Config& config, int jobs);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

} // namespace fpl::app
