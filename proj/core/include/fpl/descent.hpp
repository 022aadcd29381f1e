#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fpl {

/// Objective value plus a magnitude scale used to size the round-off slack of the Armijo test.
struct Evaluation
{
  double value = 0.0;
  double magnitude = 0.0;
};

/// Evaluates the objective at x and writes its gradient into grad.
using Objective = std::function<Evaluation(std::span<const double> x, std::span<double> grad)>;

struct DescentOptions
{
  double tolerance = 1e-8;   ///< on max_i |grad_i| / metric_i
  int max_iterations = 50000;
  double armijo = 1e-4;
  int max_backtracks = 60;
  bool record_history = true;
  /// Called after every accepted step; may rescale x in place (used for scale-invariant objectives).
  std::function<void(std::span<double> x)> post_step;
};

struct DescentResult
{
  std::vector<double> x;
  double value = 0.0;
  double stationarity = 0.0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
  std::vector<double> history; ///< objective after each accepted step, starting with the initial value
  std::vector<double> slack;   ///< round-off allowance used for each accepted step
};

/**
 * Gradient descent in the diagonal metric `metric` (a lumped mass matrix),
 * with Barzilai-Borwein step proposals safeguarded by Armijo backtracking.
 *
 * Accepted steps never increase the objective by more than a round-off slack
 * of a few ulps of `magnitude`; this is what lets the iteration reach
 * stationarity tolerances below the resolution of the objective itself.
 */
DescentResult minimize_bb(const Objective& objective, std::vector<double> x0, std::span<const double> metric,
                          const DescentOptions& options);

/// max_i |grad_i| / metric_i
double stationarity(std::span<const double> grad, std::span<const double> metric);

} // namespace fpl
