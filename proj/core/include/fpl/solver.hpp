#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fpl/error.hpp"
#include "fpl/expression.hpp"
#include "fpl/finsler.hpp"
#include "fpl/mesh.hpp"
#include "fpl/weights.hpp"

namespace fpl {

/// -F_{p,w} u = f u^{-delta} + g u^{-gamma}
struct MixedSingular
{
  double delta = 0.5;
  double gamma = 0.5;
  Expression f{1.0};
  Expression g{0.0};
};

/// -F_{p,w} u = h e^{1/u}
struct ExponentialSingular
{
  Expression h{1.0};
};

using ProblemKind = std::variant<MixedSingular, ExponentialSingular>;

/// n = 2^k, k = 0..max_exponent
std::vector<long long> geometric_schedule(int max_exponent);

struct SolverOptions
{
  std::vector<long long> n_schedule = geometric_schedule(10);
  double inner_tol = 1e-8;  ///< max_i |dI/du_i| / lumped mass_i
  double outer_tol = 1e-6;  ///< sup-norm change between consecutive n
  int max_inner_iters = 50000;
  double picard_theta = 0.5;
  int max_picard_iters = 500;
  int inequality_tests = 16; ///< random test fields for the minimizer inequality
  std::uint64_t seed = 1;
};

struct ProblemSpec
{
  DomainSpec domain = DomainSpec::square(32);
  FinslerNorm norm = FinslerNorm::euclidean();
  double p = 2.0;
  WeightSpec weight = WeightSpec::constant(1.0);
  ProblemKind kind = MixedSingular{};
  SolverOptions options;
  std::optional<double> critical_r; ///< r > p of the critical-regime threshold; defaults to 2p

  bool is_mixed() const noexcept { return std::holds_alternative<MixedSingular>(kind); }
  const MixedSingular& mixed() const { return std::get<MixedSingular>(kind); }
  const ExponentialSingular& exponential() const { return std::get<ExponentialSingular>(kind); }

  /// Builds the flux parameters; throws GateViolation on the p-gate.
  FluxParams flux_params() const { return FluxParams(norm, p); }

  /**
   * Checks every parameter gate that does not need a mesh: p-gate, s in I,
   * delta and gamma in (0,1), schedule strictly increasing, tolerances positive.
   */
  void validate() const;
};

/// Diagnostics of one inner minimization.
struct MinimizeResult
{
  Field field;
  int iterations = 0;
  double stationarity = 0.0;
  double energy = 0.0;
  std::vector<double> energy_history{};
  std::vector<double> energy_slack{};
  double min_nodal = 0.0;
  /// max over random test fields of (lhs - rhs) / max(|lhs|, |rhs|) in the minimizer inequality
  double inequality_violation = 0.0;
};

struct IterateRecord
{
  long long n = 0;
  Field field;
  double norm = 0.0;          ///< (sum_T area w F(grad u)^p)^{1/p}
  double sup = 0.0;
  double min_interior = 0.0;  ///< min over vertices of the centered quarter-area region
  int inner_iterations = 0;
  int picard_iterations = 0;
  double energy = 0.0;
  double stationarity = 0.0;
  double min_nodal = 0.0;
  double inequality_violation = 0.0;
  double step_violation = 0.0; ///< max_i (u_prev - u_n)_i^+
  double sup_change = 0.0;     ///< max_i |u_n - u_prev|_i
};

struct SolveReport
{
  std::string kind; ///< "mixed" or "exponential"
  std::vector<IterateRecord> history;
  bool converged = false;
  double monotonicity_violation = 0.0; ///< max over steps of step_violation
  double norm_violation = 0.0;         ///< max over steps of (||u_n|| - ||u_{n+1}||)^+

  const Field& final_field() const;
};

/// A solve that stopped early. The partial report holds every completed n.
class SolveFailure : public ConvergenceFailure
{
public:
  SolveFailure(const std::string& what, const ConvergenceFailure& cause, SolveReport partial)
    : ConvergenceFailure(what, cause.last_iterate(), cause.residual()), partial_(std::move(partial))
  {}

  const SolveReport& partial() const noexcept { return partial_; }

private:
  SolveReport partial_;
};

/// Approximating energy I_n(v) = (1/p)||v||^p - sum area f_n G_n(v_b) - sum area g_n H_n(v_b).
double energy_In(const Field& v, const ProblemSpec& spec, long long n);

/// G_n(t) = (t^+ + 1/n)^{1-e}/(1-e) - (1/n)^{-e} t^-, the primitive used for both singular terms.
double regularized_primitive(double t, double exponent, long long n);
/// G_n'(t): (t + 1/n)^{-e} for t >= 0, n^e for t < 0.
double regularized_derivative(double t, double exponent, long long n);

/**
 * Minimizes I_n from `initial` (zero boundary) by descent. Throws ConvergenceFailure
 * when the stationarity tolerance is not met within max_inner_iters.
 */
MinimizeResult minimize_In(const ProblemSpec& spec, long long n, const Field& initial);

/// Monotone n-loop for the mixed problem. Throws SolveFailure, GateViolation or InputError.
SolveReport solve_mixed(const ProblemSpec& spec);

/// Monotone n-loop for the exponential problem, each n by damped Picard iteration.
SolveReport solve_exponential(const ProblemSpec& spec);

/// Dispatches on spec.kind.
SolveReport solve(const ProblemSpec& spec);

struct LevelSetRow
{
  double level;
  double measure; ///< total area of triangles whose barycenter value is >= level
};

/// |A(k)| for k = 0 and k = k0 2^j, k0 = sup/16, j = 0..5 (the last level exceeds sup).
std::vector<LevelSetRow> stampacchia_diagnostic(const SolveReport& report);
std::vector<LevelSetRow> level_set_measures(const Field& field, const std::vector<double>& levels);

} // namespace fpl
