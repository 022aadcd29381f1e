#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fpl/mesh.hpp"
#include "fpl/solver.hpp"

namespace fpl {

/// R(v) = ||v||^p / (sum_T area f |v_b|^{1-delta})^{p/(1-delta)}. Throws DomainError on a zero denominator.
double rayleigh_quotient(const Field& v, const ProblemSpec& spec);

/// sum_T area f |v_b|^{1-delta}
double constraint_integral(const Field& v, const ProblemSpec& spec);

/// Checks for the extremal route: mixed kind, g vanishing at every barycenter.
void require_extremal_spec(const ProblemSpec& spec);

struct FormulaResult
{
  double mu = 0.0;           ///< ||u||^{p(1-delta-p)/(1-delta)}
  double norm_p = 0.0;       ///< ||u||^p
  double load = 0.0;         ///< sum_T area f u_b^{1-delta}
  double useful_residual = 0.0; ///< |norm_p - load| / norm_p
};

/// Closed-form constant from a converged solve with g = 0. Refuses (InputError) a non-converged report.
FormulaResult mu_from_formula(const SolveReport& report, const ProblemSpec& spec);

struct Extremal
{
  Field field;          ///< V = zeta u
  double zeta = 0.0;    ///< (sum_T area f u_b^{1-delta})^{-1/(1-delta)}
  double normalization_residual = 0.0; ///< |sum_T area f V_b^{1-delta} - 1|
  double pde_residual = 0.0; ///< max_i |d/dV_i ((1/p)||V||^p - mu/(1-delta) int f V^{1-delta})| / mass_i
};

/// V = zeta u from a converged solve; the residual is measured against `mu`.
Extremal build_extremal(const SolveReport& report, const ProblemSpec& spec, double mu);

struct DirectResult
{
  Field field;              ///< minimizer rescaled so that constraint_integral = 1
  double mu = 0.0;
  double constraint_residual = 0.0;
  int best_start = -1;      ///< index of the winning start; restarts index the warm start
  std::vector<double> start_values{};
  std::vector<bool> start_converged{};
  int failed_starts = 0;    ///< starts whose line search broke down
};

/**
 * Minimizes log R over zero-boundary fields from `restarts` smoothed random
 * starts (seeds seed + k) plus the optional warm start, by the descent used in
 * the solver. Throws ConvergenceFailure when every start fails its line search.
 */
DirectResult mu_direct(const ProblemSpec& spec, MeshPtr mesh, int restarts, std::uint64_t seed,
                       const std::optional<Field>& warm_start = std::nullopt);

struct TrialRecord
{
  int trial = 0;
  long long seed = 0;  ///< -1 for the extremal
  double lhs = 0.0;    ///< C (int |v|^{1-delta} f)^{p/(1-delta)}
  double rhs = 0.0;    ///< ||v||^p
  bool violated = false;
};

struct InequalityVerdict
{
  double constant = 0.0;
  int trials = 0;
  int violations = 0;
  std::optional<int> witness_trial; ///< first violating record by trial index
  bool witness_is_extremal = false;
  std::optional<Field> witness;
  std::vector<TrialRecord> records;
};

/// Tests C (int |v|^{1-delta} f)^{p/(1-delta)} <= ||v||^p on `trials` random fields, then on `extremal` if given.
InequalityVerdict verify_inequality(double constant, const ProblemSpec& spec, MeshPtr mesh, int trials,
                                    std::uint64_t seed, const std::optional<Field>& extremal = std::nullopt);

struct ExtremalReport
{
  SolveReport solve;
  FormulaResult formula;
  DirectResult direct;
  Extremal extremal;
  double mu_formula = 0.0;
  double mu_direct = 0.0;
  double rel_gap = 0.0;          ///< |mu_formula - mu_direct| / mu_direct
  double sobolev_constant = 0.0; ///< mu^{1/p} with mu = mu_direct
  double extremal_quotient = 0.0; ///< R(V)
  InequalityVerdict below{};     ///< C = 0.99 mu_direct
  InequalityVerdict above{};     ///< C = 1.05 mu_direct
};

struct ExtremalOptions
{
  int restarts = 8;
  int trials = 1000;
};

/// Full pipeline: solve with g = 0, formula, extremal, direct minimization, both canonical inequality checks.
ExtremalReport compute_extremal(ProblemSpec spec, const ExtremalOptions& options = {});

} // namespace fpl
