#include "fpl/extremal.hpp"

#include "fpl/descent.hpp"
#include "fpl/energy_form.hpp"
#include "fpl/random_fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fpl {

namespace {

double delta_of(const ProblemSpec& spec)
{
  return spec.mixed().delta;
}

/// Numerator, constraint integral and log-quotient gradient on one mesh.
class Quotient
{
public:
  Quotient(const ProblemSpec& spec, MeshPtr mesh)
    : form_(std::move(mesh), spec.flux_params(), spec.weight), delta_(delta_of(spec))
  {
    f_ = form_.sample(spec.mixed().f);
    for (double v : f_)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw InputError("data f must be finite and nonnegative at every quadrature node");
  }

  const EnergyForm& form() const { return form_; }
  double delta() const { return delta_; }
  const std::vector<double>& f() const { return f_; }

  double constraint(std::span<const double> nodal) const
  {
    const auto ub = form_.barycenter_values(nodal);
    const auto& areas = form_.mesh().areas();
    double d = 0.0;
    for (std::size_t t = 0; t < ub.size(); ++t)
      if (f_[t] != 0.0 && ub[t] != 0.0)
        d += areas[t] * f_[t] * std::pow(std::abs(ub[t]), 1.0 - delta_);
    return d;
  }

  /// log R and its gradient on free unknowns.
  Evaluation log_quotient(std::span<const double> x, std::span<double> grad) const
  {
    const double p = form_.p();
    std::fill(grad.begin(), grad.end(), 0.0);
    const auto nodal = form_.expand(x);
    const double e = form_.dirichlet_with_gradient(nodal, grad);
    const double d = constraint(nodal);
    if (!(e > 0.0) || !(d > 0.0))
      return {std::numeric_limits<double>::infinity(), 0.0};
    for (double& g : grad)
      g *= p / e;
    const auto ub = form_.barycenter_values(nodal);
    std::vector<double> s(ub.size(), 0.0);
    for (std::size_t t = 0; t < ub.size(); ++t)
      if (f_[t] != 0.0 && ub[t] != 0.0)
        s[t] = -p * f_[t] * std::pow(std::abs(ub[t]), -delta_) * (ub[t] > 0.0 ? 1.0 : -1.0) / d;
    form_.add_barycentric_load(s, grad);
    const double le = std::log(e);
    const double ld = p / (1.0 - delta_) * std::log(d);
    return {le - ld, std::abs(le) + std::abs(ld)};
  }

private:
  EnergyForm form_;
  double delta_;
  std::vector<double> f_;
};

std::string describe_last(const SolveReport& report)
{
  std::ostringstream os;
  if (report.history.empty())
    os << "no iterates";
  else
    os << "last sup change " << report.history.back().sup_change << " at n = " << report.history.back().n;
  return os.str();
}

void require_converged(const SolveReport& report, const char* who)
{
  if (report.history.empty())
    throw InputError(std::string(who) + ": empty solve report");
  if (!report.converged)
    throw ConvergenceFailure(std::string(who) + ": solve report did not converge (" + describe_last(report) +
                                 "); raise n_max_exp",
                             report.final_field().values(), report.history.back().sup_change);
}

} // namespace

void require_extremal_spec(const ProblemSpec& spec)
{
  if (!spec.is_mixed())
    throw InputError("the extremal route needs a mixed singular problem");
  const EnergyForm form(Mesh::build(spec.domain), spec.flux_params(), spec.weight);
  for (double v : form.sample(spec.mixed().g))
    if (v != 0.0)
      throw InputError("the extremal route needs g = 0");
}

double constraint_integral(const Field& v, const ProblemSpec& spec)
{
  const Quotient q(spec, v.mesh_ptr());
  return q.constraint(v.values());
}

double rayleigh_quotient(const Field& v, const ProblemSpec& spec)
{
  const Quotient q(spec, v.mesh_ptr());
  const double d = q.constraint(v.values());
  if (!(d > 0.0))
    throw DomainError("rayleigh_quotient: field vanishes on the support of f");
  const double e = q.form().dirichlet(v.values());
  return e / std::pow(d, q.form().p() / (1.0 - q.delta()));
}

FormulaResult mu_from_formula(const SolveReport& report, const ProblemSpec& spec)
{
  require_converged(report, "mu_from_formula");
  const Field& u = report.final_field();
  const Quotient q(spec, u.mesh_ptr());
  const double p = q.form().p();
  const double delta = q.delta();
  FormulaResult r;
  r.norm_p = q.form().dirichlet(u.values());
  r.load = q.constraint(u.values());
  if (!(r.norm_p > 0.0))
    throw DomainError("mu_from_formula: solution has zero energy");
  r.mu = std::pow(r.norm_p, (1.0 - delta - p) / (1.0 - delta));
  r.useful_residual = std::abs(r.norm_p - r.load) / r.norm_p;
  return r;
}

Extremal build_extremal(const SolveReport& report, const ProblemSpec& spec, double mu)
{
  require_converged(report, "build_extremal");
  const Field& u = report.final_field();
  const Quotient q(spec, u.mesh_ptr());
  const double delta = q.delta();
  const double load = q.constraint(u.values());
  if (!(load > 0.0))
    throw DomainError("build_extremal: solution vanishes on the support of f");

  Extremal ex{u.scaled(std::pow(load, -1.0 / (1.0 - delta)))};
  ex.zeta = std::pow(load, -1.0 / (1.0 - delta));
  ex.normalization_residual = std::abs(q.constraint(ex.field.values()) - 1.0);

  const auto& form = q.form();
  std::vector<double> grad(form.num_free(), 0.0);
  form.dirichlet_with_gradient(ex.field.values(), grad);
  const auto vb = form.barycenter_values(ex.field.values());
  std::vector<double> s(vb.size(), 0.0);
  for (std::size_t t = 0; t < vb.size(); ++t)
    if (q.f()[t] != 0.0 && vb[t] > 0.0)
      s[t] = -mu * q.f()[t] * std::pow(vb[t], -delta);
  form.add_barycentric_load(s, grad);
  ex.pde_residual = stationarity(grad, form.free_mass());
  return ex;
}

DirectResult mu_direct(const ProblemSpec& spec, MeshPtr mesh, int restarts, std::uint64_t seed,
                       const std::optional<Field>& warm_start)
{
  if (restarts < 1)
    throw InputError("mu_direct: restarts must be >= 1");
  const Quotient q(spec, mesh);
  const auto& form = q.form();
  const double delta = q.delta();

  auto normalize = [&](std::span<double> x) {
    const double d = q.constraint(form.expand(x));
    if (d > 0.0) {
      const double c = std::pow(d, -1.0 / (1.0 - delta));
      for (double& v : x)
        v *= c;
    }
  };
  DescentOptions opt;
  opt.tolerance = spec.options.inner_tol;
  opt.max_iterations = spec.options.max_inner_iters;
  opt.record_history = false;
  opt.post_step = normalize;
  auto objective = [&q](std::span<const double> x, std::span<double> g) { return q.log_quotient(x, g); };

  DirectResult out{Field::zeros(mesh)};
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  const int starts = restarts + (warm_start ? 1 : 0);
  for (int k = 0; k < starts; ++k) {
    std::vector<double> x0 = k < restarts
                                 ? form.restrict_to_free(smoothed_random_field(mesh, seed + k).values())
                                 : form.restrict_to_free(warm_start->values());
    normalize(x0);
    DescentResult r;
    try {
      r = minimize_bb(objective, std::move(x0), form.free_mass(), opt);
    } catch (const DomainError&) {
      out.start_values.push_back(std::numeric_limits<double>::infinity());
      out.start_converged.push_back(false);
      ++out.failed_starts;
      continue;
    }
    const double value = std::exp(r.value);
    out.start_values.push_back(value);
    out.start_converged.push_back(r.converged);
    if (r.line_search_failed)
      ++out.failed_starts;
    if (value < best) {
      best = value;
      best_x = std::move(r.x);
      out.best_start = k;
    }
  }
  if (out.failed_starts == starts || best_x.empty())
    throw ConvergenceFailure("mu_direct: every start failed its line search", {}, best);

  normalize(best_x);
  out.field = form.to_field(best_x);
  out.mu = rayleigh_quotient(out.field, spec);
  out.constraint_residual = std::abs(q.constraint(out.field.values()) - 1.0);
  return out;
}

InequalityVerdict verify_inequality(double constant, const ProblemSpec& spec, MeshPtr mesh, int trials,
                                    std::uint64_t seed, const std::optional<Field>& extremal)
{
  if (trials < 1)
    throw InputError("verify_inequality: trials must be >= 1");
  const Quotient q(spec, mesh);
  const double expo = q.form().p() / (1.0 - q.delta());

  InequalityVerdict v;
  v.constant = constant;
  v.trials = trials;
  auto check = [&](const Field& field, int trial, long long s) {
    TrialRecord rec{trial, s};
    const double d = q.constraint(field.values());
    rec.lhs = d > 0.0 ? constant * std::pow(d, expo) : 0.0;
    rec.rhs = q.form().dirichlet(field.values());
    rec.violated = rec.lhs > rec.rhs;
    if (rec.violated) {
      ++v.violations;
      if (!v.witness_trial) {
        v.witness_trial = trial;
        v.witness = field;
        v.witness_is_extremal = s < 0;
      }
    }
    v.records.push_back(rec);
  };
  for (int k = 0; k < trials; ++k)
    check(smoothed_random_field(mesh, seed + k), k, static_cast<long long>(seed + k));
  if (extremal)
    check(*extremal, trials, -1);
  return v;
}

ExtremalReport compute_extremal(ProblemSpec spec, const ExtremalOptions& options)
{
  if (!spec.is_mixed())
    throw InputError("compute_extremal: needs a mixed singular problem");
  auto& m = std::get<MixedSingular>(spec.kind);
  m.g = Expression(0.0);

  SolveReport solved = solve_mixed(spec);
  const FormulaResult formula = mu_from_formula(solved, spec);
  Extremal extremal = build_extremal(solved, spec, formula.mu);
  const auto mesh = solved.final_field().mesh_ptr();
  DirectResult direct = mu_direct(spec, mesh, options.restarts, spec.options.seed, extremal.field);

  ExtremalReport r{std::move(solved), formula, std::move(direct), std::move(extremal)};
  r.mu_formula = formula.mu;
  r.extremal_quotient = rayleigh_quotient(r.extremal.field, spec);
  r.mu_direct = r.direct.mu;
  r.rel_gap = std::abs(r.mu_formula - r.mu_direct) / r.mu_direct;
  r.sobolev_constant = std::pow(r.mu_direct, 1.0 / spec.p);

  const std::uint64_t trial_seed = spec.options.seed + 1000000ULL;
  r.below = verify_inequality(0.99 * r.mu_direct, spec, mesh, options.trials, trial_seed, r.extremal.field);
  r.above = verify_inequality(1.05 * r.mu_direct, spec, mesh, options.trials, trial_seed, r.extremal.field);
  return r;
}

} // namespace fpl
