#include "fpl/solver.hpp"

#include "fpl/descent.hpp"
#include "fpl/energy_form.hpp"
#include "fpl/random_fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fpl {

std::vector<long long> geometric_schedule(int max_exponent)
{
  if (max_exponent < 0 || max_exponent > 62)
    throw InputError("geometric_schedule: exponent must lie in [0, 62]");
  std::vector<long long> s;
  for (int k = 0; k <= max_exponent; ++k)
    s.push_back(1LL << k);
  return s;
}

void ProblemSpec::validate() const
{
  (void)flux_params();
  weight.validate_for(p);
  if (weight.dimension() != 2 || norm.dimension() != 2)
    throw InputError("the solver works on planar domains (N = 2)");
  if (critical_r && !(*critical_r > p))
    throw GateViolation("critical exponent r must exceed p");
  if (const auto* m = std::get_if<MixedSingular>(&kind)) {
    if (!(m->delta > 0.0 && m->delta < 1.0))
      throw GateViolation("delta must lie in (0, 1)");
    if (!(m->gamma > 0.0 && m->gamma < 1.0))
      throw GateViolation("gamma must lie in (0, 1)");
  }
  const auto& o = options;
  if (o.n_schedule.empty())
    throw InputError("n_schedule must not be empty");
  for (std::size_t i = 0; i < o.n_schedule.size(); ++i) {
    if (o.n_schedule[i] < 1)
      throw InputError("n_schedule entries must be >= 1");
    if (i > 0 && o.n_schedule[i] <= o.n_schedule[i - 1])
      throw InputError("n_schedule must be strictly increasing");
  }
  if (!(o.inner_tol > 0.0) || !(o.outer_tol > 0.0))
    throw InputError("tolerances must be positive");
  if (o.max_inner_iters < 1 || o.max_picard_iters < 1)
    throw InputError("iteration limits must be positive");
  if (!(o.picard_theta > 0.0 && o.picard_theta <= 1.0))
    throw InputError("picard theta must lie in (0, 1]");
}

const Field& SolveReport::final_field() const
{
  if (history.empty())
    throw InputError("SolveReport: no iterates recorded");
  return history.back().field;
}

double regularized_primitive(double t, double exponent, long long n)
{
  const double eps = 1.0 / static_cast<double>(n);
  if (t >= 0.0)
    return std::pow(t + eps, 1.0 - exponent) / (1.0 - exponent);
  return std::pow(eps, 1.0 - exponent) / (1.0 - exponent) + std::pow(eps, -exponent) * t;
}

double regularized_derivative(double t, double exponent, long long n)
{
  const double eps = 1.0 / static_cast<double>(n);
  return std::pow(std::max(t, 0.0) + eps, -exponent);
}

namespace {

std::vector<double> truncate(const std::vector<double>& data, long long n)
{
  std::vector<double> out(data.size());
  const double cap = static_cast<double>(n);
  for (std::size_t i = 0; i < data.size(); ++i)
    out[i] = std::min(data[i], cap);
  return out;
}

void check_nonnegative(const std::vector<double>& data, const char* name)
{
  for (double v : data)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InputError(std::string("data ") + name + " must be finite and nonnegative at every quadrature node");
}

bool all_zero(const std::vector<double>& data)
{
  return std::all_of(data.begin(), data.end(), [](double v) { return v == 0.0; });
}

/// I_n for the mixed problem, on free unknowns.
class MixedEnergy
{
public:
  MixedEnergy(const ProblemSpec& spec, MeshPtr mesh)
    : form_(std::move(mesh), spec.flux_params(), spec.weight), delta_(spec.mixed().delta),
      gamma_(spec.mixed().gamma)
  {
    f_raw_ = form_.sample(spec.mixed().f);
    g_raw_ = form_.sample(spec.mixed().g);
    check_nonnegative(f_raw_, "f");
    check_nonnegative(g_raw_, "g");
    if (all_zero(f_raw_) && all_zero(g_raw_))
      throw InputError("data (f, g) must not vanish identically");
  }

  const EnergyForm& form() const { return form_; }

  void set_level(long long n)
  {
    n_ = n;
    fn_ = truncate(f_raw_, n);
    gn_ = truncate(g_raw_, n);
  }

  Evaluation operator()(std::span<const double> x, std::span<double> grad) const
  {
    std::fill(grad.begin(), grad.end(), 0.0);
    const auto nodal = form_.expand(x);
    const double e = form_.dirichlet_with_gradient(nodal, grad);
    const auto ub = form_.barycenter_values(nodal);
    const auto& areas = form_.mesh().areas();
    std::vector<double> s(ub.size());
    double load = 0.0;
    for (std::size_t t = 0; t < ub.size(); ++t) {
      double term = 0.0;
      double deriv = 0.0;
      if (fn_[t] != 0.0) {
        term += fn_[t] * regularized_primitive(ub[t], delta_, n_);
        deriv += fn_[t] * regularized_derivative(ub[t], delta_, n_);
      }
      if (gn_[t] != 0.0) {
        term += gn_[t] * regularized_primitive(ub[t], gamma_, n_);
        deriv += gn_[t] * regularized_derivative(ub[t], gamma_, n_);
      }
      load += areas[t] * term;
      s[t] = -deriv;
    }
    form_.add_barycentric_load(s, grad);
    const double p = form_.p();
    return {e / p - load, e / p + std::abs(load)};
  }

  /// Right side of the minimizer inequality minus the left side, relative; positive means violated.
  double inequality_violation(std::span<const double> nodal, const std::vector<Field>& tests) const
  {
    const double p = form_.p();
    const double lhs = form_.dirichlet(nodal);
    const auto ub = form_.barycenter_values(nodal);
    const auto& areas = form_.mesh().areas();
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& phi : tests) {
      const auto& pv = phi.values();
      double rhs = form_.dirichlet(pv);
      const auto pb = form_.barycenter_values(pv);
      double cross = 0.0;
      for (std::size_t t = 0; t < ub.size(); ++t) {
        const double coeff = fn_[t] * regularized_derivative(ub[t], delta_, n_) +
                             gn_[t] * regularized_derivative(ub[t], gamma_, n_);
        cross += areas[t] * (ub[t] - pb[t]) * coeff;
      }
      rhs += p * cross;
      const double scale = std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
      worst = std::max(worst, (lhs - rhs) / scale);
    }
    return worst;
  }

private:
  EnergyForm form_;
  double delta_;
  double gamma_;
  std::vector<double> f_raw_, g_raw_, fn_, gn_;
  long long n_ = 1;
};

DescentOptions descent_options(const SolverOptions& o)
{
  DescentOptions d;
  d.tolerance = o.inner_tol;
  d.max_iterations = o.max_inner_iters;
  return d;
}

std::vector<Field> inequality_test_fields(const MeshPtr& mesh, const SolverOptions& o, double amplitude,
                                          long long n)
{
  std::vector<Field> tests;
  const double amp = amplitude > 0.0 ? 2.0 * amplitude : 1.0;
  for (int k = 0; k < o.inequality_tests; ++k)
    tests.push_back(smoothed_random_field(mesh, o.seed * 1000003ULL + static_cast<std::uint64_t>(n) * 7919ULL +
                                                    static_cast<std::uint64_t>(k),
                                          2, 0.0, amp));
  return tests;
}

[[noreturn]] void throw_inner_failure(const DescentResult& r, const EnergyForm& form, long long n,
                                      const char* what)
{
  std::ostringstream os;
  os << what << " at n = " << n << ": stationarity " << r.stationarity << " after " << r.iterations
     << " iterations" << (r.line_search_failed ? " (line search failed)" : "");
  throw ConvergenceFailure(os.str(), form.expand(r.x), r.stationarity);
}

MinimizeResult run_minimization(const MixedEnergy& energy, const SolverOptions& options, long long n,
                                std::vector<double> x0)
{
  const auto& form = energy.form();
  auto objective = [&energy](std::span<const double> x, std::span<double> g) { return energy(x, g); };
  auto r = minimize_bb(objective, std::move(x0), form.free_mass(), descent_options(options));
  if (!r.converged)
    throw_inner_failure(r, form, n, "minimize_In did not converge");

  MinimizeResult out{form.to_field(r.x)};
  out.iterations = r.iterations;
  out.stationarity = r.stationarity;
  out.energy = r.value;
  out.energy_history = std::move(r.history);
  out.energy_slack = std::move(r.slack);
  const auto& vals = out.field.values();
  out.min_nodal = *std::min_element(vals.begin(), vals.end());
  const double sup = *std::max_element(vals.begin(), vals.end());
  const auto tests = inequality_test_fields(form.mesh_ptr(), options, sup, n);
  out.inequality_violation = energy.inequality_violation(vals, tests);
  return out;
}

IterateRecord make_record(long long n, const Field& field, const EnergyForm& form)
{
  IterateRecord rec{n, field};
  const auto& v = field.values();
  rec.norm = std::pow(form.dirichlet(v), 1.0 / form.p());
  rec.sup = *std::max_element(v.begin(), v.end());
  rec.min_nodal = *std::min_element(v.begin(), v.end());
  double m = std::numeric_limits<double>::infinity();
  const auto& verts = form.mesh().vertices();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (form.mesh().in_interior_region(verts[i]))
      m = std::min(m, v[i]);
  rec.min_interior = m;
  return rec;
}

/// Fills the step diagnostics against the previous record and updates report-level maxima.
bool close_step(SolveReport& report, IterateRecord& rec, double outer_tol)
{
  if (report.history.empty())
    return false;
  const auto& prev = report.history.back();
  const auto& a = prev.field.values();
  const auto& b = rec.field.values();
  double viol = 0.0;
  double change = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    viol = std::max(viol, a[i] - b[i]);
    change = std::max(change, std::abs(a[i] - b[i]));
  }
  rec.step_violation = viol;
  rec.sup_change = change;
  report.monotonicity_violation = std::max(report.monotonicity_violation, viol);
  report.norm_violation = std::max(report.norm_violation, prev.norm - rec.norm);
  return change < outer_tol;
}

} // namespace

double energy_In(const Field& v, const ProblemSpec& spec, long long n)
{
  if (!spec.is_mixed())
    throw InputError("energy_In: the problem is not of mixed singular type");
  if (n < 1)
    throw InputError("energy_In: n must be >= 1");
  MixedEnergy energy(spec, v.mesh_ptr());
  energy.set_level(n);
  const auto x = energy.form().restrict_to_free(v.values());
  std::vector<double> g(x.size());
  return energy(x, g).value;
}

MinimizeResult minimize_In(const ProblemSpec& spec, long long n, const Field& initial)
{
  spec.validate();
  if (!spec.is_mixed())
    throw InputError("minimize_In: the problem is not of mixed singular type");
  if (!initial.zero_boundary())
    throw InputError("minimize_In: initial field must have zero boundary values");
  if (n < 1)
    throw InputError("minimize_In: n must be >= 1");
  MixedEnergy energy(spec, initial.mesh_ptr());
  energy.set_level(n);
  return run_minimization(energy, spec.options, n, energy.form().restrict_to_free(initial.values()));
}

SolveReport solve_mixed(const ProblemSpec& spec)
{
  spec.validate();
  if (!spec.is_mixed())
    throw InputError("solve_mixed: the problem is not of mixed singular type");
  const auto mesh = Mesh::build(spec.domain);
  MixedEnergy energy(spec, mesh);
  const auto& form = energy.form();

  SolveReport report;
  report.kind = "mixed";
  std::vector<double> x(form.num_free(), 0.0);
  for (const long long n : spec.options.n_schedule) {
    energy.set_level(n);
    MinimizeResult res = [&] {
      try {
        return run_minimization(energy, spec.options, n, x);
      } catch (const ConvergenceFailure& e) {
        throw SolveFailure(e.what(), e, report);
      }
    }();
    x = form.restrict_to_free(res.field.values());
    auto rec = make_record(n, res.field, form);
    rec.inner_iterations = res.iterations;
    rec.energy = res.energy;
    rec.stationarity = res.stationarity;
    rec.inequality_violation = res.inequality_violation;
    const bool done = close_step(report, rec, spec.options.outer_tol);
    report.history.push_back(std::move(rec));
    if (done) {
      report.converged = true;
      break;
    }
  }
  return report;
}

SolveReport solve_exponential(const ProblemSpec& spec)
{
  spec.validate();
  if (spec.is_mixed())
    throw InputError("solve_exponential: the problem is not of exponential type");
  const auto mesh = Mesh::build(spec.domain);
  const EnergyForm form(mesh, spec.flux_params(), spec.weight);
  const auto h_raw = form.sample(spec.exponential().h);
  check_nonnegative(h_raw, "h");
  if (all_zero(h_raw))
    throw InputError("data h must not vanish identically");

  const auto& opt = spec.options;
  const auto& areas = mesh->areas();
  const auto& active = form.active_triangles();
  const double p = form.p();

  SolveReport report;
  report.kind = "exponential";
  std::vector<double> v(form.num_free(), 0.0);
  std::vector<double> coef(mesh->num_triangles(), 0.0);

  // Frozen problem: minimize (1/p)||u||^p - sum_T area coef_T u_b.
  auto frozen = [&](std::span<const double> x, std::span<double> grad) -> Evaluation {
    std::fill(grad.begin(), grad.end(), 0.0);
    const auto nodal = form.expand(x);
    const double e = form.dirichlet_with_gradient(nodal, grad);
    const auto ub = form.barycenter_values(nodal);
    double load = 0.0;
    std::vector<double> s(ub.size());
    for (std::size_t t = 0; t < ub.size(); ++t) {
      load += areas[t] * coef[t] * ub[t];
      s[t] = -coef[t];
    }
    form.add_barycentric_load(s, grad);
    return {e / p - load, e / p + std::abs(load)};
  };

  for (const long long n : opt.n_schedule) {
    const auto hn = truncate(h_raw, n);
    const double eps = 1.0 / static_cast<double>(n);
    double theta = opt.picard_theta;
    double prev_change = std::numeric_limits<double>::infinity();
    int picard = 0;
    int inner_total = 0;
    double last_stationarity = 0.0;
    double last_energy = 0.0;
    bool fixed = false;
    for (picard = 1; picard <= opt.max_picard_iters; ++picard) {
      const auto ub = form.barycenter_values(form.expand(v));
      for (std::size_t t = 0; t < ub.size(); ++t) {
        coef[t] = active[t] ? hn[t] * std::exp(1.0 / (std::max(ub[t], 0.0) + eps)) : 0.0;
        if (!std::isfinite(coef[t])) {
          std::ostringstream os;
          os << "solve_exponential: load overflow at n = " << n << " (barycenter value " << ub[t] << ")";
          throw SolveFailure(os.str(), ConvergenceFailure(os.str(), form.expand(v), 0.0), report);
        }
      }
      auto r = minimize_bb(frozen, v, form.free_mass(), descent_options(opt));
      if (!r.converged) {
        try {
          throw_inner_failure(r, form, n, "frozen Picard problem did not converge");
        } catch (const ConvergenceFailure& e) {
          throw SolveFailure(e.what(), e, report);
        }
      }
      inner_total += r.iterations;
      last_stationarity = r.stationarity;
      last_energy = r.value;
      double change = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double step = theta * (r.x[i] - v[i]);
        v[i] += step;
        change = std::max(change, std::abs(step));
      }
      if (change < opt.inner_tol) {
        fixed = true;
        break;
      }
      // No contraction: damp harder.
      if (change > prev_change)
        theta = std::max(theta * 0.5, 1.0 / 64.0);
      prev_change = change;
    }
    if (!fixed) {
      std::ostringstream os;
      os << "Picard iteration stagnated at n = " << n << " after " << opt.max_picard_iters
         << " steps (last change " << prev_change << ", theta " << theta << ")";
      throw SolveFailure(os.str(), ConvergenceFailure(os.str(), form.expand(v), prev_change), report);
    }

    auto rec = make_record(n, form.to_field(v), form);
    rec.inner_iterations = inner_total;
    rec.picard_iterations = picard;
    rec.energy = last_energy;
    rec.stationarity = last_stationarity;
    const bool done = close_step(report, rec, opt.outer_tol);
    report.history.push_back(std::move(rec));
    if (done) {
      report.converged = true;
      break;
    }
  }
  return report;
}

SolveReport solve(const ProblemSpec& spec)
{
  return spec.is_mixed() ? solve_mixed(spec) : solve_exponential(spec);
}

std::vector<LevelSetRow> level_set_measures(const Field& field, const std::vector<double>& levels)
{
  const auto& mesh = field.mesh();
  const auto& areas = mesh.areas();
  std::vector<double> ub(mesh.num_triangles());
  for (std::size_t t = 0; t < ub.size(); ++t)
    ub[t] = field.barycenter_value(t);
  std::vector<LevelSetRow> rows;
  for (double k : levels) {
    double m = 0.0;
    for (std::size_t t = 0; t < ub.size(); ++t)
      if (ub[t] >= k)
        m += areas[t];
    rows.push_back({k, m});
  }
  return rows;
}

std::vector<LevelSetRow> stampacchia_diagnostic(const SolveReport& report)
{
  const auto& field = report.final_field();
  const auto& v = field.values();
  const double sup = *std::max_element(v.begin(), v.end());
  std::vector<double> levels{0.0};
  if (sup > 0.0) {
    const double k0 = sup / 16.0;
    for (int j = 0; j <= 5; ++j)
      levels.push_back(k0 * std::ldexp(1.0, j));
  }
  return level_set_measures(field, levels);
}

} // namespace fpl
