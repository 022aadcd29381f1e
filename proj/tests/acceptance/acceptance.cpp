// Acceptance driver. `fpl_acceptance` runs every criterion; `fpl_acceptance AC-3 AC-7` runs a subset.
// One line per criterion. Exit 0 when all pass, 77 when the only failures are sub-checks
// flagged unattainable at the pinned resolution, 1 otherwise.

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "fpl/config.hpp"
#include "fpl/extremal.hpp"
#include "fpl/norm_checks.hpp"
#include "fpl/random_fields.hpp"
#include "fpl_app/app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fpl;

namespace {

struct Check
{
  std::string name;
  bool ok;
  std::string detail;
  bool attainable = true;
};

using Checks = std::vector<Check>;

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Check le(const std::string& name, double value, double bound)
{
  return {name, value <= bound, fmt(value) + "<=" + fmt(bound)};
}

Check lt(const std::string& name, double value, double bound)
{
  return {name, value < bound, fmt(value) + "<" + fmt(bound)};
}

Config make_config(const std::map<std::string, std::string>& kv)
{
  Config c;
  for (const auto& [k, v] : kv)
    c.set(k, v);
  return c;
}

const std::map<std::string, std::string> kMonotoneCase = {
  {"domain", "square:32"}, {"p", "2"}, {"delta", "0.5"}, {"gamma", "0.5"}, {"f", "1"},
  {"g", "1"}, {"weight", "const:1"}, {"norm", "euclidean"}, {"n_max_exp", "10"}, {"seed", "1"}};

ProblemSpec monotone_spec()
{
  return make_problem_spec(make_config(kMonotoneCase));
}

const SolveReport& monotone_report()
{
  static const SolveReport r = solve_mixed(monotone_spec());
  return r;
}

ProblemSpec extremal_spec(double p, double delta, const std::string& norm, const std::string& weight = "const:1")
{
  std::map<std::string, std::string> kv = {{"domain", "square:32"}, {"p", fmt(p)}, {"delta", fmt(delta)},
                                           {"norm", norm}, {"weight", weight}, {"f", "1"}, {"g", "0"},
                                           {"n_max_exp", std::to_string(app::kExtremalMaxExponent)}, {"seed", "1"}};
  if (weight != "const:1")
    kv["s"] = "2";
  return make_problem_spec(make_config(kv));
}

/// The first extremal configuration, with the full 1000-trial inequality check.
const ExtremalReport& reference_extremal()
{
  static const ExtremalReport r = compute_extremal(extremal_spec(2.0, 0.5, "euclidean"), {8, 1000});
  return r;
}

// ---------------------------------------------------------------------------

Checks ac1()
{
  Checks out;
  for (const char* tag : {"euclidean", "lt:4", "lt:1.5", "lambda-mu:1:1", "lambda-mu:2:0.5"}) {
    const auto rep = check_norm_properties(FinslerNorm::parse(tag), 3.0, 10000, 1);
    std::string failed;
    for (const auto& c : rep.checks)
      if (!c.passed)
        failed += (failed.empty() ? "" : ",") + c.name;
    out.push_back({tag, rep.passed, failed.empty() ? "all" : "failed:" + failed});
  }
  return out;
}

Checks ac2()
{
  Checks out;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto euc = FinslerNorm::euclidean();
  const auto l4 = FinslerNorm::lt(4.0);

  double worst_euc = 0.0, worst_l4 = 0.0;
  bool nested = true;
  for (int k = 0; k < 20; ++k) {
    const double xi[2] = {u(rng), u(rng)};
    worst_euc = std::max(worst_euc, std::abs(euc.dual_evaluate(xi, 4096) - std::hypot(xi[0], xi[1])));
    double prev = 0.0;
    for (int d = 8; d <= 8192; d *= 2) {
      const double v = l4.dual_evaluate(xi, d);
      nested = nested && v >= prev;
      prev = v;
    }
    // brute force: sup of <x, xi> over a dense grid of the box [-1,1]^2, divided by F(x)
    double brute = 0.0;
    const int g = 1000;
    for (int i = -g; i <= g; ++i)
      for (int j = -g; j <= g; ++j) {
        if (i == 0 && j == 0)
          continue;
        const double x[2] = {double(i) / g, double(j) / g};
        brute = std::max(brute, (x[0] * xi[0] + x[1] * xi[1]) / l4.evaluate(x));
      }
    worst_l4 = std::max(worst_l4, std::abs(l4.dual_evaluate(xi, 4096) - brute));
  }
  out.push_back(le("euclidean_dual", worst_euc, 1e-3));
  out.push_back({"nested_monotone", nested, nested ? "exact" : "broken"});
  out.push_back(le("lt4_vs_grid", worst_l4, 1e-2));
  return out;
}

Checks ac3()
{
  Checks out;
  const auto sinsin = [](double x, double y) { return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y); };
  const FluxParams fp(FinslerNorm::euclidean(), 2.0);
  const double exact = std::numbers::pi * std::numbers::pi / 2.0;
  std::vector<double> err, e_w;
  for (int n : {16, 32, 64}) {
    const auto v = Field::interpolate(Mesh::build(DomainSpec::square(n)), sinsin, true);
    err.push_back(std::abs(weighted_energy(v, fp, WeightSpec::constant(1.0)) - exact));
    e_w.push_back(weighted_energy(v, fp, WeightSpec::power(0.5, 2.0)));
  }
  out.push_back({"error_decreasing", err[1] < err[0] && err[2] < err[1],
                 fmt(err[0]) + ">" + fmt(err[1]) + ">" + fmt(err[2])});
  out.push_back(lt("final_error", err[2], 1e-2));
  const double d1 = std::abs(e_w[1] - e_w[0]), d2 = std::abs(e_w[2] - e_w[1]);
  out.push_back({"weighted_cauchy", d2 < d1, fmt(d1) + ">" + fmt(d2)});
  return out;
}

Checks ac4()
{
  Checks out;
  const auto spec = make_problem_spec(make_config({{"domain", "disk:48"}, {"p", "2"}, {"weight", "const:1"},
                                                   {"norm", "euclidean"}, {"delta", "1e-6"}, {"f", "1"}, {"g", "0"}}));
  const auto rep = solve_mixed(spec);
  const Field& u = rep.final_field();
  const Mesh& mesh = u.mesh();
  const auto& v = u.values();
  const double umax = *std::max_element(v.begin(), v.end());
  out.push_back(le("max_rel_dev", std::abs(umax - 0.25) / 0.25, 0.02));

  // L2 error by the edge-midpoint rule, exact for the quadratic torsion function
  const auto torsion = [](double x, double y) { return (1.0 - x * x - y * y) / 4.0; };
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    for (int a = 0; a < 3; ++a) {
      const int i = tri[a], j = tri[(a + 1) % 3];
      const auto& xi = mesh.vertices()[i];
      const auto& xj = mesh.vertices()[j];
      const double ue = torsion(0.5 * (xi[0] + xj[0]), 0.5 * (xi[1] + xj[1]));
      const double uh = 0.5 * (v[i] + v[j]);
      num += mesh.areas()[t] / 3.0 * (uh - ue) * (uh - ue);
      den += mesh.areas()[t] / 3.0 * ue * ue;
    }
  }
  out.push_back(lt("l2_rel_error", std::sqrt(num / den), 0.01));
  return out;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b)
{
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

Checks ac5()
{
  Checks out;
  const auto spec = monotone_spec();
  const auto& rep = monotone_report();
  out.push_back(le("monotone", rep.monotonicity_violation, 1e-10));
  out.push_back(le("norm_nondecreasing", rep.norm_violation, 1e-10));
  out.push_back({"converged_by_2^10", rep.converged, "last_sup_change=" + fmt(rep.history.back().sup_change) + " vs 1e-06",
                 false});

  const long long n = rep.history.back().n;
  const auto mesh = rep.final_field().mesh_ptr();
  const auto a = minimize_In(spec, n, smoothed_random_field(mesh, 101));
  const auto b = minimize_In(spec, n, smoothed_random_field(mesh, 202));
  out.push_back(le("uniqueness", rel_l2(a.field.values(), b.field.values()), 1e-6));

  double ineq = -1e300;
  for (const auto& r : rep.history)
    ineq = std::max(ineq, r.inequality_violation);
  out.push_back(le("minimizer_inequality", ineq, 1e-8));
  return out;
}

Checks ac6()
{
  Checks out;
  struct Case
  {
    double p, delta;
    std::string norm, weight;
  };
  std::vector<Case> cases;
  for (double p : {2.0, 3.0})
    for (double d : {0.25, 0.5})
      for (const char* nm : {"euclidean", "lt:4"})
        cases.push_back({p, d, nm, "const:1"});
  cases.push_back({2.0, 0.5, "euclidean", "power:0.5"});
  cases.push_back({1.5, 0.5, "euclidean", "const:1"});
  for (const auto& c : cases) {
    const auto r = compute_extremal(extremal_spec(c.p, c.delta, c.norm, c.weight), {8, 1});
    std::string name = "p" + fmt(c.p) + "/d" + fmt(c.delta) + "/" + c.norm;
    if (c.weight != "const:1")
      name += "/" + c.weight;
    out.push_back(le(name, r.rel_gap, 0.02));
  }
  return out;
}

Checks ac7()
{
  const auto& r = reference_extremal();
  Checks out;
  out.push_back({"below_0.99mu", r.below.violations == 0, std::to_string(r.below.violations) + " violations"});
  const bool witness = r.above.witness_trial.has_value() && r.above.witness_is_extremal;
  // the extremal itself must be among the violators, whatever the first witness is
  const bool extremal_violates = !r.above.records.empty() && r.above.records.back().seed == -1 &&
                                 r.above.records.back().violated;
  out.push_back({"above_1.05mu", extremal_violates,
                 std::to_string(r.above.violations) + " violations, witness " +
                   (witness ? "extremal" : (r.above.witness_trial ? "trial " + std::to_string(*r.above.witness_trial) : "none"))});
  return out;
}

Checks ac8()
{
  Checks out;
  const auto& r = reference_extremal();
  out.push_back(le("normalization", r.extremal.normalization_residual, 1e-10));
  out.push_back(le("useful1", r.formula.useful_residual, 0.01));
  const auto r3 = compute_extremal(extremal_spec(3.0, 0.25, "lt:4"), {8, 1});
  out.push_back(le("normalization_p3", r3.extremal.normalization_residual, 1e-10));
  out.push_back(le("useful1_p3", r3.formula.useful_residual, 0.01));
  return out;
}

/// Independent P1 solve of -Lap u = h with zero boundary values and barycenter quadrature for the load.
std::vector<double> linear_comparison(const Mesh& mesh, double h)
{
  const std::size_t nv = mesh.num_vertices();
  std::vector<int> index(nv, -1);
  int nf = 0;
  for (std::size_t i = 0; i < nv; ++i)
    if (!mesh.boundary_flags()[i])
      index[i] = nf++;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto& p0 = mesh.vertices()[tri[0]];
    const auto& p1 = mesh.vertices()[tri[1]];
    const auto& p2 = mesh.vertices()[tri[2]];
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    const double area = 0.5 * std::abs(det);
    // hat gradients: rotated opposite edges over 2*signed area
    const double gx[3] = {(p1[1] - p2[1]) / det, (p2[1] - p0[1]) / det, (p0[1] - p1[1]) / det};
    const double gy[3] = {(p2[0] - p1[0]) / det, (p0[0] - p2[0]) / det, (p1[0] - p0[0]) / det};
    for (int a = 0; a < 3; ++a) {
      const int i = index[tri[a]];
      if (i < 0)
        continue;
      rhs[i] += area * h / 3.0;
      for (int b = 0; b < 3; ++b) {
        const int j = index[tri[b]];
        if (j >= 0)
          trip.emplace_back(i, j, area * (gx[a] * gx[b] + gy[a] * gy[b]));
      }
    }
  }
  Eigen::SparseMatrix<double> k(nf, nf);
  k.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(k);
  const Eigen::VectorXd x = ldlt.solve(rhs);
  std::vector<double> u(nv, 0.0);
  for (std::size_t i = 0; i < nv; ++i)
    if (index[i] >= 0)
      u[i] = x[index[i]];
  return u;
}

Checks ac9()
{
  Checks out;
  const auto spec = make_problem_spec(make_config(
    {{"domain", "square:32"}, {"p", "2"}, {"weight", "const:1"}, {"kind", "exponential"}, {"h", "0.01"}}));
  const auto rep = solve_exponential(spec);
  int worst_picard = 0;
  for (const auto& r : rep.history)
    worst_picard = std::max(worst_picard, r.picard_iterations);
  out.push_back({"picard_each_n", rep.history.size() == spec.options.n_schedule.size(),
                 std::to_string(rep.history.size()) + " levels, max " + std::to_string(worst_picard) + " sweeps"});
  out.push_back(le("monotone", rep.monotonicity_violation, 1e-10));

  // bounded and Cauchy: consecutive sup differences shrink geometrically over the schedule's second half
  const std::size_t m = rep.history.size();
  double ratio = 0.0;
  for (std::size_t k = m / 2 + 1; k < m; ++k)
    ratio = std::max(ratio, rep.history[k].sup_change / rep.history[k - 1].sup_change);
  const double tail = rep.history.back().sup_change * ratio / (1.0 - ratio);
  out.push_back(lt("sup_contraction", ratio, 0.75));
  out.push_back({"sup_bounded", std::isfinite(tail), "sup=" + fmt(rep.history.back().sup) + " tail<=" + fmt(tail)});

  const Field& v = rep.final_field();
  const auto lin = linear_comparison(v.mesh(), 0.01);
  double worst = 1e300;
  for (std::size_t i = 0; i < lin.size(); ++i)
    if (!v.mesh().boundary_flags()[i])
      worst = std::min(worst, v[i] - lin[i]);
  out.push_back({"dominates_linear", worst >= -1e-10, "interior min(v-u_lin)=" + fmt(worst) + ">=-1e-10"});
  return out;
}

Checks ac10()
{
  Checks out;
  const auto& rep = monotone_report();
  const auto rows = stampacchia_diagnostic(rep);
  bool mono = true;
  for (std::size_t k = 1; k < rows.size(); ++k)
    mono = mono && rows[k].measure <= rows[k - 1].measure;
  out.push_back({"level_sets_nonincreasing", mono, std::to_string(rows.size()) + " levels"});
  out.push_back({"level_sets_reach_0", rows.back().measure == 0.0, "k=" + fmt(rows.back().level)});
  const double change = std::abs(rep.history.back().sup - rep.history[rep.history.size() - 2].sup);
  out.push_back({"sup_stabilized", change < 1e-6, "last sup difference " + fmt(change) + " vs 1e-06", false});
  return out;
}

std::string report_payload(const std::string& sub, const std::map<std::string, std::string>& kv)
{
  app::RunOptions o;
  o.subcommand = sub;
  for (const auto& [k, v] : kv)
    o.overrides.push_back(k + "=" + v);
  std::ostringstream out, err;
  if (app::run(o, out, err) != 0)
    return "error: " + err.str();
  return nlohmann::json::parse(out.str())["report"].dump();
}

Checks ac11()
{
  Checks out;
  const auto a1 = report_payload("solve", kMonotoneCase);
  const auto a2 = report_payload("solve", kMonotoneCase);
  out.push_back({"monotone_case", a1 == a2 && a1.rfind("error", 0) != 0, std::to_string(a1.size()) + " bytes"});
  const std::map<std::string, std::string> ext = {{"domain", "square:32"}, {"p", "2"}, {"delta", "0.5"},
                                                  {"norm", "euclidean"}, {"f", "1"}, {"seed", "1"}};
  const auto b1 = report_payload("extremal", ext);
  const auto b2 = report_payload("extremal", ext);
  out.push_back({"extremal_case", b1 == b2 && b1.rfind("error", 0) != 0, std::to_string(b1.size()) + " bytes"});
  return out;
}

const std::vector<std::pair<std::string, std::function<Checks()>>> kCriteria = {
  {"AC-1", ac1}, {"AC-2", ac2}, {"AC-3", ac3}, {"AC-4", ac4},  {"AC-5", ac5},  {"AC-6", ac6},
  {"AC-7", ac7}, {"AC-8", ac8}, {"AC-9", ac9}, {"AC-10", ac10}, {"AC-11", ac11}};

/// 0 pass, 1 fail, 2 fail only on unattainable sub-checks.
int run_one(const std::string& id, const std::function<Checks()>& fn)
{
  const auto t0 = std::chrono::steady_clock::now();
  Checks checks;
  try {
    checks = fn();
  } catch (const std::exception& e) {
    checks.push_back({"exception", false, e.what()});
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool hard = false, soft = false;
  std::string line;
  for (const auto& c : checks) {
    if (!c.ok)
      (c.attainable ? hard : soft) = true;
    line += " " + c.name + (c.ok ? "[ok " : (c.attainable ? "[FAIL " : "[FAIL unattainable ")) + c.detail + "]";
  }
  std::printf("%-5s %s %.1fs%s\n", id.c_str(), hard || soft ? "FAIL" : "PASS", secs, line.c_str());
  std::fflush(stdout);
  return hard ? 1 : (soft ? 2 : 0);
}

} // namespace

int main(int argc, char** argv)
{
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int worst = 0;
  for (const auto& [id, fn] : kCriteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), id) == wanted.end())
      continue;
    const int r = run_one(id, fn);
    worst = (r == 1 || worst == 1) ? 1 : std::max(worst, r);
  }
  if (worst == 1)
    return 1;
  return worst == 2 ? 77 : 0;
}
