#include "fpl_app/app.hpp"

#include "fpl/error.hpp"
#include "fpl/text.hpp"

#include <atomic>
#include <cmath>
#include <ctime>
#include <limits>
#include <ostream>
#include <thread>

namespace fpl::app {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string utc_timestamp()
{
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json num(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

json config_echo(const Config& c)
{
  json j = json::object();
  for (const auto& [k, v] : c.entries())
    j[k] = v;
  return j;
}

json level_sets(const std::vector<LevelSetRow>& rows)
{
  json a = json::array();
  for (const auto& r : rows)
    a.push_back({{"level", num(r.level)}, {"measure", num(r.measure)}});
  return a;
}

json envelope(json report, const RunOptions& o, const Config& c)
{
  return {{"report", std::move(report)},
          {"metadata",
           {{"timestamp", utc_timestamp()},
            {"version", kVersion},
            {"subcommand", o.subcommand},
            {"seed", c.get_string("seed", "1")},
            {"jobs", o.jobs}}}};
}

void emit(std::ostream& out, const json& j)
{
  out << j.dump(2) << '\n';
}

const std::vector<std::string>& default_check_norms()
{
  static const std::vector<std::string> n{"euclidean", "lt:4", "lt:1.5", "lambda-mu:1:1", "lambda-mu:2:0.5"};
  return n;
}

ExtremalOptions extremal_options(const Config& c)
{
  ExtremalOptions e;
  e.restarts = static_cast<int>(c.get_int("restarts", e.restarts));
  e.trials = static_cast<int>(c.get_int("trials", e.trials));
  if (e.restarts < 1)
    throw ConfigError("restarts", "key 'restarts': must be >= 1");
  if (e.trials < 1)
    throw ConfigError("trials", "key 'trials': must be >= 1");
  return e;
}

ProblemSpec extremal_spec(const Config& c)
{
  auto spec = make_problem_spec(c, kExtremalMaxExponent);
  require_extremal_spec(spec);
  return spec;
}

int run_solve(const RunOptions& o, const Config& c, std::ostream& out)
{
  const auto spec = make_problem_spec(c);
  const auto rep = solve(spec);
  if (o.format == "csv") {
    write_history_csv(out, rep);
    return kSuccess;
  }
  json r = {{"subcommand", "solve"},
            {"config", config_echo(c)},
            {"mesh", mesh_summary(rep.final_field().mesh())},
            {"solve", to_json(rep)},
            {"stampacchia", level_sets(stampacchia_diagnostic(rep))}};
  emit(out, envelope(std::move(r), o, c));
  return kSuccess;
}

int run_extremal(const RunOptions& o, const Config& c, std::ostream& out)
{
  const auto spec = extremal_spec(c);
  const auto rep = compute_extremal(spec, extremal_options(c));
  if (o.format == "csv") {
    write_field_csv(out, rep.extremal.field);
    return kSuccess;
  }
  json r = {{"subcommand", "extremal"},
            {"config", config_echo(c)},
            {"mesh", mesh_summary(rep.solve.final_field().mesh())},
            {"extremal", to_json(rep)}};
  emit(out, envelope(std::move(r), o, c));
  return kSuccess;
}

int run_verify(const RunOptions& o, const Config& c, std::ostream& out)
{
  const auto spec = extremal_spec(c);
  const auto opts = extremal_options(c);
  const std::uint64_t trial_seed = spec.options.seed + 1000000ULL;
  json r = {{"subcommand", "verify"}, {"config", config_echo(c)}};
  std::vector<InequalityVerdict> verdicts;
  if (c.has("constant")) {
    const double constant = c.get_double("constant", 0.0);
    if (!(constant >= 0.0) || !std::isfinite(constant))
      throw ConfigError("constant", "key 'constant': must be finite and nonnegative");
    verdicts.push_back(verify_inequality(constant, spec, Mesh::build(spec.domain), opts.trials, trial_seed));
  } else {
    const auto rep = compute_extremal(spec, opts);
    r["mu_direct"] = num(rep.mu_direct);
    r["mu_formula"] = num(rep.mu_formula);
    verdicts.push_back(rep.below);
    verdicts.push_back(rep.above);
  }
  if (o.format == "csv") {
    for (const auto& v : verdicts)
      write_verdict_csv(out, v);
    return kSuccess;
  }
  json a = json::array();
  for (const auto& v : verdicts)
    a.push_back(to_json(v));
  r["verdicts"] = std::move(a);
  emit(out, envelope(std::move(r), o, c));
  return kSuccess;
}

int run_sweep_cmd(const RunOptions& o, const Config& c, std::ostream& out)
{
  const auto rows = run_sweep(c, o.jobs);
  if (o.format == "csv") {
    write_sweep_csv(out, rows);
    return kSuccess;
  }
  json a = json::array();
  for (const auto& row : rows)
    a.push_back({{"p", num(row.p)},
                 {"delta", num(row.delta)},
                 {"nu", row.nu ? num(*row.nu) : json(nullptr)},
                 {"norm", row.norm},
                 {"mu_formula", num(row.mu_formula)},
                 {"mu_direct", num(row.mu_direct)},
                 {"rel_gap", num(row.rel_gap)},
                 {"converged", row.converged},
                 {"error", row.error.empty() ? json(nullptr) : json(row.error)}});
  json r = {{"subcommand", "sweep"}, {"config", config_echo(c)}, {"rows", std::move(a)}};
  emit(out, envelope(std::move(r), o, c));
  return kSuccess;
}

int run_check_norms(const RunOptions& o, const Config& c, std::ostream& out)
{
  std::vector<std::string> tags = c.get_list("sweep_norm");
  if (tags.empty())
    tags = c.has("norm") ? std::vector<std::string>{c.get_string("norm", "")} : default_check_norms();
  const double p = c.get_double("p", 3.0);
  const int samples = static_cast<int>(c.get_int("trials", 10000));
  if (samples < 1)
    throw ConfigError("trials", "key 'trials': must be >= 1");
  const auto seed = static_cast<std::uint64_t>(c.get_int("seed", 1));

  std::vector<NormCheckReport> reps;
  for (const auto& t : tags)
    reps.push_back(check_norm_properties(FinslerNorm::parse(t), p, samples, seed));
  bool all = true;
  for (const auto& r : reps)
    all = all && r.passed;

  if (o.format == "csv") {
    out << "norm,p,check,worst,tolerance,samples,passed\n";
    for (const auto& r : reps)
      for (const auto& ch : r.checks)
        out << r.norm << ',' << format_double(r.p) << ',' << ch.name << ',' << format_double(ch.worst) << ','
            << format_double(ch.tolerance) << ',' << ch.samples << ',' << (ch.passed ? "true" : "false") << '\n';
  } else {
    json a = json::array();
    for (const auto& r : reps)
      a.push_back(to_json(r));
    json r = {{"subcommand", "check-norms"}, {"config", config_echo(c)}, {"norms", std::move(a)}, {"passed", all}};
    emit(out, envelope(std::move(r), o, c));
  }
  return all ? kSuccess : 1;
}

int report_error(std::ostream& out, std::ostream& err, const char* type, const std::string& message, int code,
                 json extra = json::object())
{
  json e = {{"type", type}, {"message", message}, {"exit_code", code}};
  for (auto it = extra.begin(); it != extra.end(); ++it)
    e[it.key()] = it.value();
  out << json{{"error", e}}.dump(2) << '\n';
  err << "fpl: " << type << ": " << message << '\n';
  return code;
}

} // namespace

Config assemble_config(const RunOptions& o)
{
  Config c = o.config_path ? Config::load(*o.config_path) : Config{};
  for (const auto& s : o.overrides)
    c.apply_override(s);
  if (o.seed)
    c.set("seed", std::to_string(*o.seed));
  return c;
}

int run(const RunOptions& o, std::ostream& out, std::ostream& err)
{
  try {
    if (o.format != "json" && o.format != "csv")
      throw ConfigError("format", "format must be json or csv, got '" + o.format + "'");
    if (o.jobs < 1)
      throw ConfigError("jobs", "jobs must be >= 1");
    const Config c = assemble_config(o);
    if (o.subcommand == "solve")
      return run_solve(o, c, out);
    if (o.subcommand == "extremal")
      return run_extremal(o, c, out);
    if (o.subcommand == "verify")
      return run_verify(o, c, out);
    if (o.subcommand == "sweep")
      return run_sweep_cmd(o, c, out);
    if (o.subcommand == "check-norms")
      return run_check_norms(o, c, out);
    throw ConfigError("subcommand", "unknown subcommand '" + o.subcommand + "'");
  } catch (const ConfigError& e) {
    return report_error(out, err, "config_error", e.what(), kConfigError, {{"key", e.key()}});
  } catch (const SolveFailure& e) {
    return report_error(out, err, "convergence_failure", e.what(), kConvergenceFailure,
                        {{"residual", num(e.residual())}, {"partial", to_json(e.partial(), false)}});
  } catch (const ConvergenceFailure& e) {
    return report_error(out, err, "convergence_failure", e.what(), kConvergenceFailure,
                        {{"residual", num(e.residual())}});
  } catch (const GateViolation& e) {
    return report_error(out, err, "gate_violation", e.what(), kGateViolation);
  } catch (const InputError& e) {
    return report_error(out, err, "input_error", e.what(), kGateViolation);
  } catch (const DomainError& e) {
    return report_error(out, err, "domain_error", e.what(), kGateViolation);
  }
}

json mesh_summary(const Mesh& mesh)
{
  std::size_t interior = 0;
  for (bool b : mesh.boundary_flags())
    interior += b ? 0 : 1;
  return {{"vertices", mesh.num_vertices()},
          {"triangles", mesh.num_triangles()},
          {"interior_vertices", interior},
          {"area", num(mesh.total_area())}};
}

json to_json(const Field& field)
{
  json v = json::array();
  for (double x : field.values())
    v.push_back(num(x));
  return {{"vertices", field.values().size()}, {"values", std::move(v)}};
}

json to_json(const SolveReport& report, bool include_fields)
{
  json h = json::array();
  for (const auto& r : report.history)
    h.push_back({{"n", r.n},
                 {"norm", num(r.norm)},
                 {"sup", num(r.sup)},
                 {"min_interior", num(r.min_interior)},
                 {"inner_iterations", r.inner_iterations},
                 {"picard_iterations", r.picard_iterations},
                 {"energy", num(r.energy)},
                 {"stationarity", num(r.stationarity)},
                 {"min_nodal", num(r.min_nodal)},
                 {"inequality_violation", num(r.inequality_violation)},
                 {"step_violation", num(r.step_violation)},
                 {"sup_change", num(r.sup_change)}});
  json j = {{"kind", report.kind},
            {"converged", report.converged},
            {"monotonicity_violation", num(report.monotonicity_violation)},
            {"norm_violation", num(report.norm_violation)},
            {"history", std::move(h)}};
  if (include_fields && !report.history.empty())
    j["final_field"] = to_json(report.final_field());
  return j;
}

json to_json(const InequalityVerdict& v)
{
  json j = {{"constant", num(v.constant)},
            {"trials", v.trials},
            {"evaluated", v.records.size()},
            {"violations", v.violations},
            {"witness_trial", v.witness_trial ? json(*v.witness_trial) : json(nullptr)},
            {"witness_is_extremal", v.witness_is_extremal}};
  if (v.witness)
    j["witness"] = to_json(*v.witness);
  return j;
}

json to_json(const ExtremalReport& r)
{
  json starts = json::array();
  for (std::size_t k = 0; k < r.direct.start_values.size(); ++k)
    starts.push_back({{"value", num(r.direct.start_values[k])}, {"converged", bool(r.direct.start_converged[k])}});
  return {{"mu_formula", num(r.mu_formula)},
          {"mu_direct", num(r.mu_direct)},
          {"rel_gap", num(r.rel_gap)},
          {"sobolev_constant", num(r.sobolev_constant)},
          {"zeta_delta", num(r.extremal.zeta)},
          {"normalization_residual", num(r.extremal.normalization_residual)},
          {"residual_pde", num(r.extremal.pde_residual)},
          {"extremal_quotient", num(r.extremal_quotient)},
          {"norm_p", num(r.formula.norm_p)},
          {"load", num(r.formula.load)},
          {"useful_identity_residual", num(r.formula.useful_residual)},
          {"direct",
           {{"best_start", r.direct.best_start},
            {"failed_starts", r.direct.failed_starts},
            {"constraint_residual", num(r.direct.constraint_residual)},
            {"starts", std::move(starts)}}},
          {"inequality_check", {to_json(r.below), to_json(r.above)}},
          {"extremal_field", to_json(r.extremal.field)},
          {"solve", to_json(r.solve, false)}};
}

json to_json(const NormCheckReport& r)
{
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"worst", num(c.worst)},
                      {"tolerance", num(c.tolerance)},
                      {"samples", c.samples},
                      {"passed", c.passed}});
  return {{"norm", r.norm},
          {"p", num(r.p)},
          {"empirical_constant", num(r.empirical_constant)},
          {"passed", r.passed},
          {"checks", std::move(checks)}};
}

void write_history_csv(std::ostream& os, const SolveReport& report)
{
  os << "n,norm,sup,min_interior,inner_iters,energy\n";
  for (const auto& r : report.history)
    os << r.n << ',' << format_double(r.norm) << ',' << format_double(r.sup) << ',' << format_double(r.min_interior)
       << ',' << r.inner_iterations << ',' << format_double(r.energy) << '\n';
}

void write_verdict_csv(std::ostream& os, const InequalityVerdict& verdict)
{
  os << "trial,seed,lhs,rhs,violated\n";
  for (const auto& r : verdict.records)
    os << r.trial << ',' << r.seed << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
       << (r.violated ? "true" : "false") << '\n';
}

std::vector<SweepRow> run_sweep(const Config& base, int jobs)
{
  auto list_or = [&](const char* key, const char* fallback_key, const std::string& fallback) {
    auto l = base.get_list(key);
    if (l.empty())
      l.push_back(base.get_string(fallback_key, fallback));
    return l;
  };
  const auto ps = list_or("sweep_p", "p", "2");
  const auto deltas = list_or("sweep_delta", "delta", "0.5");
  const auto norms = list_or("sweep_norm", "norm", "euclidean");
  const auto nus = base.get_list("sweep_nu");
  if (!nus.empty() && !base.has("s"))
    throw ConfigError("s", "key 's' is required with sweep_nu");

  struct Point
  {
    Config config;
    SweepRow row;
  };
  std::vector<Point> grid;
  const std::vector<std::optional<std::string>> nu_axis =
    nus.empty() ? std::vector<std::optional<std::string>>{std::nullopt}
                : std::vector<std::optional<std::string>>(nus.begin(), nus.end());
  for (const auto& p : ps)
    for (const auto& d : deltas)
      for (const auto& nu : nu_axis)
        for (const auto& n : norms) {
          Point pt{base, {}};
          pt.config.set("p", p);
          pt.config.set("delta", d);
          pt.config.set("norm", n);
          if (nu)
            pt.config.set("weight", "power:" + *nu);
          pt.row.p = pt.config.get_double("p", 0.0);
          pt.row.delta = pt.config.get_double("delta", 0.0);
          pt.row.norm = n;
          if (nu)
            try {
              pt.row.nu = parse_double(*nu, "sweep_nu");
            } catch (const InputError& e) {
              throw ConfigError("sweep_nu", std::string("key 'sweep_nu': ") + e.what());
            }
          grid.push_back(std::move(pt));
        }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      auto& pt = grid[i];
      try {
        const auto spec = extremal_spec(pt.config);
        const auto rep = compute_extremal(spec, extremal_options(pt.config));
        pt.row.mu_formula = rep.mu_formula;
        pt.row.mu_direct = rep.mu_direct;
        pt.row.rel_gap = rep.rel_gap;
        pt.row.converged = rep.solve.converged;
      } catch (const std::exception& e) {
        pt.row.mu_formula = pt.row.mu_direct = pt.row.rel_gap = nan;
        pt.row.converged = false;
        pt.row.error = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(grid.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool)
    t.join();

  std::vector<SweepRow> rows;
  for (auto& pt : grid)
    rows.push_back(std::move(pt.row));
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
  auto cell = [](double v) { return std::isfinite(v) ? format_double(v) : std::string(); };
  os << "p,delta,nu,norm,mu_formula,mu_direct,rel_gap,converged\n";
  for (const auto& r : rows)
    os << cell(r.p) << ',' << cell(r.delta) << ',' << (r.nu ? cell(*r.nu) : std::string()) << ',' << r.norm << ','
       << cell(r.mu_formula) << ',' << cell(r.mu_direct) << ',' << cell(r.rel_gap) << ','
       << (r.converged ? "true" : "false") << '\n';
}

} // namespace fpl::app
