#include "fpl/config.hpp"

#include "fpl/error.hpp"
#include "fpl/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fpl {

const std::vector<std::string>& Config::known_keys()
{
  static const std::vector<std::string> keys{
    "domain", "p", "delta", "gamma", "norm", "weight", "s", "f", "g", "h", "kind", "n_max_exp",
    "inner_tol", "outer_tol", "seed", "max_inner_iters", "max_picard_iters", "theta", "inequality_tests", "r",
    "restarts", "trials", "constant", "sweep_p", "sweep_delta", "sweep_nu", "sweep_norm"};
  return keys;
}

Config Config::parse(std::string_view text, const std::string& origin)
{
  Config c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty())
      continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      const std::string key(trim(body));
      throw ConfigError(key, origin + ":" + std::to_string(lineno) + ": expected `key = value`, got '" +
                                 std::string(body) + "'");
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key.empty())
      throw ConfigError(key, origin + ":" + std::to_string(lineno) + ": empty key");
    if (value.empty())
      throw ConfigError(key, origin + ":" + std::to_string(lineno) + ": empty value for key '" + key + "'");
    c.set(key, value);
  }
  return c;
}

Config Config::load(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config", "cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void Config::set(const std::string& key, const std::string& value)
{
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    throw ConfigError(key, "unknown config key '" + key + "'");
  entries_[key] = value;
}

void Config::apply_override(std::string_view assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(std::string(trim(assignment)), "override must be key=value, got '" + std::string(assignment) + "'");
  const std::string key(trim(assignment.substr(0, eq)));
  const std::string value(trim(assignment.substr(eq + 1)));
  if (value.empty())
    throw ConfigError(key, "empty value for key '" + key + "'");
  set(key, value);
}

std::optional<std::string> Config::get(const std::string& key) const
{
  const auto it = entries_.find(key);
  if (it == entries_.end())
    return std::nullopt;
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) const
{
  const auto v = get(key);
  if (!v)
    return fallback;
  try {
    return parse_double(*v, key);
  } catch (const InputError& e) {
    throw ConfigError(key, "key '" + key + "': " + e.what());
  }
}

long long Config::get_int(const std::string& key, long long fallback) const
{
  const auto v = get(key);
  if (!v)
    return fallback;
  try {
    return parse_int(*v, key);
  } catch (const InputError& e) {
    throw ConfigError(key, "key '" + key + "': " + e.what());
  }
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const
{
  return get(key).value_or(fallback);
}

std::vector<std::string> Config::get_list(const std::string& key) const
{
  std::vector<std::string> out;
  const auto v = get(key);
  if (!v)
    return out;
  for (const auto& part : split(*v, ','))
    if (const auto t = trim(part); !t.empty())
      out.emplace_back(t);
  if (out.empty())
    throw ConfigError(key, "key '" + key + "': empty list");
  return out;
}

namespace {

Expression expression_for(const Config& c, const std::string& key, double fallback)
{
  const auto v = c.get(key);
  if (!v)
    return Expression(fallback);
  try {
    return Expression::parse(*v);
  } catch (const InputError& e) {
    throw ConfigError(key, "key '" + key + "': " + e.what());
  }
}

} // namespace

ProblemSpec make_problem_spec(const Config& c, int default_max_exponent)
{
  ProblemSpec spec;
  spec.domain = DomainSpec::parse(c.get_string("domain", "square:32"));
  spec.p = c.get_double("p", 2.0);
  spec.norm = FinslerNorm::parse(c.get_string("norm", "euclidean"));
  std::optional<double> s;
  if (c.has("s"))
    s = c.get_double("s", 0.0);
  spec.weight = WeightSpec::parse(c.get_string("weight", "const:1"), s);
  if (c.has("r"))
    spec.critical_r = c.get_double("r", 0.0);

  const std::string kind = c.get_string("kind", "mixed");
  if (kind == "mixed") {
    MixedSingular m;
    m.delta = c.get_double("delta", 0.5);
    m.gamma = c.get_double("gamma", 0.5);
    m.f = expression_for(c, "f", 1.0);
    m.g = expression_for(c, "g", 0.0);
    spec.kind = m;
    if (c.has("h"))
      throw ConfigError("h", "key 'h' only applies to kind = exponential");
  } else if (kind == "exponential") {
    spec.kind = ExponentialSingular{expression_for(c, "h", 1.0)};
    for (const char* k : {"f", "g", "delta", "gamma"})
      if (c.has(k))
        throw ConfigError(k, std::string("key '") + k + "' only applies to kind = mixed");
  } else {
    throw ConfigError("kind", "key 'kind': expected mixed or exponential, got '" + kind + "'");
  }

  auto& o = spec.options;
  const long long max_exp = c.get_int("n_max_exp", default_max_exponent);
  if (max_exp < 0 || max_exp > 40)
    throw ConfigError("n_max_exp", "key 'n_max_exp': must lie in [0, 40]");
  o.n_schedule = geometric_schedule(static_cast<int>(max_exp));
  o.inner_tol = c.get_double("inner_tol", o.inner_tol);
  o.outer_tol = c.get_double("outer_tol", o.outer_tol);
  const long long seed = c.get_int("seed", static_cast<long long>(o.seed));
  if (seed < 0)
    throw ConfigError("seed", "key 'seed': must be nonnegative");
  o.seed = static_cast<std::uint64_t>(seed);
  o.max_inner_iters = static_cast<int>(c.get_int("max_inner_iters", o.max_inner_iters));
  o.max_picard_iters = static_cast<int>(c.get_int("max_picard_iters", o.max_picard_iters));
  o.picard_theta = c.get_double("theta", o.picard_theta);
  o.inequality_tests = static_cast<int>(c.get_int("inequality_tests", o.inequality_tests));
  if (o.inequality_tests < 0)
    throw ConfigError("inequality_tests", "key 'inequality_tests': must be nonnegative");

  const auto check = [](const char* key, bool ok, const char* what) {
    if (!ok)
      throw ConfigError(key, std::string("key '") + key + "': " + what);
  };
  check("inner_tol", o.inner_tol > 0.0, "must be positive");
  check("outer_tol", o.outer_tol > 0.0, "must be positive");
  check("max_inner_iters", o.max_inner_iters >= 1, "must be >= 1");
  check("max_picard_iters", o.max_picard_iters >= 1, "must be >= 1");
  check("theta", o.picard_theta > 0.0 && o.picard_theta <= 1.0, "must lie in (0, 1]");

  spec.validate();
  return spec;
}

} // namespace fpl
