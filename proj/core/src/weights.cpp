#include "fpl/weights.hpp"

#include "fpl/error.hpp"
#include "fpl/text.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fpl {

OpenInterval admissible_power_range(int dimension, double s)
{
  if (!(s > 0.0))
    throw InputError("admissible_power_range: s must be positive");
  return {-static_cast<double>(dimension), static_cast<double>(dimension) / s};
}

WeightSpec::WeightSpec(std::variant<ConstantWeight, PowerWeight> family, int dimension, std::optional<double> s)
  : family_(family), dim_(dimension), s_(s)
{
  if (dim_ < 2)
    throw InputError("WeightSpec: dimension must be at least 2");
  if (s_ && !(*s_ > 0.0 && std::isfinite(*s_)))
    throw GateViolation("weight: s must be a positive finite number");
  if (const auto* c = std::get_if<ConstantWeight>(&family_)) {
    if (!(c->c > 0.0) || !std::isfinite(c->c))
      throw GateViolation("weight: constant weight must be positive");
  } else {
    const double nu = std::get<PowerWeight>(family_).nu;
    if (!s_)
      throw GateViolation("weight: power weights require s");
    const auto range = admissible_power_range(dim_, *s_);
    if (!range.contains(nu)) {
      std::ostringstream os;
      os << "weight: power exponent nu = " << nu << " outside the admissible range (" << range.lo << ", "
         << range.hi << ") for s = " << *s_;
      throw GateViolation(os.str());
    }
  }
}

WeightSpec WeightSpec::parse(std::string_view tag, std::optional<double> s, int dimension)
{
  const auto parts = split(trim(tag), ':');
  const std::string key = "weight";
  try {
    if (parts.size() == 2 && parts[0] == "const")
      return WeightSpec(ConstantWeight{parse_double(parts[1], key)}, dimension, s);
    if (parts.size() == 2 && parts[0] == "power")
      return WeightSpec(PowerWeight{parse_double(parts[1], key)}, dimension, s);
  } catch (const InputError& e) {
    throw ConfigError(key, std::string("invalid weight tag '") + std::string(tag) + "': " + e.what());
  }
  throw ConfigError(key, "unknown weight tag '" + std::string(tag) + "' (expected const:<c> or power:<nu>)");
}

std::string WeightSpec::tag() const
{
  if (const auto* c = std::get_if<ConstantWeight>(&family_))
    return "const:" + format_double(c->c);
  return "power:" + format_double(std::get<PowerWeight>(family_).nu);
}

void WeightSpec::validate_for(double p) const
{
  if (!s_)
    return;
  const double s = *s_;
  const double lo_closed = 1.0 / (p - 1.0);
  const double lo_open = dim_ / p;
  if (s < lo_closed) {
    std::ostringstream os;
    os << "s = " << s << " violates s >= 1/(p-1) = " << lo_closed;
    throw GateViolation(os.str());
  }
  if (!(s > lo_open)) {
    std::ostringstream os;
    os << "s = " << s << " violates s > N/p = " << lo_open;
    throw GateViolation(os.str());
  }
}

double WeightSpec::at_radius(double r) const noexcept
{
  if (const auto* c = std::get_if<ConstantWeight>(&family_))
    return c->c;
  return std::pow(r, std::get<PowerWeight>(family_).nu);
}

double WeightSpec::operator()(double x, double y) const noexcept
{
  if (const auto* c = std::get_if<ConstantWeight>(&family_))
    return c->c;
  return at_radius(std::hypot(x, y));
}

std::string_view to_string(Regime r)
{
  switch (r) {
  case Regime::Subcritical:
    return "subcritical";
  case Regime::Critical:
    return "critical";
  case Regime::Supercritical:
    return "supercritical";
  }
  return "unknown";
}

namespace {

double conjugate(double x)
{
  return x / (x - 1.0);
}

} // namespace

Threshold ExponentTable::m_delta(double delta) const
{
  if (!(delta > 0.0 && delta < 1.0))
    throw InputError("exponent must lie in (0, 1)");
  switch (regime) {
  case Regime::Subcritical:
    return {conjugate(p_s_star / (1.0 - delta)), false};
  case Regime::Critical:
    // "m > 1": any exponent strictly above 1.
    return {1.0, true};
  case Regime::Supercritical:
    return {1.0, false};
  }
  return {1.0, false};
}

Threshold ExponentTable::q_threshold() const
{
  switch (regime) {
  case Regime::Subcritical:
    return {p_s_star / (p_s_star - p), true};
  case Regime::Critical:
    return {r / (r - p), true};
  case Regime::Supercritical:
    return {1.0, false};
  }
  return {1.0, false};
}

ExponentTable exponent_table(double p, const WeightSpec& weight, std::optional<double> critical_r)
{
  if (!(p > 1.0) || !std::isfinite(p))
    throw GateViolation("p must lie in (1, inf)");
  weight.validate_for(p);

  ExponentTable t;
  t.p = p;
  t.s = weight.s();
  t.dimension = weight.dimension();
  t.r = critical_r.value_or(2.0 * p);
  if (!(t.r > p))
    throw GateViolation("critical exponent r must exceed p");

  if (weight.is_constant()) {
    t.p_s = p;
  } else {
    const double s = *weight.s();
    t.p_s = p * s / (s + 1.0);
  }

  const double n = t.dimension;
  if (std::abs(t.p_s - n) <= 1e-12 * n) {
    t.regime = Regime::Critical;
    t.p_s_star = std::numeric_limits<double>::infinity();
  } else if (t.p_s < n) {
    t.regime = Regime::Subcritical;
    t.p_s_star = n * t.p_s / (n - t.p_s);
  } else {
    t.regime = Regime::Supercritical;
    t.p_s_star = std::numeric_limits<double>::infinity();
  }
  return t;
}

IntegrabilityVerdict validate_data_integrability(const ExponentTable& table, double delta, double gamma,
                                                 double data_exponent)
{
  if (!(delta > 0.0 && delta < 1.0))
    throw InputError("validate_data_integrability: delta must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw InputError("validate_data_integrability: gamma must lie in (0, 1)");

  const auto m = table.m_delta(delta);
  const auto r = table.r_gamma(gamma);
  Threshold existence = m;
  if (r.value > m.value || (r.value == m.value && r.strict))
    existence = r;

  IntegrabilityVerdict v{existence, table.q_threshold()};
  v.existence = existence.accepts(data_exponent);
  v.bounded = v.linf_threshold.accepts(data_exponent);
  return v;
}

} // namespace fpl
