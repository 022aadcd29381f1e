#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace fpl {

struct ConstantWeight
{
  double c;
};

/// w(x) = |x|^nu, measured from the origin.
struct PowerWeight
{
  double nu;
};

struct OpenInterval
{
  double lo;
  double hi;

  bool contains(double v) const noexcept { return v > lo && v < hi; }
};

/// Interval of power exponents nu for which |x|^nu lies in the weight class W_p^s: (-N, N/s).
OpenInterval admissible_power_range(int dimension, double s);

/**
 * A weight family together with the integrability exponent s (w^{-s} in L^1).
 *
 * Construction checks the family-level invariants; the dependence of s on p
 * is checked by exponent_table() / validate_for().
 */
class WeightSpec
{
public:
  WeightSpec(std::variant<ConstantWeight, PowerWeight> family, int dimension = 2,
             std::optional<double> s = std::nullopt);

  static WeightSpec constant(double c = 1.0, int dimension = 2) { return WeightSpec(ConstantWeight{c}, dimension); }
  static WeightSpec power(double nu, double s, int dimension = 2) { return WeightSpec(PowerWeight{nu}, dimension, s); }

  /// Parses `const:<c>` or `power:<nu>`. Throws ConfigError.
  static WeightSpec parse(std::string_view tag, std::optional<double> s, int dimension = 2);

  const std::variant<ConstantWeight, PowerWeight>& family() const noexcept { return family_; }
  int dimension() const noexcept { return dim_; }
  std::optional<double> s() const noexcept { return s_; }
  bool is_constant() const noexcept { return std::holds_alternative<ConstantWeight>(family_); }
  std::string tag() const;

  /// Throws GateViolation if s is supplied but outside I = [1/(p-1), inf) ∩ (N/p, inf).
  void validate_for(double p) const;

  /// w at a point with Euclidean distance `r` from the origin.
  double at_radius(double r) const noexcept;
  double operator()(double x, double y) const noexcept;

private:
  std::variant<ConstantWeight, PowerWeight> family_;
  int dim_;
  std::optional<double> s_;
};

enum class Regime
{
  Subcritical,
  Critical,
  Supercritical
};

std::string_view to_string(Regime r);

/// A lower bound on a Lebesgue exponent. `strict` means the bound itself does not qualify.
struct Threshold
{
  double value;
  bool strict;

  bool accepts(double exponent) const noexcept { return strict ? exponent > value : exponent >= value; }
};

/**
 * Embedding exponents of the weighted space and the data-integrability thresholds they induce.
 *
 * For constant weights the unweighted exponent p plays the role of p_s.
 * p_s_star is +infinity outside the subcritical regime.
 */
struct ExponentTable
{
  double p = 0.0;
  std::optional<double> s;
  int dimension = 2;
  double p_s = 0.0;
  double p_s_star = 0.0;
  Regime regime = Regime::Subcritical;
  double r = 0.0; ///< auxiliary exponent r > p for the critical L^inf threshold

  /// Existence threshold for f in L^m; m_delta.
  Threshold m_delta(double delta) const;
  /// Existence threshold for g; r_gamma (same formula with gamma).
  Threshold r_gamma(double gamma) const { return m_delta(gamma); }
  /// L^inf regularity threshold for data in L^q.
  Threshold q_threshold() const;
};

/// `critical_r` defaults to 2p. Throws GateViolation when s lies outside I or critical_r <= p.
ExponentTable exponent_table(double p, const WeightSpec& weight, std::optional<double> critical_r = std::nullopt);

struct IntegrabilityVerdict
{
  Threshold existence_threshold;
  Threshold linf_threshold;
  bool existence = false;
  bool bounded = false;
};

/// Checks a data exponent (use +inf for bounded data) against both thresholds. delta, gamma in (0,1).
IntegrabilityVerdict validate_data_integrability(const ExponentTable& table, double delta, double gamma,
                                                 double data_exponent);

} // namespace fpl
