#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fpl {

struct Euclidean
{};

/// l_t norm (sum |x_i|^t)^(1/t), t > 1.
struct LtNorm
{
  double t;
};

/// sqrt(lambda * sqrt(sum x_i^4) + mu * sum x_i^2), lambda, mu > 0.
struct LambdaMuNorm
{
  double lambda;
  double mu;
};

using NormFamily = std::variant<Euclidean, LtNorm, LambdaMuNorm>;

/**
 * A Finsler-Minkowski norm on R^N from one of three closed-form families.
 *
 * All members are pure; a FinslerNorm can be shared freely between threads.
 * Vector arguments must have exactly dimension() entries.
 */
class FinslerNorm
{
public:
  explicit FinslerNorm(NormFamily family, int dimension = 2);

  static FinslerNorm euclidean(int dimension = 2) { return FinslerNorm(Euclidean{}, dimension); }
  static FinslerNorm lt(double t, int dimension = 2) { return FinslerNorm(LtNorm{t}, dimension); }
  static FinslerNorm lambda_mu(double lambda, double mu, int dimension = 2)
  {
    return FinslerNorm(LambdaMuNorm{lambda, mu}, dimension);
  }

  /// Parses `euclidean`, `lt:<t>` or `lambda-mu:<lambda>:<mu>`. Throws ConfigError.
  static FinslerNorm parse(std::string_view tag, int dimension = 2);

  const NormFamily& family() const noexcept { return family_; }
  int dimension() const noexcept { return dim_; }
  std::string tag() const;

  /// True for the Euclidean norm and for l_t with t == 2.
  bool is_euclidean() const noexcept;
  /// True when the norm is l_t with t == q (Euclidean counts as t == 2).
  bool is_lt_with(double q) const noexcept;

  double evaluate(std::span<const double> x) const;

  /// Gradient of F at x != 0, written into `out`. Throws DomainError at x == 0.
  void gradient(std::span<const double> x, std::span<double> out) const;
  std::vector<double> gradient(std::span<const double> x) const;

  /// Sampled approximation of the dual norm sup <x, xi> / F(x).
  double dual_evaluate(std::span<const double> xi, int directions) const;

  /// Closed-form constants with c1 |x| <= F(x) <= c2 |x|.
  double lower_equivalence() const noexcept { return c1_; }
  double upper_equivalence() const noexcept { return c2_; }

  // Unchecked 2D kernels used in assembly loops.
  double evaluate2(double x0, double x1) const noexcept;
  void gradient2(double x0, double x1, double& g0, double& g1) const noexcept;

private:
  void check_dim(std::size_t n) const;

  NormFamily family_;
  int dim_;
  double c1_ = 1.0;
  double c2_ = 1.0;
};

/// The norm together with the exponent p of the operator div(F(grad u)^{p-1} grad F(grad u)).
class FluxParams
{
public:
  /// Rejects p <= 1, and p < 2 unless the norm is Euclidean or l_p (GateViolation).
  FluxParams(FinslerNorm norm, double p);

  const FinslerNorm& norm() const noexcept { return norm_; }
  double p() const noexcept { return p_; }

  /// a(x) = F(x)^{p-1} grad F(x), extended by a(0) = 0.
  void flux(std::span<const double> x, std::span<double> out) const;
  std::vector<double> flux(std::span<const double> x) const;

  /// <a(x) - a(y), x - y>.
  double monotonicity_gap(std::span<const double> x, std::span<const double> y) const;

  // 2D kernels: F^p and the flux.
  double energy_density2(double x0, double x1) const noexcept;
  void flux2(double x0, double x1, double& a0, double& a1) const noexcept;

private:
  FinslerNorm norm_;
  double p_;
};

} // namespace fpl
