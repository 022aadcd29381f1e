#include "fpl/finsler.hpp"

#include "fpl/error.hpp"
#include "fpl/text.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace fpl {

namespace {

template <class... Ts>
struct Overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double max_abs(std::span<const double> x)
{
  double m = 0.0;
  for (double v : x)
    m = std::max(m, std::abs(v));
  return m;
}

// Base-2 radical inverse; prefixes of the sequence are nested and equidistributed.
double van_der_corput(std::uint64_t k)
{
  double result = 0.0;
  double base = 0.5;
  while (k != 0) {
    if (k & 1U)
      result += base;
    k >>= 1U;
    base *= 0.5;
  }
  return result;
}

} // namespace

FinslerNorm::FinslerNorm(NormFamily family, int dimension) : family_(family), dim_(dimension)
{
  if (dim_ < 2)
    throw InputError("FinslerNorm: dimension must be at least 2");
  const double n = dim_;
  std::visit(Overloaded{
               [&](const Euclidean&) {
                 c1_ = 1.0;
                 c2_ = 1.0;
               },
               [&](const LtNorm& lt) {
                 if (!(lt.t > 1.0) || !std::isfinite(lt.t))
                   throw InputError("FinslerNorm: l_t requires t > 1");
                 // |x|_t vs |x|_2: the smaller-index norm dominates, ratio at most N^{|1/t-1/2|}.
                 const double gap = std::pow(n, std::abs(1.0 / lt.t - 0.5));
                 if (lt.t >= 2.0) {
                   c1_ = 1.0 / gap;
                   c2_ = 1.0;
                 } else {
                   c1_ = 1.0;
                   c2_ = gap;
                 }
               },
               [&](const LambdaMuNorm& lm) {
                 if (!(lm.lambda > 0.0) || !(lm.mu > 0.0))
                   throw InputError("FinslerNorm: lambda-mu requires lambda, mu > 0");
                 // N^{-1/4} |x| <= |x|_4 <= |x|.
                 c1_ = std::sqrt(lm.lambda / std::sqrt(n) + lm.mu);
                 c2_ = std::sqrt(lm.lambda + lm.mu);
               },
             },
             family_);
}

FinslerNorm FinslerNorm::parse(std::string_view tag, int dimension)
{
  const auto parts = split(trim(tag), ':');
  const std::string key = "norm";
  try {
    if (parts.size() == 1 && parts[0] == "euclidean")
      return euclidean(dimension);
    if (parts.size() == 2 && parts[0] == "lt")
      return lt(parse_double(parts[1], key), dimension);
    if (parts.size() == 3 && parts[0] == "lambda-mu")
      return lambda_mu(parse_double(parts[1], key), parse_double(parts[2], key), dimension);
  } catch (const InputError& e) {
    throw ConfigError(key, std::string("invalid norm tag '") + std::string(tag) + "': " + e.what());
  }
  throw ConfigError(key, "unknown norm tag '" + std::string(tag) +
                           "' (expected euclidean, lt:<t> or lambda-mu:<lambda>:<mu>)");
}

std::string FinslerNorm::tag() const
{
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
               [&](const Euclidean&) { os << "euclidean"; },
               [&](const LtNorm& lt) { os << "lt:" << lt.t; },
               [&](const LambdaMuNorm& lm) { os << "lambda-mu:" << lm.lambda << ':' << lm.mu; },
             },
             family_);
  return os.str();
}

bool FinslerNorm::is_euclidean() const noexcept
{
  return is_lt_with(2.0);
}

bool FinslerNorm::is_lt_with(double q) const noexcept
{
  if (std::holds_alternative<Euclidean>(family_))
    return q == 2.0;
  if (const auto* lt = std::get_if<LtNorm>(&family_))
    return std::abs(lt->t - q) <= 1e-12 * std::max(1.0, q);
  return false;
}

void FinslerNorm::check_dim(std::size_t n) const
{
  if (n != static_cast<std::size_t>(dim_))
    throw InputError("FinslerNorm: expected a vector of dimension " + std::to_string(dim_) +
                     ", got " + std::to_string(n));
}

double FinslerNorm::evaluate(std::span<const double> x) const
{
  check_dim(x.size());
  const double m = max_abs(x);
  if (m == 0.0)
    return 0.0;
  return std::visit(Overloaded{
                      [&](const Euclidean&) {
                        double s = 0.0;
                        for (double v : x)
                          s += (v / m) * (v / m);
                        return m * std::sqrt(s);
                      },
                      [&](const LtNorm& lt) {
                        double s = 0.0;
                        for (double v : x)
                          s += std::pow(std::abs(v) / m, lt.t);
                        return m * std::pow(s, 1.0 / lt.t);
                      },
                      [&](const LambdaMuNorm& lm) {
                        double q = 0.0;
                        double s = 0.0;
                        for (double v : x) {
                          const double y2 = (v / m) * (v / m);
                          q += y2 * y2;
                          s += y2;
                        }
                        return m * std::sqrt(lm.lambda * std::sqrt(q) + lm.mu * s);
                      },
                    },
                    family_);
}

void FinslerNorm::gradient(std::span<const double> x, std::span<double> out) const
{
  check_dim(x.size());
  check_dim(out.size());
  const double m = max_abs(x);
  if (m == 0.0)
    throw DomainError("FinslerNorm::gradient: F is not differentiable at the origin");

  std::visit(Overloaded{
               [&](const Euclidean&) {
                 double s = 0.0;
                 for (double v : x)
                   s += (v / m) * (v / m);
                 const double r = std::sqrt(s);
                 for (std::size_t i = 0; i < x.size(); ++i)
                   out[i] = (x[i] / m) / r;
               },
               [&](const LtNorm& lt) {
                 double s = 0.0;
                 for (double v : x)
                   s += std::pow(std::abs(v) / m, lt.t);
                 const double g = std::pow(s, 1.0 / lt.t);
                 for (std::size_t i = 0; i < x.size(); ++i) {
                   const double y = std::abs(x[i]) / m;
                   const double mag = std::pow(y / g, lt.t - 1.0);
                   out[i] = x[i] < 0.0 ? -mag : (x[i] > 0.0 ? mag : 0.0);
                 }
               },
               [&](const LambdaMuNorm& lm) {
                 double q = 0.0;
                 double s = 0.0;
                 for (double v : x) {
                   const double y2 = (v / m) * (v / m);
                   q += y2 * y2;
                   s += y2;
                 }
                 const double sq = std::sqrt(q);
                 const double g = std::sqrt(lm.lambda * sq + lm.mu * s);
                 for (std::size_t i = 0; i < x.size(); ++i) {
                   const double y = x[i] / m;
                   out[i] = (lm.lambda * y * y * y / sq + lm.mu * y) / g;
                 }
               },
             },
             family_);
}

std::vector<double> FinslerNorm::gradient(std::span<const double> x) const
{
  std::vector<double> out(x.size());
  gradient(x, out);
  return out;
}

double FinslerNorm::dual_evaluate(std::span<const double> xi, int directions) const
{
  check_dim(xi.size());
  if (directions < 8)
    throw InputError("dual_evaluate: at least 8 directions are required");
  const double xi_norm = [&] {
    double s = 0.0;
    for (double v : xi)
      s += v * v;
    return std::sqrt(s);
  }();
  if (xi_norm == 0.0)
    return 0.0;

  std::vector<double> u(xi.size());
  auto ratio = [&]() {
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      dot += u[i] * xi[i];
    return dot / evaluate(u);
  };

  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = xi[i] / xi_norm;
  double best = ratio();

  if (dim_ == 2) {
    for (int k = 0; k < directions; ++k) {
      const double theta = 2.0 * std::numbers::pi * van_der_corput(static_cast<std::uint64_t>(k));
      u[0] = std::cos(theta);
      u[1] = std::sin(theta);
      best = std::max(best, ratio());
    }
  } else {
    // Fixed seed so that direction sets are prefixes of one stream.
    std::mt19937_64 rng(0x5eed5eedULL);
    std::normal_distribution<double> normal;
    for (int k = 0; k < directions; ++k) {
      double s = 0.0;
      for (auto& v : u) {
        v = normal(rng);
        s += v * v;
      }
      s = std::sqrt(s);
      if (s == 0.0)
        continue;
      for (auto& v : u)
        v /= s;
      best = std::max(best, ratio());
    }
  }
  return std::max(best, 0.0);
}

double FinslerNorm::evaluate2(double x0, double x1) const noexcept
{
  const double m = std::max(std::abs(x0), std::abs(x1));
  if (m == 0.0)
    return 0.0;
  const double y0 = x0 / m;
  const double y1 = x1 / m;
  if (const auto* lt = std::get_if<LtNorm>(&family_)) {
    if (lt->t != 2.0)
      return m * std::pow(std::pow(std::abs(y0), lt->t) + std::pow(std::abs(y1), lt->t), 1.0 / lt->t);
  } else if (const auto* lm = std::get_if<LambdaMuNorm>(&family_)) {
    const double a = y0 * y0;
    const double b = y1 * y1;
    return m * std::sqrt(lm->lambda * std::sqrt(a * a + b * b) + lm->mu * (a + b));
  }
  return m * std::sqrt(y0 * y0 + y1 * y1);
}

void FinslerNorm::gradient2(double x0, double x1, double& g0, double& g1) const noexcept
{
  const double m = std::max(std::abs(x0), std::abs(x1));
  if (m == 0.0) {
    g0 = g1 = 0.0;
    return;
  }
  const double y0 = x0 / m;
  const double y1 = x1 / m;
  if (const auto* lt = std::get_if<LtNorm>(&family_)) {
    if (lt->t != 2.0) {
      const double a0 = std::abs(y0);
      const double a1 = std::abs(y1);
      const double g = std::pow(std::pow(a0, lt->t) + std::pow(a1, lt->t), 1.0 / lt->t);
      g0 = std::copysign(std::pow(a0 / g, lt->t - 1.0), y0);
      g1 = std::copysign(std::pow(a1 / g, lt->t - 1.0), y1);
      if (y0 == 0.0)
        g0 = 0.0;
      if (y1 == 0.0)
        g1 = 0.0;
      return;
    }
  } else if (const auto* lm = std::get_if<LambdaMuNorm>(&family_)) {
    const double a = y0 * y0;
    const double b = y1 * y1;
    const double sq = std::sqrt(a * a + b * b);
    const double g = std::sqrt(lm->lambda * sq + lm->mu * (a + b));
    g0 = (lm->lambda * a * y0 / sq + lm->mu * y0) / g;
    g1 = (lm->lambda * b * y1 / sq + lm->mu * y1) / g;
    return;
  }
  const double r = std::sqrt(y0 * y0 + y1 * y1);
  g0 = y0 / r;
  g1 = y1 / r;
}

FluxParams::FluxParams(FinslerNorm norm, double p) : norm_(std::move(norm)), p_(p)
{
  if (!(p_ > 1.0) || !std::isfinite(p_))
    throw GateViolation("p must lie in (1, inf), got " + std::to_string(p_));
  if (p_ < 2.0 && !norm_.is_euclidean() && !norm_.is_lt_with(p_))
    throw GateViolation("p = " + std::to_string(p_) + " < 2 is only admitted for the euclidean norm or lt:p; got " +
                        norm_.tag());
}

void FluxParams::flux(std::span<const double> x, std::span<double> out) const
{
  const double f = norm_.evaluate(x);
  if (out.size() != x.size())
    throw InputError("flux: output dimension mismatch");
  if (f == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  norm_.gradient(x, out);
  const double scale = std::pow(f, p_ - 1.0);
  for (auto& v : out)
    v *= scale;
}

std::vector<double> FluxParams::flux(std::span<const double> x) const
{
  std::vector<double> out(x.size());
  flux(x, out);
  return out;
}

double FluxParams::monotonicity_gap(std::span<const double> x, std::span<const double> y) const
{
  if (x.size() != y.size())
    throw InputError("monotonicity_gap: dimension mismatch");
  const auto ax = flux(x);
  const auto ay = flux(y);
  double gap = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    gap += (ax[i] - ay[i]) * (x[i] - y[i]);
  return gap;
}

double FluxParams::energy_density2(double x0, double x1) const noexcept
{
  const double f = norm_.evaluate2(x0, x1);
  if (p_ == 2.0)
    return f * f;
  return std::pow(f, p_);
}

void FluxParams::flux2(double x0, double x1, double& a0, double& a1) const noexcept
{
  const double f = norm_.evaluate2(x0, x1);
  if (f == 0.0) {
    a0 = a1 = 0.0;
    return;
  }
  if (p_ == 2.0 && norm_.is_euclidean()) {
    a0 = x0;
    a1 = x1;
    return;
  }
  double g0 = 0.0;
  double g1 = 0.0;
  norm_.gradient2(x0, x1, g0, g1);
  const double scale = p_ == 2.0 ? f : std::pow(f, p_ - 1.0);
  a0 = scale * g0;
  a1 = scale * g1;
}

} // namespace fpl
