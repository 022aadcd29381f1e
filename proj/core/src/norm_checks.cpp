#include "fpl/norm_checks.hpp"

#include "fpl/random_fields.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace fpl {

namespace {

using Vec = std::array<double, 2>;

double length(const Vec& v)
{
  return std::hypot(v[0], v[1]);
}

class Sampler
{
public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.next(); }

  /// Point in [-1,1]^2 scaled by 10^U(-2,2), never zero.
  Vec point()
  {
    for (;;) {
      Vec v{uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
      if (length(v) > 1e-3) {
        const double s = std::pow(10.0, uniform(-2.0, 2.0));
        return {v[0] * s, v[1] * s};
      }
    }
  }

  /// Signed scale +-10^U(-3,3).
  double scale()
  {
    const double t = std::pow(10.0, uniform(-3.0, 3.0));
    return uniform(0.0, 1.0) < 0.5 ? -t : t;
  }

private:
  UniformStream rng_;
};

struct Worst
{
  PropertyCheck c;

  Worst(std::string name, double tol) { c.name = std::move(name), c.tolerance = tol; }
  void add(double v)
  {
    c.worst = std::max(c.worst, v);
    ++c.samples;
  }
  PropertyCheck done(bool at_most = true)
  {
    c.passed = at_most ? c.worst <= c.tolerance : c.worst > c.tolerance;
    return c;
  }
};

} // namespace

NormCheckReport check_norm_properties(const FinslerNorm& norm, double p, int samples, std::uint64_t seed)
{
  const FluxParams params(norm, p);
  NormCheckReport rep;
  rep.norm = norm.tag();
  rep.p = p;
  Sampler rng(seed);

  Worst homog("homogeneity", 1e-12);
  Worst euler("euler_identity", 1e-8);
  Worst fd("gradient_finite_difference", 1e-8);
  Worst equiv("norm_equivalence", 1e-12);
  Worst convex("midpoint_convexity", 1e-12);
  Worst fluxh("flux_homogeneity", 1e-10);
  Worst sign("gradient_sign_rule", 1e-12);
  long long strict_fail = 0;
  long long strict_count = 0;
  long long mono_fail = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  double min_ratio = std::numeric_limits<double>::infinity();

  const double c1 = norm.lower_equivalence();
  const double c2 = norm.upper_equivalence();

  for (int k = 0; k < samples; ++k) {
    const Vec x = rng.point();
    const double t = rng.scale();
    const double fx = norm.evaluate(x);
    const Vec tx{t * x[0], t * x[1]};
    homog.add(std::abs(norm.evaluate(tx) - std::abs(t) * fx) / (fx * std::max(1.0, std::abs(t))));

    const auto g = norm.gradient(x);
    euler.add(std::abs(x[0] * g[0] + x[1] * g[1] - fx) / fx);
    const auto gt = norm.gradient(tx);
    const double sg = t > 0.0 ? 1.0 : -1.0;
    sign.add(std::max(std::abs(gt[0] - sg * g[0]), std::abs(gt[1] - sg * g[1])) /
             std::max(std::abs(g[0]), std::abs(g[1])));

    const double lx = length(x);
    equiv.add(std::max(c1 * lx - fx, fx - c2 * lx) / (c2 * lx));

    // Central differences on O(1) points away from the axes.
    {
      Vec u{rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)};
      if (rng.uniform(0.0, 1.0) < 0.5)
        u[0] = -u[0];
      if (rng.uniform(0.0, 1.0) < 0.5)
        u[1] = -u[1];
      const auto gu = norm.gradient(u);
      const double h = 1e-6;
      for (int i = 0; i < 2; ++i) {
        Vec a = u;
        Vec b = u;
        a[i] += h;
        b[i] -= h;
        fd.add(std::abs((norm.evaluate(a) - norm.evaluate(b)) / (2.0 * h) - gu[i]));
      }
    }

    const Vec y0{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const Vec x0{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const Vec mid{0.5 * (x0[0] + y0[0]), 0.5 * (x0[1] + y0[1])};
    const double fm = norm.evaluate(mid);
    const double avg = 0.5 * (norm.evaluate(x0) + norm.evaluate(y0));
    convex.add(fm - avg);
    const double cross = std::abs(x0[0] * y0[1] - x0[1] * y0[0]);
    if (cross > 1e-2 * length(x0) * length(y0)) {
      ++strict_count;
      if (!(fm < avg))
        ++strict_fail;
    }

    const Vec d{x0[0] - y0[0], x0[1] - y0[1]};
    if (length(d) > 1e-6) {
      const double gap = params.monotonicity_gap(x0, y0);
      if (!(gap > 0.0))
        ++mono_fail;
      min_gap = std::min(min_gap, gap);
      min_ratio = std::min(min_ratio, gap / std::pow(norm.evaluate(d), p));
    }

    const auto ax = params.flux(x);
    const auto atx = params.flux(tx);
    const double at = std::pow(std::abs(t), p - 2.0) * t;
    const double ascale = std::max(length({ax[0], ax[1]}), std::numeric_limits<double>::min());
    fluxh.add(std::hypot(atx[0] - at * ax[0], atx[1] - at * ax[1]) / (ascale * std::pow(std::abs(t), p - 1.0)));
  }

  rep.checks.push_back(homog.done());
  rep.checks.push_back(euler.done());
  rep.checks.push_back(sign.done());
  rep.checks.push_back(fd.done());
  rep.checks.push_back(equiv.done());
  rep.checks.push_back(convex.done());
  rep.checks.push_back({"strict_convexity_failures", static_cast<double>(strict_fail), 0.0, strict_count,
                        strict_fail == 0});
  rep.checks.push_back({"monotonicity_failures", static_cast<double>(mono_fail), 0.0, samples, mono_fail == 0});
  {
    Worst m("monotonicity_min_gap", 0.0);
    m.c.worst = min_gap;
    m.c.samples = samples;
    rep.checks.push_back(m.done(false));
  }
  rep.checks.push_back(fluxh.done());
  rep.empirical_constant = min_ratio;
  if (p >= 2.0) {
    Worst m("finsler_inequality_constant", 0.0);
    m.c.worst = min_ratio;
    m.c.samples = samples;
    rep.checks.push_back(m.done(false));
  }

  // Dual nesting: more directions never lowers the sampled maximum.
  {
    long long fails = 0;
    long long n = 0;
    for (int k = 0; k < 20; ++k) {
      const Vec xi = rng.point();
      double prev = 0.0;
      for (int dirs = 8; dirs <= 2048; dirs *= 4) {
        const double v = norm.dual_evaluate(xi, dirs);
        if (v < prev)
          ++fails;
        prev = v;
        ++n;
      }
    }
    rep.checks.push_back({"dual_nesting_failures", static_cast<double>(fails), 0.0, n, fails == 0});
  }

  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(), [](const PropertyCheck& c) { return c.passed; });
  return rep;
}

} // namespace fpl
