#include "fpl/descent.hpp"

#include "fpl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fpl {

double stationarity(std::span<const double> grad, std::span<const double> metric)
{
  double s = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i)
    s = std::max(s, std::abs(grad[i]) / metric[i]);
  return s;
}

DescentResult minimize_bb(const Objective& objective, std::vector<double> x0, std::span<const double> metric,
                          const DescentOptions& options)
{
  const auto n = x0.size();
  if (metric.size() != n)
    throw InputError("minimize_bb: metric size mismatch");

  DescentResult res;
  res.x = std::move(x0);
  std::vector<double> g(n), d(n), xn(n), gn(n);
  auto ev = objective(res.x, g);
  if (!std::isfinite(ev.value))
    throw DomainError("minimize_bb: objective is not finite at the initial point");
  if (options.record_history)
    res.history.push_back(ev.value);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double alpha = 0.0;
  {
    double xmax = 0.0;
    for (double v : res.x)
      xmax = std::max(xmax, std::abs(v));
    const double st = stationarity(g, metric);
    alpha = st > 0.0 ? 0.1 * std::max(xmax, 1e-2) / st : 1.0;
  }

  for (res.iterations = 0;; ++res.iterations) {
    res.stationarity = stationarity(g, metric);
    if (res.stationarity <= options.tolerance) {
      res.converged = true;
      break;
    }
    if (n == 0) {
      res.converged = true;
      break;
    }
    if (res.iterations >= options.max_iterations)
      break;

    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = -g[i] / metric[i];
      slope += g[i] * d[i];
    }

    bool accepted = false;
    Evaluation evn;
    double slack = 0.0;
    for (int bt = 0; bt <= options.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i)
        xn[i] = res.x[i] + alpha * d[i];
      evn = objective(xn, gn);
      slack = 8.0 * eps * (std::abs(ev.magnitude) + std::abs(evn.magnitude));
      if (std::isfinite(evn.value) && evn.value <= ev.value + options.armijo * alpha * slope + slack) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.line_search_failed = true;
      break;
    }
    if (options.post_step) {
      options.post_step(xn);
      evn = objective(xn, gn);
    }

    double sds = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = xn[i] - res.x[i];
      sds += metric[i] * s * s;
      sy += s * (gn[i] - g[i]);
    }
    const double bb = sy > 0.0 ? sds / sy : 4.0 * alpha;
    alpha = std::clamp(bb, 1e-12, 1e12);

    res.x.swap(xn);
    g.swap(gn);
    ev = evn;
    if (options.record_history) {
      res.history.push_back(ev.value);
      res.slack.push_back(slack);
    }
  }
  res.value = ev.value;
  return res;
}

} // namespace fpl
