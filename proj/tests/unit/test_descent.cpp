#include <doctest.h>

#include "fpl/descent.hpp"
#include "fpl/error.hpp"

#include <cmath>
#include <vector>

using namespace fpl;

TEST_SUITE("descent")
{
  TEST_CASE("diagonal quadratic reaches the closed-form minimizer")
  {
    // f(x) = sum 0.5 a_i x_i^2 - b_i x_i, minimizer b_i / a_i
    const std::vector<double> a{1.0, 10.0, 100.0, 0.5};
    const std::vector<double> b{1.0, -2.0, 3.0, 0.25};
    auto f = [&](std::span<const double> x, std::span<double> g) {
      double v = 0.0, mag = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        v += 0.5 * a[i] * x[i] * x[i] - b[i] * x[i];
        mag += std::abs(0.5 * a[i] * x[i] * x[i]) + std::abs(b[i] * x[i]);
        g[i] = a[i] * x[i] - b[i];
      }
      return Evaluation{v, mag};
    };
    const std::vector<double> metric(4, 1.0);
    DescentOptions o;
    o.tolerance = 1e-12;
    const auto r = minimize_bb(f, std::vector<double>(4, 0.0), metric, o);
    REQUIRE(r.converged);
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(r.x[i] == doctest::Approx(b[i] / a[i]).epsilon(1e-10));
    // monotone within the recorded round-off slack
    for (std::size_t k = 1; k < r.history.size(); ++k)
      CHECK(r.history[k] <= r.history[k - 1] + r.slack[k - 1]);
  }

  TEST_CASE("iteration limit is reported")
  {
    auto f = [](std::span<const double> x, std::span<double> g) {
      g[0] = 4 * x[0] * x[0] * x[0] - 1.0;
      return Evaluation{std::pow(x[0], 4) - x[0], std::pow(x[0], 4) + std::abs(x[0])};
    };
    DescentOptions o;
    o.max_iterations = 2;
    o.tolerance = 1e-14;
    const std::vector<double> m{1.0};
    const auto r = minimize_bb(f, {3.0}, m, o);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 2);
  }

  TEST_CASE("non-finite start is rejected")
  {
    auto f = [](std::span<const double>, std::span<double> g) {
      g[0] = 0.0;
      return Evaluation{std::nan(""), 0.0};
    };
    const std::vector<double> m{1.0};
    CHECK_THROWS_AS(minimize_bb(f, {1.0}, m, {}), DomainError);
  }

  TEST_CASE("stationarity is mass scaled")
  {
    const std::vector<double> g{1.0, -4.0};
    const std::vector<double> m{0.5, 8.0};
    CHECK(stationarity(g, m) == doctest::Approx(2.0));
  }
}
