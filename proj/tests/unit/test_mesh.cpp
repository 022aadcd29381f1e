#include <doctest.h>

#include "fpl/error.hpp"
#include "fpl/finsler.hpp"
#include "fpl/mesh.hpp"
#include "fpl/weights.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

using namespace fpl;

namespace {

constexpr double pi = std::numbers::pi;

std::map<std::pair<int, int>, int> edge_counts(const Mesh& m)
{
  std::map<std::pair<int, int>, int> edges;
  for (const auto& t : m.triangles())
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b)
        std::swap(a, b);
      ++edges[{a, b}];
    }
  return edges;
}

double sinsin_energy(int n, const WeightSpec& w)
{
  const auto mesh = Mesh::build(DomainSpec::square(n));
  const auto u = Field::interpolate(mesh, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); }, true);
  return weighted_energy(u, FluxParams(FinslerNorm::euclidean(), 2.0), w);
}

} // namespace

TEST_SUITE("mesh")
{
  TEST_CASE("counts and areas")
  {
    const auto m2 = Mesh::build(DomainSpec::square(2));
    CHECK(m2->num_vertices() == 9);
    CHECK(m2->num_triangles() == 8);
    CHECK(m2->total_area() == doctest::Approx(1.0).epsilon(1e-14));
    for (int n : {3, 7, 32}) {
      const auto m = Mesh::build(DomainSpec::square(n));
      CHECK(m->num_vertices() == static_cast<std::size_t>((n + 1) * (n + 1)));
      CHECK(m->num_triangles() == static_cast<std::size_t>(2 * n * n));
    }
    const auto r = Mesh::build(DomainSpec::rectangle(2.0, 0.5, 8));
    CHECK(r->total_area() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(Mesh::build(DomainSpec::square(1)), InputError);
    CHECK_THROWS_AS(Mesh::build(DomainSpec::rectangle(0.0, 1.0, 4)), InputError);
  }

  TEST_CASE("disk area approaches pi at second order")
  {
    double prev_err = 1.0;
    for (int n : {4, 8, 16, 32}) {
      const auto m = Mesh::build(DomainSpec::disk(n));
      // inscribed regular 6n-gon
      const double poly = 0.5 * 6 * n * std::sin(2 * pi / (6 * n));
      CHECK(m->total_area() == doctest::Approx(poly).epsilon(1e-12));
      const double err = pi - m->total_area();
      CHECK(err > 0.0);
      CHECK(err * n * n < 1.0);
      CHECK(err < prev_err / 3.5);
      prev_err = err;
    }
  }

  TEST_CASE("conformity, orientation and boundary flags")
  {
    for (const auto& d : {DomainSpec::square(5), DomainSpec::rectangle(1.5, 0.7, 6), DomainSpec::disk(5)}) {
      const auto m = Mesh::build(d);
      for (double a : m->areas())
        CHECK(a > 0.0);
      const auto& v = m->vertices();
      for (const auto& t : m->triangles()) {
        const double cross = (v[t[1]][0] - v[t[0]][0]) * (v[t[2]][1] - v[t[0]][1]) -
                             (v[t[1]][1] - v[t[0]][1]) * (v[t[2]][0] - v[t[0]][0]);
        CHECK(cross > 0.0);
      }
      std::vector<bool> on_boundary_edge(m->num_vertices(), false);
      for (const auto& [e, c] : edge_counts(*m)) {
        CHECK((c == 1 || c == 2));
        if (c == 1)
          on_boundary_edge[e.first] = on_boundary_edge[e.second] = true;
      }
      CHECK(on_boundary_edge == m->boundary_flags());
    }
  }

  TEST_CASE("lumped mass sums to the area")
  {
    const auto m = Mesh::build(DomainSpec::disk(6));
    double s = 0.0;
    for (double x : m->lumped_mass())
      s += x;
    CHECK(s == doctest::Approx(m->total_area()).epsilon(1e-13));
  }

  TEST_CASE("element gradients reproduce linear fields")
  {
    const auto m = Mesh::build(DomainSpec::disk(4));
    const auto lin = Field::interpolate(m, [](double x, double y) { return 3 * x + 4 * y - 1; }, false);
    const auto x = Field::interpolate(m, [](double x, double) { return x; }, false);
    const auto c = Field::interpolate(m, [](double, double) { return 2.5; }, false);
    for (std::size_t t = 0; t < m->num_triangles(); ++t) {
      const auto g = element_gradient(lin, t);
      CHECK(g[0] == doctest::Approx(3.0).epsilon(1e-12));
      CHECK(g[1] == doctest::Approx(4.0).epsilon(1e-12));
      const auto gx = element_gradient(x, t);
      CHECK(gx[0] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(gx[1]) < 1e-12);
      const auto gc = element_gradient(c, t);
      CHECK(std::abs(gc[0]) < 1e-12);
      CHECK(std::abs(gc[1]) < 1e-12);
    }
    CHECK_THROWS_AS(element_gradient(x, m->num_triangles()), InputError);
  }

  TEST_CASE("zero-boundary fields")
  {
    const auto m = Mesh::build(DomainSpec::square(3));
    std::vector<double> v(m->num_vertices(), 1.0);
    CHECK_THROWS_AS(Field(m, v, true), InputError);
    CHECK_THROWS_AS(Field(m, std::vector<double>(3, 0.0), false), InputError);
    const auto f = Field::interpolate(m, [](double, double) { return 1.0; }, true);
    for (std::size_t i = 0; i < m->num_vertices(); ++i)
      CHECK(f[i] == (m->boundary_flags()[i] ? 0.0 : 1.0));
  }

  TEST_CASE("weighted energy")
  {
    const auto m = Mesh::build(DomainSpec::rectangle(1.0, 1.0, 4));
    const auto x = Field::interpolate(m, [](double x, double) { return x; }, false);
    CHECK(weighted_energy(x, FluxParams(FinslerNorm::euclidean(), 3.0), WeightSpec::constant()) ==
          doctest::Approx(1.0).epsilon(1e-13));
    CHECK(weighted_energy(Field::zeros(m), FluxParams(FinslerNorm::lt(4), 3.0), WeightSpec::constant()) == 0.0);
    // exact for linear fields: |(3,4)|^2 * area with weight 2
    const auto lin = Field::interpolate(m, [](double x, double y) { return 3 * x + 4 * y; }, false);
    CHECK(weighted_energy(lin, FluxParams(FinslerNorm::euclidean(), 2.0), WeightSpec::constant(2.0)) ==
          doctest::Approx(50.0).epsilon(1e-13));
  }

  TEST_CASE("sin(pi x) sin(pi y) energy converges to pi^2/2")
  {
    const double exact = pi * pi / 2;
    double prev = 1e9;
    for (int n : {16, 32, 64}) {
      const double err = std::abs(sinsin_energy(n, WeightSpec::constant()) - exact);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 1e-2);
  }

  TEST_CASE("power weights are finite at every quadrature node")
  {
    const auto m = Mesh::build(DomainSpec::square(8));
    for (double w : weight_at_barycenters(*m, WeightSpec::power(-1.9, 1.0)))
      CHECK(std::isfinite(w));
    const auto d = Mesh::build(DomainSpec::disk(8));
    for (double w : weight_at_barycenters(*d, WeightSpec::power(-1.9, 1.0)))
      CHECK(std::isfinite(w));
  }

  TEST_CASE("weighted load")
  {
    for (int n : {4, 16, 64}) {
      const auto m = Mesh::build(DomainSpec::square(n));
      const auto one = Field::interpolate(m, [](double, double) { return 1.0; }, true);
      // barycenter quadrature is exact for the P1 interpolant: interior lumped mass (1 - 1/n)^2
      const double exact = std::pow(1.0 - 1.0 / n, 2);
      CHECK(weighted_load(one, [](double, double) { return 1.0; }, [](double t) { return t; }) ==
            doctest::Approx(exact).epsilon(1e-13));
      const double c = 0.49;
      const auto cf = one.scaled(c);
      const double l = weighted_load(cf, [](double, double) { return 1.0; }, [](double t) { return std::sqrt(t); });
      // triangles touching the boundary see mean values c/3 or 2c/3; the rest see c
      CHECK(l <= std::sqrt(c) + 1e-15);
      CHECK(l >= std::sqrt(c) * (1.0 - 4.0 / n));
    }
    const auto m = Mesh::build(DomainSpec::square(4));
    CHECK(weighted_load(Field::zeros(m), [](double, double) { return 3.0; }, [](double t) { return t * t; }) == 0.0);
  }

  TEST_CASE("field csv")
  {
    const auto m = Mesh::build(DomainSpec::square(2));
    std::ostringstream os;
    write_field_csv(os, Field::zeros(m));
    const auto s = os.str();
    CHECK(s.rfind("vertex_id,x,y,value\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 10);
  }

  TEST_CASE("domain tags")
  {
    CHECK(DomainSpec::parse("square:16").resolution == 16);
    CHECK(DomainSpec::parse("rect:2:0.5:8").a == 2.0);
    CHECK(DomainSpec::parse("disk:48").kind == DomainKind::UnitDisk);
    CHECK_THROWS_AS(DomainSpec::parse("square:1"), ConfigError);
    CHECK_THROWS_AS(DomainSpec::parse("hexagon:3"), ConfigError);
    CHECK_THROWS_AS(DomainSpec::parse("square:abc"), ConfigError);
  }
}
