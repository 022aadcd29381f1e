#include "fpl/mesh.hpp"

#include "fpl/error.hpp"
#include "fpl/text.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace fpl {

DomainSpec DomainSpec::parse(std::string_view tag)
{
  const auto parts = split(trim(tag), ':');
  const std::string key = "domain";
  auto resolution = [&](const std::string& s) {
    const auto n = parse_int(s, key);
    if (n < 2 || n > 100000)
      throw InputError("resolution must be an integer >= 2");
    return static_cast<int>(n);
  };
  try {
    if (parts.size() == 2 && parts[0] == "square")
      return square(resolution(parts[1]));
    if (parts.size() == 2 && parts[0] == "disk")
      return disk(resolution(parts[1]));
    if (parts.size() == 4 && parts[0] == "rect") {
      const double a = parse_double(parts[1], key);
      const double b = parse_double(parts[2], key);
      if (!(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b)))
        throw InputError("rectangle sides must be positive");
      return rectangle(a, b, resolution(parts[3]));
    }
  } catch (const InputError& e) {
    throw ConfigError(key, "invalid domain tag '" + std::string(tag) + "': " + e.what());
  }
  throw ConfigError(key, "unknown domain tag '" + std::string(tag) +
                           "' (expected square:<n>, rect:<a>:<b>:<n> or disk:<n>)");
}

std::string DomainSpec::tag() const
{
  switch (kind) {
  case DomainKind::UnitSquare:
    return "square:" + std::to_string(resolution);
  case DomainKind::Rectangle:
    return "rect:" + format_double(a) + ":" + format_double(b) + ":" + std::to_string(resolution);
  case DomainKind::UnitDisk:
    return "disk:" + std::to_string(resolution);
  }
  return {};
}

namespace {

double signed_area(const Point2& a, const Point2& b, const Point2& c)
{
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

} // namespace

std::shared_ptr<const Mesh> Mesh::build(const DomainSpec& domain)
{
  if (domain.resolution < 2)
    throw InputError("build_mesh: resolution must be at least 2");
  if (!(domain.a > 0.0 && domain.b > 0.0))
    throw InputError("build_mesh: rectangle sides must be positive");

  std::shared_ptr<Mesh> m(new Mesh());
  m->domain_ = domain;
  const int n = domain.resolution;

  if (domain.kind == DomainKind::UnitDisk) {
    m->vertices_.push_back({0.0, 0.0});
    m->boundary_.push_back(false);
    std::vector<int> ring_start{0};
    for (int k = 1; k <= n; ++k) {
      ring_start.push_back(static_cast<int>(m->vertices_.size()));
      const double r = static_cast<double>(k) / n;
      const int count = 6 * k;
      for (int i = 0; i < count; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / count;
        m->vertices_.push_back({r * std::cos(theta), r * std::sin(theta)});
        m->boundary_.push_back(k == n);
      }
    }
    for (int j = 0; j < 6; ++j)
      m->triangles_.push_back({0, ring_start[1] + j, ring_start[1] + (j + 1) % 6});
    // Zip consecutive rings together in angular order.
    for (int k = 2; k <= n; ++k) {
      const int inner = 6 * (k - 1);
      const int outer = 6 * k;
      const int a0 = ring_start[k - 1];
      const int b0 = ring_start[k];
      int i = 0;
      int j = 0;
      while (i < inner || j < outer) {
        // Next angles in units of a full turn; advance the ring whose next vertex comes first.
        const double next_inner = static_cast<double>(i + 1) / inner;
        const double next_outer = static_cast<double>(j + 1) / outer;
        const int ai = a0 + i % inner;
        const int bj = b0 + j % outer;
        if (j < outer && (i >= inner || next_outer <= next_inner)) {
          m->triangles_.push_back({ai, bj, b0 + (j + 1) % outer});
          ++j;
        } else {
          m->triangles_.push_back({ai, bj, a0 + (i + 1) % inner});
          ++i;
        }
      }
    }
  } else {
    const double a = domain.kind == DomainKind::Rectangle ? domain.a : 1.0;
    const double b = domain.kind == DomainKind::Rectangle ? domain.b : 1.0;
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        m->vertices_.push_back({a * i / n, b * j / n});
        m->boundary_.push_back(i == 0 || j == 0 || i == n || j == n);
      }
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        m->triangles_.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        m->triangles_.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      }
  }

  m->finalize();
  return m;
}

void Mesh::finalize()
{
  const auto nt = triangles_.size();
  areas_.resize(nt);
  barycenters_.resize(nt);
  basis_grads_.resize(nt);
  lumped_mass_.assign(vertices_.size(), 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    auto& tri = triangles_[t];
    double area = signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
    if (area < 0.0) {
      std::swap(tri[1], tri[2]);
      area = -area;
    }
    if (!(area > 0.0))
      throw InputError("build_mesh: degenerate triangle");
    const auto& p0 = vertices_[tri[0]];
    const auto& p1 = vertices_[tri[1]];
    const auto& p2 = vertices_[tri[2]];
    areas_[t] = area;
    barycenters_[t] = {(p0[0] + p1[0] + p2[0]) / 3.0, (p0[1] + p1[1] + p2[1]) / 3.0};
    // grad phi_k = rot90(opposite edge) / (2 area)
    const double inv = 1.0 / (2.0 * area);
    basis_grads_[t][0] = {(p1[1] - p2[1]) * inv, (p2[0] - p1[0]) * inv};
    basis_grads_[t][1] = {(p2[1] - p0[1]) * inv, (p0[0] - p2[0]) * inv};
    basis_grads_[t][2] = {(p0[1] - p1[1]) * inv, (p1[0] - p0[0]) * inv};
    for (int k = 0; k < 3; ++k)
      lumped_mass_[tri[k]] += area / 3.0;
  }
}

double Mesh::total_area() const noexcept
{
  double s = 0.0;
  for (double a : areas_)
    s += a;
  return s;
}

double Mesh::polygon_area() const noexcept
{
  switch (domain_.kind) {
  case DomainKind::UnitSquare:
    return 1.0;
  case DomainKind::Rectangle:
    return domain_.a * domain_.b;
  case DomainKind::UnitDisk: {
    const double sides = 6.0 * domain_.resolution;
    return 0.5 * sides * std::sin(2.0 * std::numbers::pi / sides);
  }
  }
  return 0.0;
}

bool Mesh::in_interior_region(const Point2& x) const noexcept
{
  if (domain_.kind == DomainKind::UnitDisk)
    return x[0] * x[0] + x[1] * x[1] <= 0.25 + 1e-12;
  const double a = domain_.kind == DomainKind::Rectangle ? domain_.a : 1.0;
  const double b = domain_.kind == DomainKind::Rectangle ? domain_.b : 1.0;
  const double tol = 1e-12;
  return x[0] >= 0.25 * a - tol && x[0] <= 0.75 * a + tol && x[1] >= 0.25 * b - tol && x[1] <= 0.75 * b + tol;
}

Field::Field(MeshPtr mesh, std::vector<double> values, bool zero_boundary)
  : mesh_(std::move(mesh)), values_(std::move(values)), zero_boundary_(zero_boundary)
{
  if (!mesh_)
    throw InputError("Field: null mesh");
  if (values_.size() != mesh_->num_vertices())
    throw InputError("Field: expected " + std::to_string(mesh_->num_vertices()) + " nodal values, got " +
                     std::to_string(values_.size()));
  if (zero_boundary_) {
    const auto& flags = mesh_->boundary_flags();
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (flags[i] && values_[i] != 0.0)
        throw InputError("Field: nonzero value at boundary vertex " + std::to_string(i));
  }
}

Field Field::zeros(MeshPtr mesh)
{
  const auto n = mesh->num_vertices();
  return Field(std::move(mesh), std::vector<double>(n, 0.0), true);
}

Field Field::interpolate(MeshPtr mesh, const ScalarFunction& fn, bool zero_boundary)
{
  std::vector<double> values(mesh->num_vertices());
  const auto& v = mesh->vertices();
  const auto& flags = mesh->boundary_flags();
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = (zero_boundary && flags[i]) ? 0.0 : fn(v[i][0], v[i][1]);
  return Field(std::move(mesh), std::move(values), zero_boundary);
}

double Field::barycenter_value(std::size_t t) const
{
  const auto& tri = mesh_->triangles().at(t);
  return (values_[tri[0]] + values_[tri[1]] + values_[tri[2]]) / 3.0;
}

Field Field::scaled(double factor) const
{
  auto v = values_;
  for (auto& x : v)
    x *= factor;
  return Field(mesh_, std::move(v), zero_boundary_);
}

Point2 element_gradient(const Field& field, std::size_t triangle)
{
  const auto& mesh = field.mesh();
  if (triangle >= mesh.num_triangles())
    throw InputError("element_gradient: triangle index out of range");
  const auto& tri = mesh.triangles()[triangle];
  const auto& g = mesh.basis_gradients()[triangle];
  Point2 out{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    out[0] += field[tri[k]] * g[k][0];
    out[1] += field[tri[k]] * g[k][1];
  }
  return out;
}

std::vector<double> weight_at_barycenters(const Mesh& mesh, const WeightSpec& weight)
{
  std::vector<double> w(mesh.num_triangles());
  const auto& bc = mesh.barycenters();
  for (std::size_t t = 0; t < w.size(); ++t)
    w[t] = weight(bc[t][0], bc[t][1]);
  return w;
}

double weighted_energy(const Field& field, const FluxParams& params, const WeightSpec& weight)
{
  const auto& mesh = field.mesh();
  const auto& areas = mesh.areas();
  const auto& bc = mesh.barycenters();
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = element_gradient(field, t);
    sum += areas[t] * weight(bc[t][0], bc[t][1]) * params.energy_density2(g[0], g[1]);
  }
  return sum;
}

double weighted_load(const Field& field, const ScalarFunction& data, const std::function<double(double)>& transform)
{
  const auto& mesh = field.mesh();
  const auto& areas = mesh.areas();
  const auto& bc = mesh.barycenters();
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    sum += areas[t] * data(bc[t][0], bc[t][1]) * transform(field.barycenter_value(t));
  return sum;
}

void write_field_csv(std::ostream& os, const Field& field)
{
  os << "vertex_id,x,y,value\n";
  const auto& v = field.mesh().vertices();
  for (std::size_t i = 0; i < v.size(); ++i)
    os << i << ',' << format_double(v[i][0]) << ',' << format_double(v[i][1]) << ',' << format_double(field[i])
       << '\n';
}

} // namespace fpl
