#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpl/finsler.hpp"
#include "fpl/weights.hpp"

namespace fpl {

using Point2 = std::array<double, 2>;

enum class DomainKind
{
  UnitSquare,
  Rectangle,
  UnitDisk
};

/// A polygonal domain with its target resolution. Rectangles occupy [0,a]x[0,b].
struct DomainSpec
{
  DomainKind kind = DomainKind::UnitSquare;
  double a = 1.0;
  double b = 1.0;
  int resolution = 2;

  static DomainSpec square(int n) { return {DomainKind::UnitSquare, 1.0, 1.0, n}; }
  static DomainSpec rectangle(double a, double b, int n) { return {DomainKind::Rectangle, a, b, n}; }
  static DomainSpec disk(int n) { return {DomainKind::UnitDisk, 1.0, 1.0, n}; }

  /// Parses `square:<n>`, `rect:<a>:<b>:<n>` or `disk:<n>`. Throws ConfigError.
  static DomainSpec parse(std::string_view tag);
  std::string tag() const;
};

/**
 * Conforming P1 triangulation of a polygonal domain.
 *
 * Squares and rectangles use an n x n grid with every cell cut along the same
 * diagonal. The disk is the inscribed regular 6n-gon, triangulated ring by ring
 * (ring k has 6k vertices at radius k/n). The origin is always a vertex.
 */
class Mesh
{
public:
  /// Throws InputError for resolution < 2 or non-positive rectangle sides.
  static std::shared_ptr<const Mesh> build(const DomainSpec& domain);

  const DomainSpec& domain() const noexcept { return domain_; }
  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_triangles() const noexcept { return triangles_.size(); }

  const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const noexcept { return triangles_; }
  const std::vector<bool>& boundary_flags() const noexcept { return boundary_; }
  const std::vector<double>& areas() const noexcept { return areas_; }
  const std::vector<Point2>& barycenters() const noexcept { return barycenters_; }
  /// Constant gradients of the three hat functions on each triangle.
  const std::vector<std::array<Point2, 3>>& basis_gradients() const noexcept { return basis_grads_; }
  /// Lumped mass: one third of the area of every incident triangle.
  const std::vector<double>& lumped_mass() const noexcept { return lumped_mass_; }

  double total_area() const noexcept;
  /// Exact area of the polygon being triangulated.
  double polygon_area() const noexcept;

  /// Centered subregion with a quarter of the domain area (half-size box, or the disk of radius 1/2).
  bool in_interior_region(const Point2& x) const noexcept;

private:
  Mesh() = default;
  void finalize();

  DomainSpec domain_;
  std::vector<Point2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<bool> boundary_;
  std::vector<double> areas_;
  std::vector<Point2> barycenters_;
  std::vector<std::array<Point2, 3>> basis_grads_;
  std::vector<double> lumped_mass_;
};

using MeshPtr = std::shared_ptr<const Mesh>;
using ScalarFunction = std::function<double(double, double)>;

/// Piecewise-linear nodal field. With zero_boundary the boundary values are identically zero.
class Field
{
public:
  Field(MeshPtr mesh, std::vector<double> values, bool zero_boundary);

  static Field zeros(MeshPtr mesh);
  /// Nodal interpolant; with zero_boundary boundary vertices are set to 0.
  static Field interpolate(MeshPtr mesh, const ScalarFunction& fn, bool zero_boundary);

  const Mesh& mesh() const noexcept { return *mesh_; }
  const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
  const std::vector<double>& values() const noexcept { return values_; }
  bool zero_boundary() const noexcept { return zero_boundary_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Mean of the three vertex values of triangle t.
  double barycenter_value(std::size_t t) const;

  Field scaled(double factor) const;

private:
  MeshPtr mesh_;
  std::vector<double> values_;
  bool zero_boundary_;
};

/// Constant gradient of the linear interpolant on one triangle. Throws InputError for a bad index.
Point2 element_gradient(const Field& field, std::size_t triangle);

/// w at every barycenter, in triangle order.
std::vector<double> weight_at_barycenters(const Mesh& mesh, const WeightSpec& weight);

/// sum_T area(T) w(bary T) F(grad u|_T)^p.
double weighted_energy(const Field& field, const FluxParams& params, const WeightSpec& weight);

/// sum_T area(T) data(bary T) g(u(bary T)).
double weighted_load(const Field& field, const ScalarFunction& data, const std::function<double(double)>& transform);

/// CSV with header `vertex_id,x,y,value`.
void write_field_csv(std::ostream& os, const Field& field);

} // namespace fpl
