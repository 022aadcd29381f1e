#pragma once

#include <span>
#include <vector>

#include "fpl/expression.hpp"
#include "fpl/finsler.hpp"
#include "fpl/mesh.hpp"
#include "fpl/weights.hpp"

namespace fpl {

/**
 * The discrete weighted anisotropic Dirichlet form sum_T area w F(grad u)^p
 * on a fixed mesh, with the bookkeeping for zero-boundary unknowns.
 *
 * Unknowns are the interior ("free") nodal values; full nodal vectors carry
 * zeros on the boundary.
 */
class EnergyForm
{
public:
  EnergyForm(MeshPtr mesh, FluxParams params, const WeightSpec& weight);

  const Mesh& mesh() const noexcept { return *mesh_; }
  const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
  const FluxParams& params() const noexcept { return params_; }
  double p() const noexcept { return params_.p(); }

  std::size_t num_free() const noexcept { return free_.size(); }
  const std::vector<int>& free_vertices() const noexcept { return free_; }
  /// Lumped mass of the free vertices, the metric of the descent iterations.
  const std::vector<double>& free_mass() const noexcept { return free_mass_; }
  /// w at each barycenter.
  const std::vector<double>& element_weights() const noexcept { return weights_; }
  /// Triangles with at least one free vertex.
  const std::vector<bool>& active_triangles() const noexcept { return active_; }

  /// Nodal vector from free values (boundary zero).
  std::vector<double> expand(std::span<const double> free_values) const;
  std::vector<double> restrict_to_free(std::span<const double> nodal) const;
  Field to_field(std::span<const double> free_values) const;

  /// sum_T area w F(grad u)^p for a nodal vector.
  double dirichlet(std::span<const double> nodal) const;

  /**
   * Same as dirichlet(), and adds the gradient of (1/p) * dirichlet with respect
   * to the free unknowns into `free_grad` (which is not cleared).
   */
  double dirichlet_with_gradient(std::span<const double> nodal, std::span<double> free_grad) const;

  /// Barycenter values u_b = mean of the three vertex values, per triangle.
  std::vector<double> barycenter_values(std::span<const double> nodal) const;

  /// Adds sum_T area c_T s_T * d u_b / d u_i = area c_T s_T / 3 to free_grad for each free vertex i.
  void add_barycentric_load(std::span<const double> per_triangle, std::span<double> free_grad) const;

  /// Samples an expression at the barycenters.
  std::vector<double> sample(const Expression& e) const;

private:
  MeshPtr mesh_;
  FluxParams params_;
  std::vector<double> weights_;
  std::vector<int> free_;
  std::vector<int> free_index_; ///< vertex -> free index, -1 on the boundary
  std::vector<double> free_mass_;
  std::vector<bool> active_;
};

} // namespace fpl
