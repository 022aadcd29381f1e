#include "fpl/energy_form.hpp"

#include "fpl/error.hpp"

namespace fpl {

EnergyForm::EnergyForm(MeshPtr mesh, FluxParams params, const WeightSpec& weight)
  : mesh_(std::move(mesh)), params_(std::move(params))
{
  if (!mesh_)
    throw InputError("EnergyForm: null mesh");
  weights_ = weight_at_barycenters(*mesh_, weight);
  const auto& flags = mesh_->boundary_flags();
  free_index_.assign(mesh_->num_vertices(), -1);
  for (std::size_t i = 0; i < flags.size(); ++i)
    if (!flags[i]) {
      free_index_[i] = static_cast<int>(free_.size());
      free_.push_back(static_cast<int>(i));
      free_mass_.push_back(mesh_->lumped_mass()[i]);
    }
  const auto& tris = mesh_->triangles();
  active_.resize(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t)
    active_[t] = !flags[tris[t][0]] || !flags[tris[t][1]] || !flags[tris[t][2]];
}

std::vector<double> EnergyForm::expand(std::span<const double> free_values) const
{
  if (free_values.size() != free_.size())
    throw InputError("EnergyForm::expand: size mismatch");
  std::vector<double> nodal(mesh_->num_vertices(), 0.0);
  for (std::size_t k = 0; k < free_.size(); ++k)
    nodal[free_[k]] = free_values[k];
  return nodal;
}

std::vector<double> EnergyForm::restrict_to_free(std::span<const double> nodal) const
{
  if (nodal.size() != mesh_->num_vertices())
    throw InputError("EnergyForm::restrict_to_free: size mismatch");
  std::vector<double> out(free_.size());
  for (std::size_t k = 0; k < free_.size(); ++k)
    out[k] = nodal[free_[k]];
  return out;
}

Field EnergyForm::to_field(std::span<const double> free_values) const
{
  return Field(mesh_, expand(free_values), true);
}

double EnergyForm::dirichlet(std::span<const double> nodal) const
{
  const auto& tris = mesh_->triangles();
  const auto& grads = mesh_->basis_gradients();
  const auto& areas = mesh_->areas();
  double sum = 0.0;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    const auto& g = grads[t];
    const double gx = nodal[tri[0]] * g[0][0] + nodal[tri[1]] * g[1][0] + nodal[tri[2]] * g[2][0];
    const double gy = nodal[tri[0]] * g[0][1] + nodal[tri[1]] * g[1][1] + nodal[tri[2]] * g[2][1];
    sum += areas[t] * weights_[t] * params_.energy_density2(gx, gy);
  }
  return sum;
}

double EnergyForm::dirichlet_with_gradient(std::span<const double> nodal, std::span<double> free_grad) const
{
  const auto& tris = mesh_->triangles();
  const auto& grads = mesh_->basis_gradients();
  const auto& areas = mesh_->areas();
  double sum = 0.0;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    const auto& g = grads[t];
    const double gx = nodal[tri[0]] * g[0][0] + nodal[tri[1]] * g[1][0] + nodal[tri[2]] * g[2][0];
    const double gy = nodal[tri[0]] * g[0][1] + nodal[tri[1]] * g[1][1] + nodal[tri[2]] * g[2][1];
    const double aw = areas[t] * weights_[t];
    sum += aw * params_.energy_density2(gx, gy);
    if (!active_[t])
      continue;
    double a0 = 0.0;
    double a1 = 0.0;
    params_.flux2(gx, gy, a0, a1);
    for (int k = 0; k < 3; ++k) {
      const int fi = free_index_[tri[k]];
      if (fi >= 0)
        free_grad[fi] += aw * (a0 * g[k][0] + a1 * g[k][1]);
    }
  }
  return sum;
}

std::vector<double> EnergyForm::barycenter_values(std::span<const double> nodal) const
{
  const auto& tris = mesh_->triangles();
  std::vector<double> ub(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t)
    ub[t] = (nodal[tris[t][0]] + nodal[tris[t][1]] + nodal[tris[t][2]]) / 3.0;
  return ub;
}

void EnergyForm::add_barycentric_load(std::span<const double> per_triangle, std::span<double> free_grad) const
{
  const auto& tris = mesh_->triangles();
  const auto& areas = mesh_->areas();
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (!active_[t])
      continue;
    const double c = areas[t] * per_triangle[t] / 3.0;
    for (int k = 0; k < 3; ++k) {
      const int fi = free_index_[tris[t][k]];
      if (fi >= 0)
        free_grad[fi] += c;
    }
  }
}

std::vector<double> EnergyForm::sample(const Expression& e) const
{
  const auto& bc = mesh_->barycenters();
  std::vector<double> out(bc.size());
  for (std::size_t t = 0; t < bc.size(); ++t)
    out[t] = e(bc[t][0], bc[t][1]);
  return out;
}

} // namespace fpl
