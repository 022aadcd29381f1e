#include "fpl/random_fields.hpp"

#include <algorithm>

namespace fpl {

Field smoothed_random_field(const MeshPtr& mesh, std::uint64_t seed, int passes, double lo, double hi)
{
  const auto nv = mesh->num_vertices();
  const auto& flags = mesh->boundary_flags();
  UniformStream rng(seed);
  std::vector<double> v(nv, 0.0);
  for (std::size_t i = 0; i < nv; ++i)
    if (!flags[i])
      v[i] = lo + (hi - lo) * rng.next();

  if (passes > 0) {
    std::vector<std::vector<int>> nbrs(nv);
    for (const auto& tri : mesh->triangles())
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          if (a != b)
            nbrs[tri[a]].push_back(tri[b]);
    for (auto& n : nbrs) {
      std::sort(n.begin(), n.end());
      n.erase(std::unique(n.begin(), n.end()), n.end());
    }
    std::vector<double> next(nv, 0.0);
    for (int pass = 0; pass < passes; ++pass) {
      for (std::size_t i = 0; i < nv; ++i) {
        if (flags[i])
          continue;
        double s = v[i];
        for (int j : nbrs[i])
          s += v[j];
        next[i] = s / static_cast<double>(nbrs[i].size() + 1);
      }
      v.swap(next);
    }
  }
  return Field(mesh, std::move(v), true);
}

} // namespace fpl
