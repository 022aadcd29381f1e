#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpl/finsler.hpp"

namespace fpl {

/// One sampled property: the worst observed statistic against its tolerance.
struct PropertyCheck
{
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  long long samples = 0;
  bool passed = false;
};

struct NormCheckReport
{
  std::string norm;
  double p = 0.0;
  std::vector<PropertyCheck> checks;
  /// min over pairs of <a(x)-a(y), x-y> / F(x-y)^p; only meaningful for p >= 2
  double empirical_constant = 0.0;
  bool passed = false;
};

/**
 * Sampled invariant suite for a planar norm and flux exponent p: homogeneity,
 * Euler identity, finite-difference gradient agreement, norm equivalence,
 * midpoint convexity (plus strictness on non-parallel pairs), strict
 * monotonicity of the flux, flux homogeneity and dual nesting.
 */
NormCheckReport check_norm_properties(const FinslerNorm& norm, double p, int samples = 10000,
                                      std::uint64_t seed = 1);

} // namespace fpl
