#pragma once

#include <cstdint>
#include <random>

#include "fpl/mesh.hpp"

namespace fpl {

/// Uniform doubles in [0, 1) built from the top 53 bits of mt19937_64 draws.
/// Unlike std::uniform_real_distribution the stream is identical across standard libraries.
class UniformStream
{
public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 engine_;
};

/**
 * Zero-boundary field with interior values drawn uniformly from [lo, hi),
 * followed by `passes` Jacobi averaging sweeps (each interior value replaced by
 * the mean of itself and its edge neighbours).
 */
Field smoothed_random_field(const MeshPtr& mesh, std::uint64_t seed, int passes = 2, double lo = 0.0,
                            double hi = 1.0);

} // namespace fpl
