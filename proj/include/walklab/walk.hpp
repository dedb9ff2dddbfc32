#pragma once

// Simple random walk generation: single steps and materialized paths.
// Long experiments stream steps straight into the range tracker; the
// materialized WalkPath exists for oracle tests and replay diagnostics.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "walklab/lattice.hpp"
#include "walklab/rng.hpp"

namespace walklab {

// hard per-trial cap; coordinates then sit far inside the packable range
inline constexpr std::uint64_t kHorizonCap = std::uint64_t{1} << 32;

struct WalkPath {
  int d = 2;
  std::vector<LatticePoint> points;  // points[0] is the origin

  std::uint64_t steps() const { return points.size() - 1; }
};

inline LatticePoint step(const LatticePoint& x, int d, RngStream& rng) {
  DirectionSampler dirs(d, rng);
  return neighbor(x, dirs.next());
}

inline WalkPath generate_walk(int d, std::uint64_t n, RngStream& rng) {
  check_dimension(d);
  if (n > kHorizonCap)
    throw std::invalid_argument("walk length exceeds the per-trial horizon cap");
  WalkPath path;
  path.d = d;
  path.points.reserve(n + 1);
  path.points.push_back(origin());
  DirectionSampler dirs(d, rng);
  for (std::uint64_t i = 0; i < n; ++i)
    path.points.push_back(neighbor(path.points.back(), dirs.next()));
  return path;
}

// Compact direction log for large walks (1 byte per step).
struct DirectionLog {
  int d = 2;
  std::vector<std::uint8_t> dirs;

  WalkPath materialize() const {
    WalkPath path;
    path.d = d;
    path.points.reserve(dirs.size() + 1);
    path.points.push_back(origin());
    for (std::uint8_t dir : dirs) path.points.push_back(neighbor(path.points.back(), dir));
    return path;
  }
};

}  // namespace walklab
