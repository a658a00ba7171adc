#pragma once

// Brute-force references used by the tests. Nothing here calls into the
// search or world generation code it is used to check.

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <set>
#include <vector>

#include "lumen/world.hpp"

namespace lumen::oracle {

/// All cells in raster order (z outer, theta inner).
inline std::vector<LatticeCoord> raster(int nt, int nz) {
  std::vector<LatticeCoord> out;
  for (int z = 0; z < nz; ++z)
    for (int t = 0; t < nt; ++t) out.push_back({t, z});
  return out;
}

/// 8-connected component containing `seed` over cells where `member` holds,
/// theta wrapped, z open.
inline std::set<LatticeCoord> flood_fill(LatticeCoord seed, int nt, int nz,
                                         const std::function<bool(LatticeCoord)>& member) {
  std::set<LatticeCoord> seen;
  if (!member(seed)) return seen;
  std::deque<LatticeCoord> q{seed};
  seen.insert(seed);
  while (!q.empty()) {
    const LatticeCoord c = q.front();
    q.pop_front();
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dt = -1; dt <= 1; ++dt) {
        const int z = c.z + dz;
        if (z < 0 || z >= nz) continue;
        const LatticeCoord nb{((c.theta + dt) % nt + nt) % nt, z};
        if (!seen.contains(nb) && member(nb)) {
          seen.insert(nb);
          q.push_back(nb);
        }
      }
    }
  }
  return seen;
}

/// Every 8-connected component of `member` cells.
inline std::vector<std::set<LatticeCoord>> components(int nt, int nz,
                                                      const std::function<bool(LatticeCoord)>& member) {
  std::vector<std::set<LatticeCoord>> out;
  std::set<LatticeCoord> done;
  for (const auto& c : raster(nt, nz)) {
    if (done.contains(c) || !member(c)) continue;
    auto comp = flood_fill(c, nt, nz, member);
    done.insert(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

/// Chebyshev distance by enumerating both theta offsets.
inline int chebyshev(LatticeCoord a, LatticeCoord b, int nt) {
  int best_dt = nt;
  for (int k = -1; k <= 1; ++k) best_dt = std::min(best_dt, std::abs(a.theta - b.theta + k * nt));
  return std::max(best_dt, std::abs(a.z - b.z));
}

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (long double)(a[i] - b[i]) * (a[i] - b[i]);
  return static_cast<double>(std::sqrt(s));
}

/// Hand-made world: every cell healthy with `healthy` traits.
inline WorldGrid uniform_world(int nt, int nz, const std::vector<double>& healthy) {
  std::vector<GroundTruth> cells(static_cast<std::size_t>(nt) * nz);
  for (auto& c : cells) c.true_traits = healthy;
  return WorldGrid(nt, nz, 1.0, std::move(cells));
}

inline void set_cell(WorldGrid& g, LatticeCoord c, CellKind kind, int type_id, const std::vector<double>& traits) {
  auto& cell = g.mutable_cell(c);
  cell.kind = kind;
  cell.type_id = type_id;
  cell.true_traits = traits;
}

}  // namespace lumen::oracle
