#include "lumen/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "lumen/errors.hpp"
#include "lumen/simd/kernels.hpp"

namespace lumen {

namespace {

constexpr int kPlacementAttempts = 20000;

void check_signature(const std::vector<double>& sig, int m, const std::string& what) {
  if (static_cast<int>(sig.size()) != m)
    throw std::invalid_argument(fmt::format("{}: signature has {} entries, expected {}", what, sig.size(), m));
  for (double v : sig) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument(fmt::format("{}: signature entry {} outside [0,1]", what, v));
  }
}

int wrap(int theta, int size) {
  const int r = theta % size;
  return r < 0 ? r + size : r;
}

}  // namespace

void WorldSpec::validate() const {
  if (theta_size < 4) throw std::invalid_argument("theta_size must be >= 4");
  if (z_size < 4) throw std::invalid_argument("z_size must be >= 4");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
  if (trait_count < 1) throw std::invalid_argument("trait_count must be >= 1");
  if (!(trait_noise >= 0.0)) throw std::invalid_argument("trait_noise must be >= 0");
  check_signature(healthy_signature, trait_count, "healthy");
  const int limit = std::min(theta_size, z_size);
  for (std::size_t t = 0; t < infection_types.size(); ++t) {
    const auto& it = infection_types[t];
    const std::string what = fmt::format("infection type {}", t);
    check_signature(it.signature, trait_count, what);
    if (it.clusters.count < 0) throw std::invalid_argument(what + ": negative cluster count");
    if (it.clusters.radius_min < 0 || it.clusters.radius_min > it.clusters.radius_max)
      throw std::invalid_argument(what + ": cluster radius range must satisfy 0 <= min <= max");
    if (2 * it.clusters.radius_max >= limit)
      throw std::invalid_argument(what + ": cluster radius must be < min(theta, z) / 2");
  }
  for (std::size_t o = 0; o < obstacles.size(); ++o) {
    const auto& ob = obstacles[o];
    const std::string what = fmt::format("obstacle group {}", o);
    if (ob.kind != CellKind::StaticObstacle && ob.kind != CellKind::Pathogen)
      throw std::invalid_argument(what + ": kind must be static or pathogen");
    if (ob.count < 0) throw std::invalid_argument(what + ": negative count");
    check_signature(ob.signature, trait_count, what);
  }
}

WorldGrid::WorldGrid(int theta_size, int z_size, double radius, std::vector<GroundTruth> cells,
                     std::uint64_t seed)
    : theta_size_(theta_size), z_size_(z_size), radius_(radius), seed_(seed), cells_(std::move(cells)) {
  if (theta_size_ < 1 || z_size_ < 1) throw std::invalid_argument("grid dimensions must be positive");
  if (cells_.size() != static_cast<std::size_t>(theta_size_) * static_cast<std::size_t>(z_size_))
    throw std::invalid_argument("cell count does not match grid dimensions");
}

std::size_t WorldGrid::index_of(LatticeCoord c) const {
  if (!contains(c))
    throw BoundsError(fmt::format("coordinate ({}, {}) outside {}x{} lattice", c.theta, c.z, theta_size_, z_size_));
  return static_cast<std::size_t>(c.z) * static_cast<std::size_t>(theta_size_) + static_cast<std::size_t>(c.theta);
}

const GroundTruth& WorldGrid::ground_truth_at(LatticeCoord c) const { return cells_[index_of(c)]; }

GroundTruth& WorldGrid::mutable_cell(LatticeCoord c) { return cells_[index_of(c)]; }

int wrapped_chebyshev(LatticeCoord a, LatticeCoord b, int theta_size) {
  const int dt = std::abs(a.theta - b.theta) % theta_size;
  return std::max(std::min(dt, theta_size - dt), std::abs(a.z - b.z));
}

CartesianPoint embed_3d(LatticeCoord c, const WorldGrid& grid) {
  (void)grid.index_of(c);
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(c.theta) / static_cast<double>(grid.theta_size());
  return {grid.radius() * std::cos(angle), grid.radius() * std::sin(angle), static_cast<double>(c.z)};
}

WorldGrid generate_world(const WorldSpec& spec) {
  spec.validate();
  const int nt = spec.theta_size;
  const int nz = spec.z_size;
  const std::size_t total = static_cast<std::size_t>(nt) * static_cast<std::size_t>(nz);

  std::size_t minimum_occupied = 0;
  for (const auto& it : spec.infection_types) {
    const std::size_t side = 2 * static_cast<std::size_t>(it.clusters.radius_min) + 1;
    minimum_occupied += static_cast<std::size_t>(it.clusters.count) * side * side;
  }
  for (const auto& ob : spec.obstacles) minimum_occupied += static_cast<std::size_t>(ob.count);
  if (minimum_occupied > total)
    throw CapacityError(fmt::format("world requests at least {} occupied cells but the lattice has {}",
                                    minimum_occupied, total));

  std::vector<GroundTruth> cells(total);
  WorldGrid grid(nt, nz, spec.radius, std::move(cells), spec.seed);
  std::mt19937_64 rng(spec.seed);

  auto infected = [&](int theta, int z) {
    if (z < 0 || z >= nz) return false;
    return grid.cells_[static_cast<std::size_t>(z) * nt + wrap(theta, nt)].kind == CellKind::Infected;
  };
  auto for_each_disk_cell = [&](LatticeCoord center, int r, auto&& fn) {
    for (int dz = -r; dz <= r; ++dz) {
      const int z = center.z + dz;
      if (z < 0 || z >= nz) continue;
      for (int dt = -r; dt <= r; ++dt) fn(LatticeCoord{wrap(center.theta + dt, nt), z});
    }
  };

  std::uniform_int_distribution<int> pick_theta(0, nt - 1);
  std::uniform_int_distribution<int> pick_z(0, nz - 1);
  for (std::size_t t = 0; t < spec.infection_types.size(); ++t) {
    const auto& it = spec.infection_types[t];
    std::uniform_int_distribution<int> pick_radius(it.clusters.radius_min, it.clusters.radius_max);
    for (int k = 0; k < it.clusters.count; ++k) {
      bool placed = false;
      for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
        const LatticeCoord center{pick_theta(rng), pick_z(rng)};
        const int r = pick_radius(rng);
        // Reject if any disk cell touches an existing cluster (keeps clusters
        // separated by at least one non-infected cell).
        bool clear = true;
        for_each_disk_cell(center, r + 1, [&](LatticeCoord c) {
          if (clear && infected(c.theta, c.z)) clear = false;
        });
        if (!clear) continue;
        for_each_disk_cell(center, r, [&](LatticeCoord c) {
          auto& cell = grid.mutable_cell(c);
          cell.kind = CellKind::Infected;
          cell.type_id = static_cast<int>(t);
        });
        grid.clusters_.push_back({static_cast<int>(t), center, r});
        placed = true;
      }
      if (!placed)
        throw CapacityError(fmt::format("could not place cluster {} of infection type {} after {} attempts", k, t,
                                        kPlacementAttempts));
    }
  }

  std::vector<std::size_t> free_cells;
  for (std::size_t i = 0; i < total; ++i)
    if (grid.cells_[i].kind == CellKind::Healthy) free_cells.push_back(i);
  for (const auto& ob : spec.obstacles) {
    for (int k = 0; k < ob.count; ++k) {
      if (free_cells.empty()) throw CapacityError("no free cell left for obstacle placement");
      std::uniform_int_distribution<std::size_t> pick(0, free_cells.size() - 1);
      const std::size_t slot = pick(rng);
      const std::size_t idx = free_cells[slot];
      free_cells[slot] = free_cells.back();
      free_cells.pop_back();
      grid.cells_[idx].kind = ob.kind;
      grid.cells_[idx].true_traits = ob.signature;
      grid.obstacles_.push_back({ob.kind, LatticeCoord{static_cast<int>(idx % nt), static_cast<int>(idx / nt)}});
    }
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  const auto m = static_cast<std::size_t>(spec.trait_count);
  std::vector<double> raw(m);
  for (auto& cell : grid.cells_) {
    if (cell.is_obstacle()) continue;
    const auto& sig = cell.kind == CellKind::Infected ? spec.infection_types[cell.type_id].signature
                                                      : spec.healthy_signature;
    for (std::size_t j = 0; j < m; ++j) raw[j] = sig[j] + (spec.trait_noise > 0.0 ? spec.trait_noise * noise(rng) : 0.0);
    cell.true_traits.assign(m, 0.0);
    simd::clamp(raw, 0.0, 1.0, cell.true_traits);
  }
  return grid;
}

namespace {
constexpr double kLow = 0.15;
constexpr double kHigh = 0.85;
constexpr int kMinDefaultTraits = 7;

void require_default_traits(int trait_count) {
  if (trait_count < kMinDefaultTraits)
    throw std::invalid_argument(
        fmt::format("built-in signatures need at least {} traits, got {}", kMinDefaultTraits, trait_count));
}
}  // namespace

std::vector<double> default_healthy_signature(int trait_count) {
  require_default_traits(trait_count);
  return std::vector<double>(static_cast<std::size_t>(trait_count), kLow);
}

std::vector<double> default_infection_signature(int type_id, int trait_count) {
  require_default_traits(trait_count);
  if (type_id < 0 || type_id > 15)
    throw std::invalid_argument(fmt::format("built-in signatures cover infection types 0..15, got {}", type_id));
  const unsigned code = type_id == 0 ? 1u : 2u * static_cast<unsigned>(type_id);
  std::vector<double> sig(static_cast<std::size_t>(trait_count), kLow);
  for (int bit = 0; bit < 5; ++bit)
    if (code & (1u << bit)) sig[static_cast<std::size_t>(bit)] = kHigh;
  return sig;
}

std::vector<double> default_obstacle_signature(CellKind kind, int trait_count) {
  require_default_traits(trait_count);
  std::vector<double> sig(static_cast<std::size_t>(trait_count), kLow);
  if (kind == CellKind::StaticObstacle) {
    sig[5] = kHigh;
  } else if (kind == CellKind::Pathogen) {
    sig[6] = kHigh;
  } else {
    throw std::invalid_argument("obstacle signature requested for a non-obstacle kind");
  }
  return sig;
}

}  // namespace lumen
