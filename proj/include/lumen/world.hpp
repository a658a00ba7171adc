#pragma once

// The lumen wall: a Θ×Z lattice wrapped in theta and open in z, embedded on a
// cylinder of the given radius, with seeded hidden ground truth.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace lumen {

struct LatticeCoord {
  int theta = 0;
  int z = 0;

  friend auto operator<=>(const LatticeCoord&, const LatticeCoord&) = default;
};

struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

enum class CellKind : std::uint8_t { Healthy, Infected, StaticObstacle, Pathogen };

struct GroundTruth {
  CellKind kind = CellKind::Healthy;
  int type_id = -1;  // >= 0 iff kind == Infected
  std::vector<double> true_traits;

  [[nodiscard]] bool is_obstacle() const {
    return kind == CellKind::StaticObstacle || kind == CellKind::Pathogen;
  }
  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct ClusterSpec {
  int count = 1;
  int radius_min = 1;
  int radius_max = 1;
};

struct InfectionTypeSpec {
  std::vector<double> signature;
  ClusterSpec clusters;
};

struct ObstacleSpec {
  CellKind kind = CellKind::StaticObstacle;  // StaticObstacle or Pathogen
  std::vector<double> signature;
  int count = 0;
};

struct WorldSpec {
  int theta_size = 32;
  int z_size = 64;
  double radius = 1.0;
  int trait_count = 7;
  std::vector<double> healthy_signature;
  std::vector<InfectionTypeSpec> infection_types;
  std::vector<ObstacleSpec> obstacles;
  double trait_noise = 0.05;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
};

/// One placed cluster, kept so tests can cross-check generator output.
struct ClusterRecord {
  int type_id;
  LatticeCoord center;
  int radius;
};

struct ObstacleRecord {
  CellKind kind;
  LatticeCoord coord;
};

class WorldGrid {
 public:
  /// Builds a grid from explicit cells (row-major by z then theta). Used for
  /// hand-constructed test worlds.
  WorldGrid(int theta_size, int z_size, double radius, std::vector<GroundTruth> cells,
            std::uint64_t seed = 0);

  [[nodiscard]] int theta_size() const { return theta_size_; }
  [[nodiscard]] int z_size() const { return z_size_; }
  [[nodiscard]] std::size_t cell_count() const { return cells_.size(); }
  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] bool contains(LatticeCoord c) const {
    return c.theta >= 0 && c.theta < theta_size_ && c.z >= 0 && c.z < z_size_;
  }
  [[nodiscard]] std::size_t index_of(LatticeCoord c) const;

  /// Oracle access; throws BoundsError. Agents go through the sensing module.
  [[nodiscard]] const GroundTruth& ground_truth_at(LatticeCoord c) const;
  GroundTruth& mutable_cell(LatticeCoord c);

  [[nodiscard]] const std::vector<GroundTruth>& cells() const { return cells_; }
  [[nodiscard]] const std::vector<ClusterRecord>& clusters() const { return clusters_; }
  [[nodiscard]] const std::vector<ObstacleRecord>& obstacles() const { return obstacles_; }

  friend bool operator==(const WorldGrid& a, const WorldGrid& b) {
    return a.theta_size_ == b.theta_size_ && a.z_size_ == b.z_size_ && a.radius_ == b.radius_ &&
           a.seed_ == b.seed_ && a.cells_ == b.cells_;
  }

 private:
  friend WorldGrid generate_world(const WorldSpec& spec);

  int theta_size_;
  int z_size_;
  double radius_;
  std::uint64_t seed_;
  std::vector<GroundTruth> cells_;
  std::vector<ClusterRecord> clusters_;
  std::vector<ObstacleRecord> obstacles_;
};

/// Places each requested cluster as a Chebyshev disk (theta wrapped, z
/// clipped) at least one cell apart from every other cluster, then obstacles
/// on uniformly random free cells. Throws CapacityError when the request
/// cannot fit.
WorldGrid generate_world(const WorldSpec& spec);

CartesianPoint embed_3d(LatticeCoord c, const WorldGrid& grid);

/// Max-norm distance with theta measured the short way around.
int wrapped_chebyshev(LatticeCoord a, LatticeCoord b, int theta_size);

/// Built-in signature set: healthy is all-low; infection type 0 sets trait 0
/// high, type i >= 1 sets the bits of 2i over traits 0..4; static obstacles set
/// trait 5 and pathogens trait 6. Low/high levels are 0.15/0.85. Unknown types
/// built this way are farther from type 0 than from healthy, so they stay
/// unknown to an agent that only knows type 0. Requires trait_count >= 7 and
/// type_id <= 15.
std::vector<double> default_healthy_signature(int trait_count);
std::vector<double> default_infection_signature(int type_id, int trait_count);
std::vector<double> default_obstacle_signature(CellKind kind, int trait_count);

}  // namespace lumen
