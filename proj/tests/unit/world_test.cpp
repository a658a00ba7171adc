#include "lumen/world.hpp"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "lumen/errors.hpp"
#include "oracles.hpp"

using namespace lumen;

namespace {

WorldSpec base_spec(int nt = 16, int nz = 32) {
  WorldSpec s;
  s.theta_size = nt;
  s.z_size = nz;
  s.trait_count = 7;
  s.healthy_signature = default_healthy_signature(7);
  s.trait_noise = 0.0;
  return s;
}

InfectionTypeSpec type_with(int id, int count, int rmin, int rmax) {
  return {default_infection_signature(id, 7), {count, rmin, rmax}};
}

int count_kind(const WorldGrid& g, CellKind k) {
  int n = 0;
  for (const auto& c : oracle::raster(g.theta_size(), g.z_size())) n += g.ground_truth_at(c).kind == k;
  return n;
}

}  // namespace

TEST(GenerateWorld, EmptySpecIsAllHealthy) {
  const WorldGrid g = generate_world(base_spec());
  EXPECT_EQ(count_kind(g, CellKind::Healthy), 16 * 32);
  for (const auto& cell : g.cells()) EXPECT_EQ(cell.true_traits, default_healthy_signature(7));
}

TEST(GenerateWorld, RadiusZeroClusterIsOneCell) {
  auto s = base_spec();
  s.infection_types.push_back(type_with(0, 1, 0, 0));
  EXPECT_EQ(count_kind(generate_world(s), CellKind::Infected), 1);
}

TEST(GenerateWorld, RadiusTwoDiskHas25CellsByEnumeration) {
  // Over many seeds, pick one whose disk is not clipped axially and count by
  // brute force over the whole lattice.
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto s = base_spec(16, 32);
    s.seed = seed;
    s.infection_types.push_back(type_with(0, 1, 2, 2));
    const WorldGrid g = generate_world(s);
    const auto center = g.clusters().front().center;
    if (center.z < 2 || center.z > 29) continue;
    ++checked;
    EXPECT_EQ(count_kind(g, CellKind::Infected), 25) << "seed " << seed;
    for (const auto& c : oracle::raster(16, 32)) {
      const bool inside = oracle::chebyshev(c, center, 16) <= 2;
      EXPECT_EQ(g.ground_truth_at(c).kind == CellKind::Infected, inside);
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(GenerateWorld, Deterministic) {
  auto s = base_spec(32, 64);
  s.trait_noise = 0.05;
  s.seed = 99;
  s.infection_types = {type_with(0, 3, 1, 3), type_with(1, 2, 2, 4)};
  s.obstacles = {{CellKind::StaticObstacle, default_obstacle_signature(CellKind::StaticObstacle, 7), 10},
                 {CellKind::Pathogen, default_obstacle_signature(CellKind::Pathogen, 7), 5}};
  EXPECT_TRUE(generate_world(s) == generate_world(s));
  s.seed = 100;
  auto other = generate_world(s);
  s.seed = 99;
  EXPECT_FALSE(generate_world(s) == other);
}

TEST(GenerateWorld, DisjointKindsAndClusterConnectivity) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto s = base_spec(24, 40);
    s.seed = seed;
    s.trait_noise = 0.05;
    s.infection_types = {type_with(0, 2, 0, 3), type_with(1, 2, 1, 4)};
    s.obstacles = {{CellKind::StaticObstacle, default_obstacle_signature(CellKind::StaticObstacle, 7), 12},
                   {CellKind::Pathogen, default_obstacle_signature(CellKind::Pathogen, 7), 4}};
    const WorldGrid g = generate_world(s);
    const int total = count_kind(g, CellKind::Healthy) + count_kind(g, CellKind::Infected) +
                      count_kind(g, CellKind::StaticObstacle) + count_kind(g, CellKind::Pathogen);
    EXPECT_EQ(total, 24 * 40);
    EXPECT_EQ(count_kind(g, CellKind::StaticObstacle), 12);
    EXPECT_EQ(count_kind(g, CellKind::Pathogen), 4);
    for (const auto& cell : g.cells()) {
      if (cell.is_obstacle()) EXPECT_EQ(cell.type_id, -1);
      for (double v : cell.true_traits) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
    }
    // Each placed cluster is exactly one 8-connected infected component.
    auto infected = [&](LatticeCoord c) { return g.ground_truth_at(c).kind == CellKind::Infected; };
    for (const auto& cl : g.clusters()) {
      const auto comp = oracle::flood_fill(cl.center, 24, 40, infected);
      std::set<LatticeCoord> disk;
      for (const auto& c : oracle::raster(24, 40))
        if (oracle::chebyshev(c, cl.center, 24) <= cl.radius) disk.insert(c);
      EXPECT_EQ(comp, disk);
      for (const auto& c : comp) EXPECT_EQ(g.ground_truth_at(c).type_id, cl.type_id);
    }
    // Obstacle placement log matches the grid.
    for (const auto& ob : g.obstacles()) EXPECT_EQ(g.ground_truth_at(ob.coord).kind, ob.kind);
  }
}

TEST(GenerateWorld, ClusterWrapsAroundTheta) {
  bool seen = false;
  for (std::uint64_t seed = 0; seed < 400 && !seen; ++seed) {
    auto s = base_spec(16, 32);
    s.seed = seed;
    s.infection_types.push_back(type_with(0, 1, 1, 1));
    const WorldGrid g = generate_world(s);
    if (g.clusters().front().center.theta != 0) continue;
    seen = true;
    const int z = g.clusters().front().center.z;
    EXPECT_EQ(g.ground_truth_at({15, z}).kind, CellKind::Infected);
    EXPECT_EQ(g.ground_truth_at({1, z}).kind, CellKind::Infected);
  }
  EXPECT_TRUE(seen);
}

TEST(GenerateWorld, CapacityError) {
  auto s = base_spec(4, 4);
  s.obstacles = {{CellKind::StaticObstacle, default_obstacle_signature(CellKind::StaticObstacle, 7), 17}};
  EXPECT_THROW(generate_world(s), CapacityError);
  s.obstacles.clear();
  s.infection_types = {type_with(0, 3, 1, 1)};  // 27 cells > 16
  EXPECT_THROW(generate_world(s), CapacityError);
}

TEST(GenerateWorld, InvalidSpecRejected) {
  auto s = base_spec();
  s.infection_types.push_back(type_with(0, 1, 8, 8));  // 2r >= min(16, 32)
  EXPECT_THROW(generate_world(s), std::invalid_argument);
  s = base_spec();
  s.healthy_signature = {0.1, 0.2};
  EXPECT_THROW(generate_world(s), std::invalid_argument);
  s = base_spec();
  s.theta_size = 3;
  EXPECT_THROW(generate_world(s), std::invalid_argument);
}

TEST(Embed3d, Examples) {
  const WorldGrid g = oracle::uniform_world(16, 8, {0.1});
  auto p = embed_3d({0, 0}, g);
  EXPECT_DOUBLE_EQ(p.x, 1.0);
  EXPECT_DOUBLE_EQ(p.y, 0.0);
  EXPECT_DOUBLE_EQ(p.z, 0.0);
  p = embed_3d({4, 5}, g);
  EXPECT_NEAR(p.x, 0.0, 1e-9);
  EXPECT_NEAR(p.y, 1.0, 1e-9);
  EXPECT_NEAR(p.z, 5.0, 1e-9);

  std::vector<GroundTruth> cells(16 * 8);
  const WorldGrid g2(16, 8, 2.0, cells);
  p = embed_3d({3, 7}, g2);
  EXPECT_NEAR(p.x, 2.0 * std::cos(3.0 * std::numbers::pi / 8.0), 1e-12);
  EXPECT_NEAR(p.y, 2.0 * std::sin(3.0 * std::numbers::pi / 8.0), 1e-12);
  EXPECT_EQ(p.z, 7.0);
  for (const auto& c : oracle::raster(16, 8)) {
    const auto q = embed_3d(c, g2);
    EXPECT_NEAR(q.x * q.x + q.y * q.y, 4.0, 1e-9);
  }
}

TEST(GroundTruthAt, BoundsError) {
  const WorldGrid g = oracle::uniform_world(8, 8, {0.1});
  EXPECT_THROW((void)g.ground_truth_at({8, 0}), BoundsError);
  EXPECT_THROW((void)g.ground_truth_at({0, -1}), BoundsError);
  EXPECT_EQ(g.ground_truth_at({7, 7}).kind, CellKind::Healthy);
}

TEST(DefaultSignatures, UnknownTypesStayCloserToHealthyThanToTypeZero) {
  const auto h = default_healthy_signature(7);
  const auto k0 = default_infection_signature(0, 7);
  for (int id = 1; id <= 15; ++id) {
    const auto u = default_infection_signature(id, 7);
    EXPECT_GT(oracle::euclid(u, k0), oracle::euclid(u, h)) << id;
  }
  for (int a = 0; a <= 15; ++a)
    for (int b = a + 1; b <= 15; ++b)
      EXPECT_GE(oracle::euclid(default_infection_signature(a, 7), default_infection_signature(b, 7)), 0.7 - 1e-12);
  EXPECT_THROW(default_healthy_signature(6), std::invalid_argument);
  EXPECT_THROW(default_infection_signature(16, 7), std::invalid_argument);
}
