#include "lumen/search.hpp"

#include <functional>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "lumen/errors.hpp"
#include "oracles.hpp"

using namespace lumen;

namespace {

struct Trace {
  std::vector<LatticeCoord> emitted;
  std::vector<SearchModeKind> mode_after;
  std::vector<std::size_t> cursor_after;
  std::vector<std::set<LatticeCoord>> episodes;  // visited set at the end of each horizontal episode
};

Trace drive(int nt, int nz, const std::function<bool(LatticeCoord)>& affected, SearchOptions opt = {}) {
  SearchState s(nt, nz, opt);
  Trace tr;
  std::set<LatticeCoord> seen;
  auto target = s.next_target(std::nullopt);
  while (target) {
    tr.emitted.push_back(*target);
    seen.insert(*target);
    const auto before = s.mode().kind;
    target = s.next_target(Verdict{tr.emitted.back(), affected(tr.emitted.back())});
    const auto after = s.mode().kind;
    if (before == SearchModeKind::HorizontalSpiral && after == SearchModeKind::VerticalSpiral) tr.episodes.push_back(seen);
    tr.mode_after.push_back(after);
    tr.cursor_after.push_back(s.pending_resume_cursor());
    if (tr.emitted.size() > static_cast<std::size_t>(nt * nz) + 1) break;
  }
  EXPECT_TRUE(s.finished());
  EXPECT_FALSE(s.next_target(std::nullopt));
  return tr;
}

}  // namespace

TEST(HelixCoord, Examples) {
  EXPECT_EQ(helix_coord(0, 16, 4), (LatticeCoord{0, 0}));
  EXPECT_EQ(helix_coord(16, 16, 4), (LatticeCoord{0, 1}));
  EXPECT_EQ(helix_coord(37, 16, 4), (LatticeCoord{5, 2}));
  EXPECT_THROW(helix_coord(64, 16, 4), BoundsError);
}

TEST(RingCoords, InteriorFullMooreRing) {
  const auto ring = ring_coords({5, 5}, 1, 16, 16);
  ASSERT_EQ(ring.size(), 8u);
  EXPECT_EQ(ring.front(), (LatticeCoord{6, 5}));
  std::set<LatticeCoord> expect;
  for (int dt = -1; dt <= 1; ++dt)
    for (int dz = -1; dz <= 1; ++dz)
      if (dt || dz) expect.insert({5 + dt, 5 + dz});
  EXPECT_EQ(std::set<LatticeCoord>(ring.begin(), ring.end()), expect);
  // Counterclockwise: starts going up the +theta edge.
  EXPECT_EQ(ring[1], (LatticeCoord{6, 6}));
}

TEST(RingCoords, ClippedAtZeroHasFiveCells) {
  const auto ring = ring_coords({5, 0}, 1, 16, 16);
  EXPECT_EQ(ring.size(), 5u);
  for (const auto& c : ring) EXPECT_GE(c.z, 0);
}

TEST(RingCoords, WrapsTheta) {
  const auto ring = ring_coords({7, 3}, 1, 8, 8);
  EXPECT_EQ(ring.front(), (LatticeCoord{0, 3}));
  EXPECT_EQ(std::count_if(ring.begin(), ring.end(), [](auto c) { return c.theta == 0; }), 3);
}

TEST(RingCoords, MatchesChebyshevEnumeration) {
  for (int nt : {5, 8, 13}) {
    for (int r = 1; r <= 7; ++r) {
      const LatticeCoord center{2, 4};
      const auto ring = ring_coords(center, r, nt, 10);
      std::set<LatticeCoord> got(ring.begin(), ring.end());
      EXPECT_EQ(got.size(), ring.size()) << "duplicates";
      // Cells whose unwrapped offset lies on the ring boundary.
      std::set<LatticeCoord> want;
      for (int dz = -r; dz <= r; ++dz)
        for (int dt = -r; dt <= r; ++dt)
          if (std::max(std::abs(dt), std::abs(dz)) == r && center.z + dz >= 0 && center.z + dz < 10)
            want.insert({((center.theta + dt) % nt + nt) % nt, center.z + dz});
      EXPECT_EQ(got, want) << "nt=" << nt << " r=" << r;
    }
  }
}

TEST(NextTarget, AllHealthyIsPureHelix) {
  const auto tr = drive(8, 6, [](LatticeCoord) { return false; });
  ASSERT_EQ(tr.emitted.size(), 48u);
  for (std::size_t i = 0; i < 48; ++i) EXPECT_EQ(tr.emitted[i], helix_coord(i, 8, 6));
  for (auto m : tr.mode_after) EXPECT_EQ(m, SearchModeKind::VerticalSpiral);
}

TEST(NextTarget, SingleAffectedCellHandTrace6x6) {
  const LatticeCoord seed{2, 1};  // helix index 8
  const auto tr = drive(6, 6, [&](LatticeCoord c) { return c == seed; });
  std::vector<LatticeCoord> expect;
  for (int i = 0; i <= 8; ++i) expect.push_back(helix_coord(i, 6, 6));
  // Ring 1 from (3,1) counterclockwise, skipping cells the helix already saw.
  expect.insert(expect.end(), {{3, 1}, {3, 2}, {2, 2}, {1, 2}});
  // Helix resumes at index 9 = (3,1), already visited; continues.
  for (int i = 9; i < 36; ++i) {
    const auto c = helix_coord(i, 6, 6);
    if (std::find(expect.begin(), expect.end(), c) == expect.end()) expect.push_back(c);
  }
  EXPECT_EQ(tr.emitted, expect);
}

TEST(NextTarget, DiskClusterCompletedDuringHorizontalPhase) {
  // 5x5 disk centered at (10, 8) on 16x20.
  const LatticeCoord center{10, 8};
  auto in_disk = [&](LatticeCoord c) { return oracle::chebyshev(c, center, 16) <= 2; };
  const auto tr = drive(16, 20, in_disk);
  ASSERT_EQ(tr.episodes.size(), 1u);
  const auto comp = oracle::flood_fill({10, 6}, 16, 20, in_disk);
  EXPECT_EQ(comp.size(), 25u);
  for (const auto& c : comp) EXPECT_TRUE(tr.episodes[0].contains(c));
}

TEST(NextTarget, RandomWorldProperties) {
  std::mt19937_64 rng(2024);
  for (int w = 0; w < 150; ++w) {
    const int nt = 4 + static_cast<int>(rng() % 20);
    const int nz = 4 + static_cast<int>(rng() % 24);
    // Random affected blobs plus sprinkled singletons.
    std::set<LatticeCoord> affected;
    const int blobs = static_cast<int>(rng() % 5);
    for (int b = 0; b < blobs; ++b) {
      const LatticeCoord c{static_cast<int>(rng() % nt), static_cast<int>(rng() % nz)};
      const int r = static_cast<int>(rng() % 3);
      for (const auto& x : oracle::raster(nt, nz))
        if (oracle::chebyshev(x, c, nt) <= r && rng() % 5 != 0) affected.insert(x);
    }
    for (int k = 0; k < 3; ++k) affected.insert({static_cast<int>(rng() % nt), static_cast<int>(rng() % nz)});
    auto is_aff = [&](LatticeCoord c) { return affected.contains(c); };
    const auto tr = drive(nt, nz, is_aff);

    // Coverage with no double visits.
    const std::set<LatticeCoord> uniq(tr.emitted.begin(), tr.emitted.end());
    EXPECT_EQ(uniq.size(), tr.emitted.size());
    EXPECT_EQ(tr.emitted.size(), static_cast<std::size_t>(nt * nz));
    // Monotone resume cursor.
    for (std::size_t i = 1; i < tr.cursor_after.size(); ++i) EXPECT_GE(tr.cursor_after[i], tr.cursor_after[i - 1]);
    // Each horizontal episode leaves no affected component partially visited.
    for (const auto& seen : tr.episodes) {
      for (const auto& comp : oracle::components(nt, nz, is_aff)) {
        bool any = false, all = true;
        for (const auto& c : comp) {
          if (seen.contains(c)) {
            any = true;
          } else {
            all = false;
          }
        }
        if (any) EXPECT_TRUE(all) << "partially visited component, world " << w;
      }
    }
  }
}

TEST(NextTarget, BaselineNeverExpands) {
  const auto tr = drive(8, 8, [](LatticeCoord c) { return c.theta == 3; }, SearchOptions{false});
  for (std::size_t i = 0; i < tr.emitted.size(); ++i) EXPECT_EQ(tr.emitted[i], helix_coord(i, 8, 8));
}

TEST(NextTarget, ProtocolViolations) {
  SearchState s(6, 6);
  EXPECT_THROW(s.next_target(Verdict{{0, 0}, false}), ProtocolViolation);  // nothing emitted yet
  const auto first = s.next_target(std::nullopt);
  ASSERT_TRUE(first);
  EXPECT_THROW(s.next_target(Verdict{{1, 0}, false}), ProtocolViolation);  // wrong cell
  EXPECT_THROW(s.next_target(std::nullopt), ProtocolViolation);            // missing verdict
  EXPECT_NO_THROW(s.next_target(Verdict{*first, false}));
}

TEST(SkipHelix, SkipsWithoutEmitting) {
  SearchState s(6, 6, SearchOptions{false});
  auto c = s.next_target(std::nullopt);
  s.record_verdict({*c, false});
  const auto skipped = s.skip_helix(3);
  ASSERT_EQ(skipped.size(), 3u);
  EXPECT_EQ(skipped[0], (LatticeCoord{1, 0}));
  EXPECT_EQ(*s.next_target(std::nullopt), (LatticeCoord{4, 0}));
  EXPECT_THROW(s.skip_helix(1), ProtocolViolation);  // outstanding emission
}
