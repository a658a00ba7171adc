#pragma once

// Two-mode spiral search over the wrapped lattice.
//
// Vertical mode walks a discrete helix (theta = i mod Θ, z = i div Θ) that
// visits every cell once. An affected verdict switches to horizontal mode:
// Chebyshev rings of growing radius around that cell, until one whole ring
// holds no affected cell; then the helix resumes where it left off. Cells are
// emitted at most once per run.

#include <cstddef>
#include <optional>
#include <vector>

#include "lumen/world.hpp"

namespace lumen {

/// Throws BoundsError unless 0 <= i < Θ·Z.
LatticeCoord helix_coord(std::size_t i, int theta_size, int z_size);

/// Cells at Chebyshev radius r around `center`, theta wrapped and z clipped,
/// starting at (theta + r, z) and walking counterclockwise (up the +theta
/// edge, back along the top, down the -theta edge, forward along the bottom).
/// Wrap-around duplicates are dropped keeping the first occurrence.
std::vector<LatticeCoord> ring_coords(LatticeCoord center, int r, int theta_size, int z_size);

enum class SearchModeKind { VerticalSpiral, HorizontalSpiral };

struct SearchMode {
  SearchModeKind kind = SearchModeKind::VerticalSpiral;
  LatticeCoord center{};
  int current_ring = 0;  // >= 1 in horizontal mode
};

struct Verdict {
  LatticeCoord coord;
  bool affected = false;
};

struct SearchOptions {
  // Disabled for the obstacle-avoidance baseline, which never expands around
  // a detection.
  bool allow_horizontal = true;
};

class SearchState {
 public:
  SearchState(int theta_size, int z_size, SearchOptions options = {});

  /// Feeds the verdict for the previously emitted cell (absent only on the
  /// first call) and returns the next cell to visit, or nullopt when the helix
  /// is exhausted. Throws ProtocolViolation when the verdict does not match
  /// the outstanding emission.
  std::optional<LatticeCoord> next_target(const std::optional<Verdict>& last_verdict);

  /// Resolves the outstanding emission without advancing; a following
  /// next_target(std::nullopt) continues the search.
  void record_verdict(const Verdict& verdict);

  /// Advances the helix past up to `count` not-yet-visited cells without
  /// emitting them (blind detour). Only valid in vertical mode with no
  /// outstanding emission. Returns the skipped cells, which are never emitted.
  std::vector<LatticeCoord> skip_helix(int count);

  [[nodiscard]] const SearchMode& mode() const { return mode_; }
  [[nodiscard]] std::size_t helix_cursor() const { return helix_cursor_; }
  /// Helix index vertical mode resumes from; only helix steps move it.
  [[nodiscard]] std::size_t pending_resume_cursor() const { return helix_cursor_; }
  [[nodiscard]] bool visited(LatticeCoord c) const { return state_[index(c)] != CellState::Unvisited; }
  /// Emission order.
  [[nodiscard]] const std::vector<LatticeCoord>& visit_order() const { return order_; }
  [[nodiscard]] bool finished() const { return finished_; }
  [[nodiscard]] int theta_size() const { return theta_size_; }
  [[nodiscard]] int z_size() const { return z_size_; }

 private:
  enum class CellState : unsigned char { Unvisited, Pending, Clear, Affected, Skipped };

  [[nodiscard]] std::size_t index(LatticeCoord c) const {
    return static_cast<std::size_t>(c.z) * static_cast<std::size_t>(theta_size_) + static_cast<std::size_t>(c.theta);
  }
  void start_ring(int r);
  [[nodiscard]] int max_ring() const;
  LatticeCoord emit(LatticeCoord c);

  int theta_size_;
  int z_size_;
  SearchOptions options_;
  SearchMode mode_;
  std::size_t helix_cursor_ = 0;
  std::vector<CellState> state_;
  std::vector<LatticeCoord> order_;
  std::optional<LatticeCoord> outstanding_;
  std::vector<LatticeCoord> ring_;
  std::size_t ring_pos_ = 0;
  int ring_affected_ = 0;
  bool finished_ = false;
};

}  // namespace lumen
