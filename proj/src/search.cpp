#include "lumen/search.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "lumen/errors.hpp"

namespace lumen {

LatticeCoord helix_coord(std::size_t i, int theta_size, int z_size) {
  const std::size_t total = static_cast<std::size_t>(theta_size) * static_cast<std::size_t>(z_size);
  if (i >= total) throw BoundsError(fmt::format("helix index {} outside [0, {})", i, total));
  const auto t = static_cast<std::size_t>(theta_size);
  return {static_cast<int>(i % t), static_cast<int>(i / t)};
}

std::vector<LatticeCoord> ring_coords(LatticeCoord center, int r, int theta_size, int z_size) {
  std::vector<LatticeCoord> out;
  if (r < 1) return out;
  auto push = [&](int dt, int dz) {
    const int z = center.z + dz;
    if (z < 0 || z >= z_size) return;
    int theta = (center.theta + dt) % theta_size;
    if (theta < 0) theta += theta_size;
    const LatticeCoord c{theta, z};
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  };
  for (int dz = 0; dz <= r; ++dz) push(r, dz);           // +theta edge, upward
  for (int dt = r - 1; dt >= -r; --dt) push(dt, r);      // top edge
  for (int dz = r - 1; dz >= -r; --dz) push(-r, dz);     // -theta edge, downward
  for (int dt = -r + 1; dt <= r; ++dt) push(dt, -r);     // bottom edge
  for (int dz = -r + 1; dz < 0; ++dz) push(r, dz);       // close back to the start
  return out;
}

SearchState::SearchState(int theta_size, int z_size, SearchOptions options)
    : theta_size_(theta_size),
      z_size_(z_size),
      options_(options),
      state_(static_cast<std::size_t>(theta_size) * static_cast<std::size_t>(z_size), CellState::Unvisited) {
  if (theta_size < 1 || z_size < 1) throw std::invalid_argument("search lattice must be non-empty");
}

int SearchState::max_ring() const {
  // Beyond this radius the disk already covers the whole lattice.
  return std::max((theta_size_ + 1) / 2, z_size_);
}

void SearchState::start_ring(int r) {
  mode_.current_ring = r;
  ring_ = ring_coords(mode_.center, r, theta_size_, z_size_);
  ring_pos_ = 0;
  ring_affected_ = 0;
}

LatticeCoord SearchState::emit(LatticeCoord c) {
  state_[index(c)] = CellState::Pending;
  order_.push_back(c);
  outstanding_ = c;
  return c;
}

void SearchState::record_verdict(const Verdict& verdict) {
  if (!outstanding_)
    throw ProtocolViolation(
        fmt::format("verdict for ({}, {}) but no cell is outstanding", verdict.coord.theta, verdict.coord.z));
  if (verdict.coord != *outstanding_)
    throw ProtocolViolation(fmt::format("verdict for ({}, {}) but ({}, {}) was emitted", verdict.coord.theta,
                                        verdict.coord.z, outstanding_->theta, outstanding_->z));
  const LatticeCoord c = *outstanding_;
  outstanding_.reset();
  state_[index(c)] = verdict.affected ? CellState::Affected : CellState::Clear;
  if (mode_.kind == SearchModeKind::HorizontalSpiral) {
    if (verdict.affected) ++ring_affected_;
  } else if (verdict.affected && options_.allow_horizontal) {
    mode_ = {SearchModeKind::HorizontalSpiral, c, 0};
    start_ring(1);
  }
}

std::optional<LatticeCoord> SearchState::next_target(const std::optional<Verdict>& last_verdict) {
  if (last_verdict) {
    record_verdict(*last_verdict);
  } else if (outstanding_) {
    throw ProtocolViolation("next_target called without a verdict for the emitted cell");
  }
  if (finished_) return std::nullopt;

  while (mode_.kind == SearchModeKind::HorizontalSpiral) {
    while (ring_pos_ < ring_.size()) {
      const LatticeCoord c = ring_[ring_pos_++];
      switch (state_[index(c)]) {
        case CellState::Unvisited: return emit(c);
        case CellState::Affected: ++ring_affected_; break;
        default: break;  // stored clear verdict is reused, never re-measured
      }
    }
    if (ring_affected_ > 0 && mode_.current_ring < max_ring()) {
      start_ring(mode_.current_ring + 1);
    } else {
      mode_ = {};
      ring_.clear();
    }
  }

  const std::size_t total = state_.size();
  while (helix_cursor_ < total) {
    const LatticeCoord c = helix_coord(helix_cursor_++, theta_size_, z_size_);
    if (state_[index(c)] == CellState::Unvisited) return emit(c);
  }
  finished_ = true;
  return std::nullopt;
}

std::vector<LatticeCoord> SearchState::skip_helix(int count) {
  if (outstanding_) throw ProtocolViolation("skip_helix with an outstanding emission");
  if (mode_.kind != SearchModeKind::VerticalSpiral) throw ProtocolViolation("skip_helix outside vertical mode");
  std::vector<LatticeCoord> skipped;
  while (count > 0 && helix_cursor_ < state_.size()) {
    const LatticeCoord c = helix_coord(helix_cursor_++, theta_size_, z_size_);
    if (state_[index(c)] != CellState::Unvisited) continue;
    state_[index(c)] = CellState::Skipped;
    skipped.push_back(c);
    --count;
  }
  return skipped;
}

}  // namespace lumen
