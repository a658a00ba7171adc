#pragma once

// The automaton run loop (sense, score, classify, record, treat, move) and the
// obstacle-avoidance baseline it is benchmarked against.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "lumen/report.hpp"
#include "lumen/search.hpp"
#include "lumen/sensing.hpp"
#include "lumen/world.hpp"

namespace lumen {

struct AgentSpec {
  TraitVector healthy;
  std::map<int, TraitVector> known;
  std::optional<double> novelty_threshold;  // default: half the min pairwise signature distance, floor 0.1
  double dual_margin = 0.01;
  int payload_units = 100000;
  double sensor_noise = 0.0;
  std::uint64_t seed = 0;
  int d_avoid = 5;
  int d_avoid_known = 1;
  int s_skip = 3;
  double obstacle_match_tolerance = 0.05;
  RunLabel label;

  [[nodiscard]] SignatureLibrary make_library() const;
};

struct ObstacleEntry {
  TraitVector signature;
  int type_id = 0;
  int encounters = 0;
  std::uint64_t avoid_cost_steps = 0;
};

class ObstacleMemory {
 public:
  explicit ObstacleMemory(double match_tolerance) : tolerance_(match_tolerance) {}

  /// Closest stored entry within the tolerance, if any.
  [[nodiscard]] std::optional<std::size_t> match(const TraitVector& signature) const;
  std::size_t add(const TraitVector& signature, int type_id);

  [[nodiscard]] const std::vector<ObstacleEntry>& entries() const { return entries_; }
  ObstacleEntry& entry(std::size_t i) { return entries_.at(i); }
  [[nodiscard]] double tolerance() const { return tolerance_; }

 private:
  double tolerance_;
  std::vector<ObstacleEntry> entries_;
};

struct DispenseEvent {
  LatticeCoord coord;
  int type_id;
  bool withheld;
};

struct Payload {
  int units_remaining = 0;
  std::vector<DispenseEvent> dispense_log;
  std::set<LatticeCoord> treated;
};

/// One unit per affected cell while supplies last; later events are logged as
/// withheld. Throws ProtocolViolation on a second dispense at the same cell.
DispenseState dispense(Payload& payload, LatticeCoord coord, int type_id);

struct AgentState {
  SearchState search;
  SignatureLibrary library;
  ObstacleMemory memory;
  Payload payload;
  RunStats stats;
  std::optional<LatticeCoord> position;
};

struct AvoidanceOutcome {
  bool first_encounter;
  int type_id;
  std::uint64_t cost_steps;
};

/// Learns or recalls an obstacle signature and charges the detour: d_avoid on
/// a first encounter (the signature becomes a new learned type), d_avoid_known
/// when the memory already holds a signature within tolerance.
AvoidanceOutcome handle_obstacle(AgentState& state, const AgentSpec& spec, LatticeCoord coord,
                                 const TraitVector& signature);

struct AgentRun {
  ScanReport report;
  AgentState state;
};

/// Full automaton run: helix coverage with ring expansion around detections,
/// novelty registration and obstacle learning.
AgentRun run_aia(const WorldGrid& grid, const AgentSpec& spec);

/// Baseline: helix only, known signatures only, no memory; every obstacle
/// costs d_avoid and blinds it to the next s_skip helix cells.
AgentRun run_oam(const WorldGrid& grid, const AgentSpec& spec);

}  // namespace lumen
