#pragma once

// Per-run observation log ("database"), CIPG curves per infection type, the
// shared CILG trait-level curves and run metrics.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lumen/sensing.hpp"
#include "lumen/world.hpp"

namespace lumen {

enum class DispenseState { None, Dispensed, Withheld };

struct CellObservation {
  std::uint64_t n = 0;
  LatticeCoord coord;
  CartesianPoint point;
  TraitVector traits;  // Normalized01; reported on the 1-10 scale
  double avg_L = 0.0;  // mean trait level on the 1-10 scale
  std::map<int, double> cipm_per_type;
  std::optional<int> classified_type;
  std::vector<int> co_types;  // dual infections: share the classified P_n
  double probability = 0.0;   // P_n: CIPM of classified_type, else the largest CIPM
  std::optional<CellKind> obstacle;
  DispenseState dispensed = DispenseState::None;
};

struct CurvePoint {
  std::uint64_t n;
  double value;
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct CipgCurve {
  int type_id = 0;
  std::vector<CurvePoint> points;
};

struct CilgCurves {
  std::vector<std::vector<CurvePoint>> per_trait;  // L_{n,m} on the 1-10 scale
  std::vector<CurvePoint> average;                 // Avg(L_n)
};

struct TypeCount {
  int truth = 0;
  int detected = 0;
  friend bool operator==(const TypeCount&, const TypeCount&) = default;
};

/// Counters an agent accumulates while running.
struct RunStats {
  std::uint64_t step_count = 0;
  std::uint64_t avoidance_steps = 0;
  int obstacle_encounters = 0;
  int learned_types = 0;
  int dispensed = 0;
  int withheld = 0;
  double wall_ms = 0.0;
};

struct RunMetrics {
  int observed_cells = 0;
  int affected_truth_count = 0;
  int detected_count = 0;
  double detection_pct = 0.0;
  bool vacuous = false;  // no affected cells in truth; detection_pct reported as 100
  int false_positives = 0;
  std::map<int, TypeCount> per_type;  // keyed by ground-truth infection type
  RunStats stats;
};

struct RunLabel {
  std::string scenario;
  int repetition = 0;
  std::string agent;
};

class ScanReport {
 public:
  /// `initial_types` get a CIPG curve from the start of the run; other types
  /// get one when they are first classified.
  ScanReport(std::size_t trait_count, const std::vector<int>& initial_types, RunLabel label = {});

  /// Appends to the log and curves. Throws ProtocolViolation when n does not
  /// increase or the coordinate was already recorded.
  void record_observation(CellObservation obs);

  [[nodiscard]] const std::vector<CellObservation>& observations() const { return observations_; }
  [[nodiscard]] const std::map<int, CipgCurve>& cipg() const { return cipg_; }
  [[nodiscard]] const CilgCurves& cilg() const { return cilg_; }
  [[nodiscard]] std::size_t trait_count() const { return trait_count_; }
  [[nodiscard]] const RunLabel& label() const { return label_; }
  [[nodiscard]] const std::optional<RunMetrics>& metrics() const { return metrics_; }
  void set_metrics(RunMetrics m) { metrics_ = std::move(m); }

 private:
  std::size_t trait_count_;
  RunLabel label_;
  std::vector<CellObservation> observations_;
  std::set<LatticeCoord> recorded_;
  std::map<int, CipgCurve> cipg_;
  CilgCurves cilg_;
  std::optional<RunMetrics> metrics_;
};

/// Detection percentage over ground-truth infected cells: detected means
/// observed with a classified type.
RunMetrics compute_metrics(const ScanReport& report, const WorldGrid& grid, const RunStats& stats);

}  // namespace lumen
