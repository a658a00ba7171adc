#include "lumen/report.hpp"

#include <fmt/format.h>

#include "lumen/errors.hpp"

namespace lumen {

ScanReport::ScanReport(std::size_t trait_count, const std::vector<int>& initial_types, RunLabel label)
    : trait_count_(trait_count), label_(std::move(label)) {
  cilg_.per_trait.resize(trait_count_);
  for (int id : initial_types) cipg_.emplace(id, CipgCurve{id, {}});
}

void ScanReport::record_observation(CellObservation obs) {
  if (!observations_.empty() && obs.n <= observations_.back().n)
    throw ProtocolViolation(fmt::format("observation n={} recorded after n={}", obs.n, observations_.back().n));
  if (obs.traits.size() != trait_count_)
    throw ArityError(fmt::format("observation has {} traits, report expects {}", obs.traits.size(), trait_count_));
  if (!recorded_.insert(obs.coord).second)
    throw ProtocolViolation(fmt::format("cell ({}, {}) recorded twice", obs.coord.theta, obs.coord.z));

  const TraitVector levels = to_scale_1_10(obs.traits);
  for (std::size_t m = 0; m < trait_count_; ++m) cilg_.per_trait[m].push_back({obs.n, levels[m]});
  cilg_.average.push_back({obs.n, obs.avg_L});

  if (obs.classified_type) {
    std::set<int> carriers{*obs.classified_type};
    carriers.insert(obs.co_types.begin(), obs.co_types.end());
    for (int id : carriers) cipg_.try_emplace(id, CipgCurve{id, {}});
    for (auto& [id, curve] : cipg_) curve.points.push_back({obs.n, carriers.contains(id) ? obs.probability : 0.0});
  }
  observations_.push_back(std::move(obs));
}

RunMetrics compute_metrics(const ScanReport& report, const WorldGrid& grid, const RunStats& stats) {
  RunMetrics m;
  m.stats = stats;
  m.observed_cells = static_cast<int>(report.observations().size());
  for (const auto& cell : grid.cells()) {
    if (cell.kind != CellKind::Infected) continue;
    ++m.affected_truth_count;
    ++m.per_type[cell.type_id].truth;
  }
  for (const auto& obs : report.observations()) {
    const GroundTruth& truth = grid.ground_truth_at(obs.coord);
    const bool flagged = obs.classified_type.has_value() && !obs.obstacle;
    if (truth.kind == CellKind::Infected) {
      if (flagged) {
        ++m.detected_count;
        ++m.per_type[truth.type_id].detected;
      }
    } else if (flagged) {
      ++m.false_positives;
    }
  }
  if (m.affected_truth_count == 0) {
    m.vacuous = true;
    m.detection_pct = 100.0;
  } else {
    m.detection_pct = 100.0 * m.detected_count / m.affected_truth_count;
  }
  return m;
}

}  // namespace lumen
