#include "lumen/agents.hpp"

#include <chrono>
#include <limits>

#include <fmt/format.h>

#include "lumen/errors.hpp"
#include "lumen/simd/kernels.hpp"

namespace lumen {

SignatureLibrary AgentSpec::make_library() const {
  if (novelty_threshold) return SignatureLibrary(healthy, known, *novelty_threshold);
  return SignatureLibrary(healthy, known);
}

std::optional<std::size_t> ObstacleMemory::match(const TraitVector& signature) const {
  std::optional<std::size_t> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double d = simd::distance(signature.values(), entries_[i].signature.values());
    if (d <= tolerance_ && d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  return best;
}

std::size_t ObstacleMemory::add(const TraitVector& signature, int type_id) {
  if (match(signature)) throw ProtocolViolation("obstacle signature already stored within tolerance");
  entries_.push_back({signature, type_id, 0, 0});
  return entries_.size() - 1;
}

DispenseState dispense(Payload& payload, LatticeCoord coord, int type_id) {
  if (!payload.treated.insert(coord).second)
    throw ProtocolViolation(fmt::format("cell ({}, {}) already received a dispense event", coord.theta, coord.z));
  const bool withheld = payload.units_remaining <= 0;
  if (!withheld) --payload.units_remaining;
  payload.dispense_log.push_back({coord, type_id, withheld});
  return withheld ? DispenseState::Withheld : DispenseState::Dispensed;
}

AvoidanceOutcome handle_obstacle(AgentState& state, const AgentSpec& spec, LatticeCoord coord,
                                 const TraitVector& signature) {
  (void)coord;
  AvoidanceOutcome out{};
  if (auto hit = state.memory.match(signature)) {
    auto& entry = state.memory.entry(*hit);
    out = {false, entry.type_id, static_cast<std::uint64_t>(spec.d_avoid_known)};
    ++entry.encounters;
    entry.avoid_cost_steps += out.cost_steps;
  } else {
    const int id = state.library.learn(signature);
    auto& entry = state.memory.entry(state.memory.add(signature, id));
    out = {true, id, static_cast<std::uint64_t>(spec.d_avoid)};
    ++entry.encounters;
    entry.avoid_cost_steps += out.cost_steps;
  }
  state.stats.step_count += out.cost_steps;
  state.stats.avoidance_steps += out.cost_steps;
  ++state.stats.obstacle_encounters;
  return out;
}

namespace {

void validate(const AgentSpec& spec) {
  if (spec.d_avoid < 0 || spec.d_avoid_known < 0 || spec.s_skip < 0)
    throw std::invalid_argument("avoidance costs and skip counts must be >= 0");
  if (!(spec.obstacle_match_tolerance > 0.0)) throw std::invalid_argument("obstacle match tolerance must be > 0");
  if (spec.payload_units < 0) throw std::invalid_argument("payload must be >= 0");
}

AgentState make_state(const WorldGrid& grid, const AgentSpec& spec, SearchOptions options) {
  validate(spec);
  if (spec.healthy.size() != grid.cells().front().true_traits.size() && !grid.cells().front().true_traits.empty())
    throw ArityError("agent signatures and world traits differ in length");
  return AgentState{SearchState(grid.theta_size(), grid.z_size(), options), spec.make_library(),
                    ObstacleMemory(spec.obstacle_match_tolerance), Payload{spec.payload_units, {}, {}}, RunStats{},
                    std::nullopt};
}

void move_to(AgentState& state, LatticeCoord c, int theta_size) {
  state.stats.step_count += state.position ? static_cast<std::uint64_t>(wrapped_chebyshev(*state.position, c, theta_size)) : 1u;
  state.position = c;
}

CellObservation base_observation(std::uint64_t n, LatticeCoord c, const WorldGrid& grid, const TraitVector& t) {
  CellObservation obs;
  obs.n = n;
  obs.coord = c;
  obs.point = embed_3d(c, grid);
  obs.traits = t;
  obs.avg_L = average_L(to_scale_1_10(t));
  return obs;
}

std::vector<int> initial_curves(const SignatureLibrary& lib) {
  std::vector<int> ids;
  for (const auto& [id, sig] : lib.known()) ids.push_back(id);
  return ids;
}

template <class Clock = std::chrono::steady_clock>
double elapsed_ms(typename Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

AgentRun run_aia(const WorldGrid& grid, const AgentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  AgentState state = make_state(grid, spec, SearchOptions{true});
  ScanReport report(spec.healthy.size(), initial_curves(state.library), spec.label);
  Sensor sensor(grid, spec.sensor_noise, spec.seed);

  std::uint64_t n = 0;
  for (auto target = state.search.next_target(std::nullopt); target; ++n) {
    const LatticeCoord c = *target;
    move_to(state, c, grid.theta_size());
    Measurement m = sensor.measure(c, n);
    CellObservation obs = base_observation(n, c, grid, m.traits);
    bool affected = false;

    if (m.obstacle) {
      const AvoidanceOutcome avoid = handle_obstacle(state, spec, c, m.traits);
      const double p = cipm(m.traits, state.library.healthy(), *state.library.signature(avoid.type_id));
      obs.obstacle = m.obstacle;
      obs.classified_type = avoid.type_id;
      obs.cipm_per_type = {{avoid.type_id, p}};
      obs.probability = p;
    } else {
      Classification cls = classify(m.traits, state.library, spec.dual_margin);
      if (cls.outcome == Outcome::Novel) {
        register_novel(state.library, m.traits);
        cls = classify(m.traits, state.library, spec.dual_margin);
      }
      obs.cipm_per_type = std::move(cls.cipm_per_type);
      obs.probability = cls.type_id ? obs.cipm_per_type.at(*cls.type_id) : cls.max_cipm;
      if (cls.outcome == Outcome::Affected) {
        affected = true;
        obs.classified_type = cls.type_id;
        obs.co_types = std::move(cls.co_types);
        obs.dispensed = dispense(state.payload, c, *cls.type_id);
      }
    }
    report.record_observation(std::move(obs));
    target = state.search.next_target(Verdict{c, affected});
  }

  for (const auto& e : state.payload.dispense_log) ++(e.withheld ? state.stats.withheld : state.stats.dispensed);
  state.stats.learned_types = static_cast<int>(state.library.learned().size());
  state.stats.wall_ms = elapsed_ms(start);
  return {std::move(report), std::move(state)};
}

AgentRun run_oam(const WorldGrid& grid, const AgentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  AgentState state = make_state(grid, spec, SearchOptions{false});
  ScanReport report(spec.healthy.size(), initial_curves(state.library), spec.label);
  Sensor sensor(grid, spec.sensor_noise, spec.seed);

  std::uint64_t n = 0;
  for (auto target = state.search.next_target(std::nullopt); target; ++n) {
    const LatticeCoord c = *target;
    move_to(state, c, grid.theta_size());
    Measurement m = sensor.measure(c, n);
    CellObservation obs = base_observation(n, c, grid, m.traits);
    bool affected = false;

    if (m.obstacle) {
      obs.obstacle = m.obstacle;
      state.stats.step_count += static_cast<std::uint64_t>(spec.d_avoid);
      state.stats.avoidance_steps += static_cast<std::uint64_t>(spec.d_avoid);
      ++state.stats.obstacle_encounters;
      report.record_observation(std::move(obs));
      state.search.record_verdict(Verdict{c, false});
      state.search.skip_helix(spec.s_skip);
      target = state.search.next_target(std::nullopt);
      continue;
    }

    Classification cls = classify(m.traits, state.library, spec.dual_margin);
    obs.cipm_per_type = std::move(cls.cipm_per_type);
    obs.probability = cls.type_id ? obs.cipm_per_type.at(*cls.type_id) : cls.max_cipm;
    if (cls.outcome == Outcome::Affected) {
      affected = true;
      obs.classified_type = cls.type_id;
      obs.co_types = std::move(cls.co_types);
      obs.dispensed = dispense(state.payload, c, *cls.type_id);
    }
    report.record_observation(std::move(obs));
    target = state.search.next_target(Verdict{c, affected});
  }

  for (const auto& e : state.payload.dispense_log) ++(e.withheld ? state.stats.withheld : state.stats.dispensed);
  state.stats.wall_ms = elapsed_ms(start);
  return {std::move(report), std::move(state)};
}

}  // namespace lumen
