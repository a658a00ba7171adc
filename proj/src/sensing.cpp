#include "lumen/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "lumen/errors.hpp"
#include "lumen/simd/kernels.hpp"

namespace lumen {

TraitVector::TraitVector(std::vector<double> values, TraitScale scale) : values_(std::move(values)), scale_(scale) {
  const double lo = scale == TraitScale::Normalized01 ? 0.0 : 1.0;
  const double hi = scale == TraitScale::Normalized01 ? 1.0 : 10.0;
  for (double v : values_) {
    if (!(v >= lo && v <= hi)) throw ScaleError(fmt::format("trait value {} outside [{}, {}]", v, lo, hi));
  }
}

TraitVector to_scale_1_10(const TraitVector& t) {
  if (t.scale() != TraitScale::Normalized01) throw ScaleError("to_scale_1_10 expects a Normalized01 vector");
  std::vector<double> out(t.size());
  simd::affine(t.values(), 9.0, 1.0, out);
  // Rounding can push 1 + 9 * 1.0 a hair past the bound; the map is onto [1,10].
  for (double& v : out) v = std::clamp(v, 1.0, 10.0);
  return TraitVector(std::move(out), TraitScale::Scale1to10);
}

TraitVector to_normalized(const TraitVector& t) {
  if (t.scale() != TraitScale::Scale1to10) throw ScaleError("to_normalized expects a Scale1to10 vector");
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp((t[i] - 1.0) / 9.0, 0.0, 1.0);
  return TraitVector(std::move(out), TraitScale::Normalized01);
}

double average_L(const TraitVector& t) {
  if (t.size() == 0) throw ArityError("average_L of an empty trait vector");
  return simd::mean(t.values());
}

double cipm(const TraitVector& t, const TraitVector& healthy, const TraitVector& affected) {
  if (t.size() != healthy.size() || t.size() != affected.size())
    throw ArityError(fmt::format("cipm: trait lengths {}, {}, {} differ", t.size(), healthy.size(), affected.size()));
  const double d_h = simd::distance(t.values(), healthy.values());
  const double d_a = simd::distance(t.values(), affected.values());
  if (d_h == 0.0 && d_a == 0.0) return 0.5;
  return d_h / (d_h + d_a);
}

double default_novelty_threshold(std::span<const TraitVector> signatures) {
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < signatures.size(); ++i)
    for (std::size_t j = i + 1; j < signatures.size(); ++j)
      min_dist = std::min(min_dist, simd::distance(signatures[i].values(), signatures[j].values()));
  if (!std::isfinite(min_dist)) return 0.1;
  return std::max(0.1, 0.5 * min_dist);
}

namespace {
double threshold_for(const TraitVector& healthy, const std::map<int, TraitVector>& known) {
  std::vector<TraitVector> sigs{healthy};
  for (const auto& [id, sig] : known) sigs.push_back(sig);
  return default_novelty_threshold(sigs);
}
}  // namespace

SignatureLibrary::SignatureLibrary(TraitVector healthy, std::map<int, TraitVector> known, double novelty_threshold)
    : healthy_(std::move(healthy)), known_(std::move(known)), novelty_threshold_(novelty_threshold) {
  if (healthy_.size() == 0) throw ArityError("healthy signature is empty");
  if (!(novelty_threshold_ > 0.0)) throw std::invalid_argument("novelty threshold must be > 0");
  for (const auto& [id, sig] : known_) {
    if (id < 0) throw std::invalid_argument("type ids must be non-negative");
    if (sig.size() != healthy_.size()) throw ArityError(fmt::format("signature of type {} has wrong length", id));
  }
}

SignatureLibrary::SignatureLibrary(TraitVector healthy, std::map<int, TraitVector> known)
    : SignatureLibrary(healthy, known, threshold_for(healthy, known)) {}

const TraitVector* SignatureLibrary::signature(int type_id) const {
  if (auto it = known_.find(type_id); it != known_.end()) return &it->second;
  if (auto it = learned_.find(type_id); it != learned_.end()) return &it->second;
  return nullptr;
}

std::vector<int> SignatureLibrary::type_ids() const {
  std::vector<int> ids;
  for (const auto& [id, sig] : known_) ids.push_back(id);
  for (const auto& [id, sig] : learned_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

int SignatureLibrary::next_type_id() const {
  int next = 0;
  if (!known_.empty()) next = std::max(next, known_.rbegin()->first + 1);
  if (!learned_.empty()) next = std::max(next, learned_.rbegin()->first + 1);
  return next;
}

int SignatureLibrary::learn(const TraitVector& t) {
  if (t.size() != healthy_.size()) throw ArityError("learned signature has wrong length");
  if (t.scale() != TraitScale::Normalized01) throw ScaleError("learned signature must be Normalized01");
  const int id = next_type_id();
  learned_.emplace(id, t);
  return id;
}

Classification classify(const TraitVector& t, const SignatureLibrary& lib, double dual_margin) {
  Classification out;
  for (int id : lib.type_ids()) {
    const double p = cipm(t, lib.healthy(), *lib.signature(id));
    out.cipm_per_type.emplace(id, p);
    out.max_cipm = std::max(out.max_cipm, p);
  }
  // Strictly above 0.5; ascending ids plus strict '>' give the lowest-id tie-break.
  std::optional<int> best;
  for (const auto& [id, p] : out.cipm_per_type) {
    if (p > 0.5 && (!best || p > out.cipm_per_type.at(*best))) best = id;
  }
  if (best) {
    out.outcome = Outcome::Affected;
    out.type_id = best;
    const double top = out.cipm_per_type.at(*best);
    for (const auto& [id, p] : out.cipm_per_type) {
      if (id != *best && p > 0.5 && top - p <= dual_margin) out.co_types.push_back(id);
    }
    return out;
  }
  const double tau = lib.novelty_threshold();
  bool novel = simd::distance(t.values(), lib.healthy().values()) > tau;
  for (int id : lib.type_ids()) {
    if (!novel) break;
    novel = simd::distance(t.values(), lib.signature(id)->values()) > tau;
  }
  out.outcome = novel ? Outcome::Novel : Outcome::Healthy;
  return out;
}

int register_novel(SignatureLibrary& lib, const TraitVector& t) {
  if (classify(t, lib).outcome != Outcome::Novel)
    throw ProtocolViolation("register_novel called for a vector that does not classify as novel");
  return lib.learn(t);
}

Sensor::Sensor(const WorldGrid& grid, double noise_sigma, std::uint64_t seed)
    : grid_(&grid), noise_sigma_(noise_sigma), seed_(seed), measured_(grid.cell_count(), false) {
  if (!(noise_sigma_ >= 0.0)) throw std::invalid_argument("sensor noise must be >= 0");
}

Measurement Sensor::measure(LatticeCoord c, std::uint64_t n) {
  const std::size_t idx = grid_->index_of(c);
  if (measured_[idx])
    throw ProtocolViolation(fmt::format("cell ({}, {}) was already measured in this run", c.theta, c.z));
  measured_[idx] = true;
  const GroundTruth& truth = grid_->cells()[idx];
  Measurement m;
  if (truth.is_obstacle()) m.obstacle = truth.kind;
  if (noise_sigma_ == 0.0) {
    m.traits = TraitVector(truth.true_traits);
    return m;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> noise(0.0, noise_sigma_);
  std::vector<double> raw(truth.true_traits.size());
  for (std::size_t j = 0; j < raw.size(); ++j) raw[j] = truth.true_traits[j] + noise(rng);
  std::vector<double> clamped(raw.size());
  simd::clamp(raw, 0.0, 1.0, clamped);
  m.traits = TraitVector(std::move(clamped));
  return m;
}

}  // namespace lumen
