#pragma once

// Trait measurement, the 1-10 reporting scale, CIPM scoring and
// signature-library classification with novelty registration.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "lumen/world.hpp"

namespace lumen {

enum class TraitScale { Normalized01, Scale1to10 };

class TraitVector {
 public:
  TraitVector() = default;
  /// Throws ScaleError if an entry lies outside the range of `scale`.
  explicit TraitVector(std::vector<double> values, TraitScale scale = TraitScale::Normalized01);

  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] TraitScale scale() const { return scale_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const TraitVector&, const TraitVector&) = default;

 private:
  std::vector<double> values_;
  TraitScale scale_ = TraitScale::Normalized01;
};

/// s = 1 + 9 v. Throws ScaleError unless `t` is Normalized01.
TraitVector to_scale_1_10(const TraitVector& t);
/// Inverse of to_scale_1_10.
TraitVector to_normalized(const TraitVector& t);

/// Arithmetic mean on the vector's own scale. Throws ArityError when empty.
double average_L(const TraitVector& t);

/// Relative-distance infection probability d_h / (d_h + d_a); 0.5 when both
/// distances are zero. Throws ArityError on length mismatch.
double cipm(const TraitVector& t, const TraitVector& healthy, const TraitVector& affected);

/// Half the smallest pairwise distance among the given signatures, floored at
/// 0.1.
double default_novelty_threshold(std::span<const TraitVector> signatures);

class SignatureLibrary {
 public:
  SignatureLibrary(TraitVector healthy, std::map<int, TraitVector> known, double novelty_threshold);
  /// Uses default_novelty_threshold over healthy + known.
  SignatureLibrary(TraitVector healthy, std::map<int, TraitVector> known);

  [[nodiscard]] const TraitVector& healthy() const { return healthy_; }
  [[nodiscard]] const std::map<int, TraitVector>& known() const { return known_; }
  [[nodiscard]] const std::map<int, TraitVector>& learned() const { return learned_; }
  [[nodiscard]] double novelty_threshold() const { return novelty_threshold_; }
  [[nodiscard]] std::size_t trait_count() const { return healthy_.size(); }

  /// Signature for any known or learned id; nullptr if absent.
  [[nodiscard]] const TraitVector* signature(int type_id) const;
  /// Every known and learned type, ascending by id.
  [[nodiscard]] std::vector<int> type_ids() const;
  [[nodiscard]] int next_type_id() const;

  /// Adds `t` as a fresh learned type without a novelty check (used for
  /// obstacles, which are never classified). Returns the new id.
  int learn(const TraitVector& t);

 private:
  TraitVector healthy_;
  std::map<int, TraitVector> known_;
  std::map<int, TraitVector> learned_;
  double novelty_threshold_;
};

enum class Outcome { Healthy, Affected, Novel };

struct Classification {
  Outcome outcome = Outcome::Healthy;
  std::optional<int> type_id;    // set iff Affected
  std::vector<int> co_types;     // further types within the dual-infection margin
  std::map<int, double> cipm_per_type;
  double max_cipm = 0.0;         // largest entry of cipm_per_type (0 when empty)
};

/// Scores `t` against every library type. Affected when some CIPM is strictly
/// above 0.5 (argmax, lowest id on ties); co_types lists the other types above
/// 0.5 within `dual_margin` of the maximum. Otherwise Novel when `t` is farther
/// than the novelty threshold from healthy and from every library signature,
/// else Healthy.
Classification classify(const TraitVector& t, const SignatureLibrary& lib, double dual_margin = 0.0);

/// Registers `t` as a new learned type. Throws ProtocolViolation unless
/// classify(t, lib) is Novel.
int register_novel(SignatureLibrary& lib, const TraitVector& t);

struct Measurement {
  TraitVector traits;
  std::optional<CellKind> obstacle;  // set when the target cell is an obstacle
};

/// The only path by which an agent reads the world: one measurement per cell.
class Sensor {
 public:
  Sensor(const WorldGrid& grid, double noise_sigma, std::uint64_t seed);

  /// True traits plus per-measurement Gaussian noise, clamped to [0,1]. Noise
  /// depends only on (seed, n). Throws ProtocolViolation on re-measurement.
  Measurement measure(LatticeCoord c, std::uint64_t n);

  [[nodiscard]] bool measured(LatticeCoord c) const { return measured_[grid_->index_of(c)]; }
  [[nodiscard]] const WorldGrid& grid() const { return *grid_; }

 private:
  const WorldGrid* grid_;
  double noise_sigma_;
  std::uint64_t seed_;
  std::vector<bool> measured_;
};

}  // namespace lumen
