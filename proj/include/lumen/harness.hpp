#pragma once

// Scenario configs, the AIAM-vs-OAM experiment suite and its CLI.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lumen/agents.hpp"
#include "lumen/errors.hpp"
#include "lumen/serialize.hpp"
#include "lumen/world.hpp"

namespace lumen {

/// Config diagnostics carry the offending key and its line (1-based, 0 when
/// unknown).
struct ConfigError : Error {
  ConfigError(const std::string& message, std::string key, int line);
  std::string key;
  int line;
};

/// Agent parameters shared by AIAM and OAM; signatures come from the world.
struct AgentParams {
  int payload_units = 100000;
  double sensor_noise = 0.0;
  int d_avoid = 5;
  int d_avoid_known = 1;
  int s_skip = 3;
  double obstacle_match_tolerance = 0.05;
  std::optional<double> novelty_threshold;
  double dual_margin = 0.01;
};

struct ScenarioSpec {
  std::string name;
  WorldSpec world;  // world.seed is replaced per repetition
  AgentParams agent;
  int known_entities = 0;    // the first KE infection types are in the agent library
  int unknown_entities = 0;  // the remaining UKE types are withheld
  int repetitions = 1;
  std::uint64_t seed = 0;

  /// Seed of repetition `rep`: base seed + rep.
  [[nodiscard]] std::uint64_t repetition_seed(int rep) const { return seed + static_cast<std::uint64_t>(rep); }
  [[nodiscard]] WorldSpec world_for(int rep) const;
  [[nodiscard]] AgentSpec agent_for(int rep, const std::string& agent_name) const;
};

std::vector<ScenarioSpec> parse_config_text(const std::string& text, const std::string& source_name = "<config>");
/// Throws ConfigError("config not found: ...") when the file is missing.
std::vector<ScenarioSpec> parse_config(const std::filesystem::path& file);

enum class AgentSelection { Aiam, Oam, Both };

struct SuiteOptions {
  std::filesystem::path out_dir = "out";
  AgentSelection agents = AgentSelection::Both;
  Encoding encoding = Encoding::Csv;
  bool emit_plots = false;
  bool include_timing = false;
  int jobs = 1;
};

enum class Winner { Aiam, Oam, Tie };

struct ComparisonRow {
  std::string scenario;
  int known_entities = 0;
  int unknown_entities = 0;
  int repetitions = 0;
  std::optional<double> metric_c;  // OAM mean detection %
  std::optional<double> metric_d;  // AIAM mean detection %
  std::optional<double> oam_mean_steps;
  std::optional<double> aiam_mean_steps;
  std::optional<Winner> metric_b;  // lower mean step count

  /// "Yes" cutoff for the detected columns: mean detection_pct >= 50.
  [[nodiscard]] std::optional<bool> oam_detected() const;
  [[nodiscard]] std::optional<bool> aiam_detected() const;
};

struct RunResult {
  std::string scenario;
  int repetition = 0;
  std::string agent;
  RunMetrics metrics;
};

struct SuiteResult {
  std::vector<ComparisonRow> rows;
  std::vector<RunResult> runs;  // ordered by scenario, repetition, agent
};

/// Runs every scenario and repetition, writing per-run artifacts plus
/// metrics and comparison tables under options.out_dir. Output bytes do not
/// depend on options.jobs. On a failed run the remaining runs finish, their
/// artifacts stay on disk, and the first failure is rethrown.
SuiteResult run_suite(const std::vector<ScenarioSpec>& specs, const SuiteOptions& options);

std::string serialize_comparison(const std::vector<ComparisonRow>& rows, Encoding encoding);

/// Exit codes: 0 success, 1 config or run failure, 2 usage error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lumen
