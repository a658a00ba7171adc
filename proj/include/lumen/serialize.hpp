#pragma once

// Deterministic text encodings of a ScanReport. Reals are printed with six
// fixed decimals; identical reports give identical bytes.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lumen/report.hpp"

namespace lumen {

enum class ReportFormat { ObservationLog, CurvesTable, MetricsTable, Plot };
enum class Encoding { Csv, Json };

/// Accepts "observation-log-lines", "curves-table", "metrics-table",
/// "plot-vector-graphic". Throws UsageError otherwise.
ReportFormat parse_report_format(std::string_view name);
Encoding parse_encoding(std::string_view name);

struct SerializeOptions {
  Encoding encoding = Encoding::Csv;
  // wall_ms varies between runs; artifacts leave it out unless asked.
  bool include_timing = false;
};

/// "%.6f" with negative zero folded to "0.000000".
std::string fixed6(double v);

std::string serialize(const ScanReport& report, ReportFormat format, const SerializeOptions& options = {});

/// One metrics row per report (reports without metrics are skipped).
std::string serialize_metrics_table(std::span<const ScanReport* const> reports, const SerializeOptions& options = {});

/// Single-panel SVG plots.
std::string render_cipg_svg(const CipgCurve& curve, const std::string& title);
std::string render_cilg_svg(const CilgCurves& cilg, const std::string& title);

// Readers for round-trip checks and downstream tooling.

struct ObservationRecord {
  std::uint64_t n = 0;
  int theta = 0;
  int z = 0;
  double x = 0, y = 0, z_cart = 0;
  std::vector<double> traits;  // 1-10 scale
  double avg_L = 0;
  std::optional<int> classified_type;
  std::vector<int> co_types;
  double probability = 0;
  std::map<int, double> cipm_per_type;
  std::string obstacle;   // "", "static" or "pathogen"
  std::string dispensed;  // "none", "dispensed" or "withheld"
};

struct CurveRow {
  std::string curve;
  std::uint64_t n = 0;
  double value = 0;
};

std::vector<ObservationRecord> parse_observation_log(std::string_view text, Encoding encoding);
std::vector<CurveRow> parse_curves_table(std::string_view text, Encoding encoding);

}  // namespace lumen
