#include "lumen/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "lumen/errors.hpp"

namespace lumen {

namespace {

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

std::string_view kind_name(const std::optional<CellKind>& k) {
  if (!k) return "";
  return *k == CellKind::Pathogen ? "pathogen" : "static";
}

std::string_view dispense_name(DispenseState d) {
  switch (d) {
    case DispenseState::None: return "none";
    case DispenseState::Dispensed: return "dispensed";
    case DispenseState::Withheld: return "withheld";
  }
  return "none";
}

template <class Range, class Fn>
std::string join(const Range& r, std::string_view sep, Fn&& fn) {
  std::string out;
  bool first = true;
  for (const auto& item : r) {
    if (!first) out += sep;
    first = false;
    out += fn(item);
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n'))
    if (!line.empty()) out.push_back(line);
  return out;
}

double to_double(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw std::invalid_argument(fmt::format("bad number '{}'", s));
  return v;
}

template <class Int>
Int to_int(std::string_view s) {
  Int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw std::invalid_argument(fmt::format("bad integer '{}'", s));
  return v;
}

std::vector<double> levels_of(const CellObservation& obs) { 
  const TraitVector t = to_scale_1_10(obs.traits);
  return {t.values().begin(), t.values().end()};
}

// ---- observation log ----

constexpr std::string_view kObsHeader =
    "n,theta,z,x,y,z_cart,traits,avg_L,classified_type,co_types,p,cipm_per_type,obstacle,dispensed\n";

std::string obs_csv(const CellObservation& o) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", o.n, o.coord.theta, o.coord.z, fixed6(o.point.x),
                     fixed6(o.point.y), fixed6(o.point.z), join(levels_of(o), ";", fixed6), fixed6(o.avg_L),
                     o.classified_type ? std::to_string(*o.classified_type) : "",
                     join(o.co_types, ";", [](int id) { return std::to_string(id); }), fixed6(o.probability),
                     join(o.cipm_per_type, ";", [](const auto& kv) { return fmt::format("{}:{}", kv.first, fixed6(kv.second)); }),
                     kind_name(o.obstacle), dispense_name(o.dispensed));
}

std::string obs_json(const CellObservation& o) {
  return fmt::format(
      "{{\"n\":{},\"theta\":{},\"z\":{},\"x\":{},\"y\":{},\"z_cart\":{},\"traits\":[{}],\"avg_L\":{},"
      "\"classified_type\":{},\"co_types\":[{}],\"p\":{},\"cipm_per_type\":{{{}}},\"obstacle\":{},\"dispensed\":\"{}\"}}\n",
      o.n, o.coord.theta, o.coord.z, fixed6(o.point.x), fixed6(o.point.y), fixed6(o.point.z),
      join(levels_of(o), ",", fixed6), fixed6(o.avg_L),
      o.classified_type ? std::to_string(*o.classified_type) : "null",
      join(o.co_types, ",", [](int id) { return std::to_string(id); }), fixed6(o.probability),
      join(o.cipm_per_type, ",", [](const auto& kv) { return fmt::format("\"{}\":{}", kv.first, fixed6(kv.second)); }),
      o.obstacle ? quote(std::string(kind_name(o.obstacle))) : "null", dispense_name(o.dispensed));
}

// ---- curves ----

struct NamedCurve {
  std::string name;
  const std::vector<CurvePoint>* points;
};

std::vector<NamedCurve> all_curves(const ScanReport& r) {
  std::vector<NamedCurve> out;
  for (const auto& [id, curve] : r.cipg()) out.push_back({fmt::format("cipg:{}", id), &curve.points});
  for (std::size_t m = 0; m < r.cilg().per_trait.size(); ++m)
    out.push_back({fmt::format("cilg:L{}", m + 1), &r.cilg().per_trait[m]});
  out.push_back({"cilg:avg", &r.cilg().average});
  return out;
}

std::string curves_table(const ScanReport& r, Encoding enc) {
  std::string out;
  if (enc == Encoding::Csv) {
    out = "curve,n,value\n";
    for (const auto& c : all_curves(r))
      for (const auto& p : *c.points) out += fmt::format("{},{},{}\n", c.name, p.n, fixed6(p.value));
    return out;
  }
  std::vector<std::string> rows;
  for (const auto& c : all_curves(r))
    for (const auto& p : *c.points)
      rows.push_back(fmt::format("{{\"curve\":\"{}\",\"n\":{},\"value\":{}}}", c.name, p.n, fixed6(p.value)));
  if (rows.empty()) return "[]\n";
  return "[\n" + join(rows, ",\n", [](const std::string& s) { return s; }) + "\n]\n";
}

// ---- metrics ----

std::string metrics_header(const SerializeOptions& opt) {
  std::string h =
      "scenario,repetition,agent,observed_cells,affected_truth_count,detected_count,detection_pct,vacuous,"
      "false_positives,step_count,avoidance_steps,obstacle_encounters,learned_types,dispensed,withheld,per_type";
  if (opt.include_timing) h += ",wall_ms";
  return h + "\n";
}

std::string metrics_csv(const RunLabel& l, const RunMetrics& m, const SerializeOptions& opt) {
  std::string row = fmt::format(
      "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", l.scenario, l.repetition, l.agent, m.observed_cells,
      m.affected_truth_count, m.detected_count, fixed6(m.detection_pct), m.vacuous ? "true" : "false",
      m.false_positives, m.stats.step_count, m.stats.avoidance_steps, m.stats.obstacle_encounters,
      m.stats.learned_types, m.stats.dispensed, m.stats.withheld,
      join(m.per_type, ";", [](const auto& kv) { return fmt::format("{}:{}/{}", kv.first, kv.second.detected, kv.second.truth); }));
  if (opt.include_timing) row += "," + fixed6(m.stats.wall_ms);
  return row + "\n";
}

std::string metrics_json(const RunLabel& l, const RunMetrics& m, const SerializeOptions& opt) {
  std::string row = fmt::format(
      "{{\"scenario\":{},\"repetition\":{},\"agent\":{},\"observed_cells\":{},\"affected_truth_count\":{},"
      "\"detected_count\":{},\"detection_pct\":{},\"vacuous\":{},\"false_positives\":{},\"step_count\":{},"
      "\"avoidance_steps\":{},\"obstacle_encounters\":{},\"learned_types\":{},\"dispensed\":{},\"withheld\":{},"
      "\"per_type\":{{{}}}",
      quote(l.scenario), l.repetition, quote(l.agent), m.observed_cells, m.affected_truth_count, m.detected_count,
      fixed6(m.detection_pct), m.vacuous ? "true" : "false", m.false_positives, m.stats.step_count,
      m.stats.avoidance_steps, m.stats.obstacle_encounters, m.stats.learned_types, m.stats.dispensed,
      m.stats.withheld,
      join(m.per_type, ",", [](const auto& kv) {
        return fmt::format("\"{}\":{{\"truth\":{},\"detected\":{}}}", kv.first, kv.second.truth, kv.second.detected);
      }));
  if (opt.include_timing) row += ",\"wall_ms\":" + fixed6(m.stats.wall_ms);
  return row + "}";
}

// ---- SVG ----

constexpr double kPanelW = 640, kPanelH = 240, kLeft = 56, kRight = 16, kTop = 28, kBottom = 36;
constexpr std::string_view kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fixed2(double v) {
  std::string s = fmt::format("{:.2f}", v);
  return s == "-0.00" ? "0.00" : s;
}

struct Series {
  const std::vector<CurvePoint>* points;
  std::string_view color;
  double width;
};

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// Panel with x = scan index n, y in [y_lo, y_hi].
std::string panel(double y_offset, const std::string& title, const std::string& y_label, double y_lo, double y_hi,
                  const std::vector<Series>& series) {
  std::uint64_t max_n = 1;
  for (const auto& s : series)
    if (!s.points->empty()) max_n = std::max(max_n, s.points->back().n);
  const double plot_w = kPanelW - kLeft - kRight, plot_h = kPanelH - kTop - kBottom;
  auto px = [&](double n) { return kLeft + plot_w * n / static_cast<double>(max_n); };
  auto py = [&](double v) { return y_offset + kTop + plot_h * (1.0 - (v - y_lo) / (y_hi - y_lo)); };

  std::string out = fmt::format("<g>\n<text x=\"{}\" y=\"{}\" font-size=\"13\">{}</text>\n", fixed2(kLeft),
                                fixed2(y_offset + 18), svg_escape(title));
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000\"/>\n",
                     fixed2(kLeft), fixed2(y_offset + kTop), fixed2(plot_w), fixed2(plot_h));
  for (int k = 0; k <= 4; ++k) {
    const double v = y_lo + (y_hi - y_lo) * k / 4.0;
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n", fixed2(kLeft - 4),
                       fixed2(py(v) + 3), fixed2(v));
  }
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\">0</text>\n", fixed2(kLeft), fixed2(y_offset + kPanelH - 20));
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
                     fixed2(kPanelW - kRight), fixed2(y_offset + kPanelH - 20), max_n);
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">cell point index n</text>\n",
                     fixed2(kLeft + plot_w / 2), fixed2(y_offset + kPanelH - 8));
  out += fmt::format("<text x=\"12\" y=\"{}\" font-size=\"11\" transform=\"rotate(-90 12 {})\" text-anchor=\"middle\">{}</text>\n",
                     fixed2(py((y_lo + y_hi) / 2)), fixed2(py((y_lo + y_hi) / 2)), y_label);
  for (const auto& s : series) {
    if (s.points->empty()) continue;
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" points=\"", s.color, fixed2(s.width));
    out += join(*s.points, " ", [&](const CurvePoint& p) {
      return fixed2(px(static_cast<double>(p.n))) + "," + fixed2(py(p.value));
    });
    out += "\"/>\n";
  }
  return out + "</g>\n";
}

std::string svg_document(double panels, const std::string& body) {
  return fmt::format(
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
             fixed2(kPanelW), fixed2(kPanelH * panels), fixed2(kPanelW), fixed2(kPanelH * panels)) +
         "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n" + body + "</svg>\n";
}

std::string cipg_panel(double y_offset, const CipgCurve& curve, const std::string& title) {
  return panel(y_offset, title, "CIPM P(n)", 0.0, 1.0, {{&curve.points, kPalette[0], 1.0}});
}

std::string cilg_panel(double y_offset, const CilgCurves& cilg, const std::string& title) {
  std::vector<Series> series;
  for (std::size_t m = 0; m < cilg.per_trait.size(); ++m)
    series.push_back({&cilg.per_trait[m], kPalette[(m + 1) % std::size(kPalette)], 0.6});
  series.push_back({&cilg.average, "#000", 1.4});
  return panel(y_offset, title, "level L (1-10)", 1.0, 10.0, series);
}

}  // namespace

std::string fixed6(double v) {
  std::string s = fmt::format("{:.6f}", v);
  return s == "-0.000000" ? "0.000000" : s;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "observation-log-lines") return ReportFormat::ObservationLog;
  if (name == "curves-table") return ReportFormat::CurvesTable;
  if (name == "metrics-table") return ReportFormat::MetricsTable;
  if (name == "plot-vector-graphic") return ReportFormat::Plot;
  throw UsageError(fmt::format("unknown report format '{}'", name));
}

Encoding parse_encoding(std::string_view name) {
  if (name == "csv") return Encoding::Csv;
  if (name == "json") return Encoding::Json;
  throw UsageError(fmt::format("unknown encoding '{}'", name));
}

std::string serialize(const ScanReport& report, ReportFormat format, const SerializeOptions& options) {
  switch (format) {
    case ReportFormat::ObservationLog: {
      std::string out = options.encoding == Encoding::Csv ? std::string(kObsHeader) : std::string();
      for (const auto& o : report.observations()) out += options.encoding == Encoding::Csv ? obs_csv(o) : obs_json(o);
      return out;
    }
    case ReportFormat::CurvesTable: return curves_table(report, options.encoding);
    case ReportFormat::MetricsTable: {
      const ScanReport* one[] = {&report};
      return serialize_metrics_table(one, options);
    }
    case ReportFormat::Plot: {
      std::string body;
      double y = 0;
      for (const auto& [id, curve] : report.cipg()) {
        body += cipg_panel(y, curve, fmt::format("CIPG type {}", id));
        y += kPanelH;
      }
      body += cilg_panel(y, report.cilg(), "CILG");
      return svg_document(static_cast<double>(report.cipg().size() + 1), body);
    }
  }
  throw UsageError("unknown report format");
}

std::string serialize_metrics_table(std::span<const ScanReport* const> reports, const SerializeOptions& options) {
  if (options.encoding == Encoding::Csv) {
    std::string out = metrics_header(options);
    for (const auto* r : reports)
      if (r->metrics()) out += metrics_csv(r->label(), *r->metrics(), options);
    return out;
  }
  std::vector<std::string> rows;
  for (const auto* r : reports)
    if (r->metrics()) rows.push_back(metrics_json(r->label(), *r->metrics(), options));
  if (rows.empty()) return "[]\n";
  return "[\n" + join(rows, ",\n", [](const std::string& s) { return s; }) + "\n]\n";
}

std::string render_cipg_svg(const CipgCurve& curve, const std::string& title) {
  return svg_document(1, cipg_panel(0, curve, title));
}

std::string render_cilg_svg(const CilgCurves& cilg, const std::string& title) {
  return svg_document(1, cilg_panel(0, cilg, title));
}

std::vector<ObservationRecord> parse_observation_log(std::string_view text, Encoding encoding) {
  std::vector<ObservationRecord> out;
  auto rows = lines(text);
  if (encoding == Encoding::Csv) {
    if (rows.empty() || std::string(rows.front()) + "\n" != kObsHeader)
      throw std::invalid_argument("observation log: missing or unexpected header");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      auto f = split(rows[i], ',');
      if (f.size() != 14) throw std::invalid_argument(fmt::format("observation log line {}: {} fields", i + 1, f.size()));
      ObservationRecord r;
      r.n = to_int<std::uint64_t>(f[0]);
      r.theta = to_int<int>(f[1]);
      r.z = to_int<int>(f[2]);
      r.x = to_double(f[3]);
      r.y = to_double(f[4]);
      r.z_cart = to_double(f[5]);
      if (!f[6].empty())
        for (auto v : split(f[6], ';')) r.traits.push_back(to_double(v));
      r.avg_L = to_double(f[7]);
      if (!f[8].empty()) r.classified_type = to_int<int>(f[8]);
      if (!f[9].empty())
        for (auto v : split(f[9], ';')) r.co_types.push_back(to_int<int>(v));
      r.probability = to_double(f[10]);
      if (!f[11].empty()) {
        for (auto kv : split(f[11], ';')) {
          const auto colon = kv.find(':');
          r.cipm_per_type.emplace(to_int<int>(kv.substr(0, colon)), to_double(kv.substr(colon + 1)));
        }
      }
      r.obstacle = std::string(f[12]);
      r.dispensed = std::string(f[13]);
      out.push_back(std::move(r));
    }
    return out;
  }
  for (auto line : rows) {
    const auto j = nlohmann::json::parse(line);
    ObservationRecord r;
    r.n = j.at("n").get<std::uint64_t>();
    r.theta = j.at("theta").get<int>();
    r.z = j.at("z").get<int>();
    r.x = j.at("x").get<double>();
    r.y = j.at("y").get<double>();
    r.z_cart = j.at("z_cart").get<double>();
    r.traits = j.at("traits").get<std::vector<double>>();
    r.avg_L = j.at("avg_L").get<double>();
    if (!j.at("classified_type").is_null()) r.classified_type = j.at("classified_type").get<int>();
    r.co_types = j.at("co_types").get<std::vector<int>>();
    r.probability = j.at("p").get<double>();
    for (const auto& [k, v] : j.at("cipm_per_type").items()) r.cipm_per_type.emplace(std::stoi(k), v.get<double>());
    if (!j.at("obstacle").is_null()) r.obstacle = j.at("obstacle").get<std::string>();
    r.dispensed = j.at("dispensed").get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CurveRow> parse_curves_table(std::string_view text, Encoding encoding) {
  std::vector<CurveRow> out;
  if (encoding == Encoding::Csv) {
    auto rows = lines(text);
    if (rows.empty() || rows.front() != "curve,n,value") throw std::invalid_argument("curves table: bad header");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      auto f = split(rows[i], ',');
      if (f.size() != 3) throw std::invalid_argument(fmt::format("curves table line {}: {} fields", i + 1, f.size()));
      out.push_back({std::string(f[0]), to_int<std::uint64_t>(f[1]), to_double(f[2])});
    }
    return out;
  }
  for (const auto& row : nlohmann::json::parse(text))
    out.push_back({row.at("curve").get<std::string>(), row.at("n").get<std::uint64_t>(), row.at("value").get<double>()});
  return out;
}

}  // namespace lumen
