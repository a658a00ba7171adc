#include <atomic>
#include <exception>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include "lumen/harness.hpp"

namespace lumen {

namespace {

std::string_view winner_name(Winner w) {
  switch (w) {
    case Winner::Aiam: return "AIAM";
    case Winner::Oam: return "OAM";
    case Winner::Tie: return "tie";
  }
  return "tie";
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(fmt::format("failed writing {}", path.string()));
}

struct Job {
  const ScenarioSpec* spec;
  int rep;
};

struct JobOutput {
  std::vector<RunResult> runs;
  std::vector<ScanReport> reports;
  std::exception_ptr error;
};

void write_run_artifacts(const ScanReport& report, const std::filesystem::path& dir, const SuiteOptions& options) {
  const std::string& agent = report.label().agent;
  const bool csv = options.encoding == Encoding::Csv;
  SerializeOptions so{options.encoding, options.include_timing};
  write_file(dir / (agent + (csv ? ".observations.csv" : ".observations.jsonl")),
             serialize(report, ReportFormat::ObservationLog, so));
  write_file(dir / (agent + (csv ? ".curves.csv" : ".curves.json")), serialize(report, ReportFormat::CurvesTable, so));
  write_file(dir / (agent + (csv ? ".metrics.csv" : ".metrics.json")), serialize(report, ReportFormat::MetricsTable, so));
  if (options.emit_plots) {
    for (const auto& [id, curve] : report.cipg())
      write_file(dir / fmt::format("{}.cipg.type{}.svg", agent, id),
                 render_cipg_svg(curve, fmt::format("{} rep {} {}: CIPG type {}", report.label().scenario,
                                                    report.label().repetition, agent, id)));
    write_file(dir / (agent + ".cilg.svg"),
               render_cilg_svg(report.cilg(), fmt::format("{} rep {} {}: CILG", report.label().scenario,
                                                          report.label().repetition, agent)));
  }
}

JobOutput run_job(const Job& job, const SuiteOptions& options) {
  JobOutput out;
  try {
    const ScenarioSpec& spec = *job.spec;
    const WorldGrid grid = generate_world(spec.world_for(job.rep));
    const auto dir = options.out_dir / spec.name / fmt::format("rep{:02}", job.rep);
    auto run_one = [&](const char* name, auto&& runner) {
      AgentRun run = runner(grid, spec.agent_for(job.rep, name));
      RunMetrics m = compute_metrics(run.report, grid, run.state.stats);
      run.report.set_metrics(m);
      write_run_artifacts(run.report, dir, options);
      out.runs.push_back({spec.name, job.rep, name, std::move(m)});
      out.reports.push_back(std::move(run.report));
    };
    // Both agents see the same grid instance.
    if (options.agents != AgentSelection::Oam) run_one("aiam", run_aia);
    if (options.agents != AgentSelection::Aiam) run_one("oam", run_oam);
  } catch (...) {
    out.error = std::current_exception();
  }
  return out;
}

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string opt6(const std::optional<double>& v) { return v ? fixed6(*v) : ""; }
std::string opt6_json(const std::optional<double>& v) { return v ? fixed6(*v) : "null"; }
std::string yes_no(const std::optional<bool>& v) { return v ? (*v ? "Yes" : "No") : ""; }

}  // namespace

std::optional<bool> ComparisonRow::oam_detected() const {
  if (!metric_c) return std::nullopt;
  return *metric_c >= 50.0;
}

std::optional<bool> ComparisonRow::aiam_detected() const {
  if (!metric_d) return std::nullopt;
  return *metric_d >= 50.0;
}

std::string serialize_comparison(const std::vector<ComparisonRow>& rows, Encoding encoding) {
  if (encoding == Encoding::Csv) {
    std::string out =
        "scenario,known_entities,unknown_entities,repetitions,oam_detected,aiam_detected,metric_b_winner,"
        "metric_c_oam_pct,metric_d_aiam_pct,oam_mean_steps,aiam_mean_steps\n";
    for (const auto& r : rows)
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.scenario, r.known_entities, r.unknown_entities,
                         r.repetitions, yes_no(r.oam_detected()), yes_no(r.aiam_detected()),
                         r.metric_b ? winner_name(*r.metric_b) : "", opt6(r.metric_c), opt6(r.metric_d),
                         opt6(r.oam_mean_steps), opt6(r.aiam_mean_steps));
    return out;
  }
  std::string out = "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    auto flag = [](const std::optional<bool>& v) -> std::string { return v ? (*v ? "true" : "false") : "null"; };
    out += fmt::format(
        "{{\"scenario\":\"{}\",\"known_entities\":{},\"unknown_entities\":{},\"repetitions\":{},"
        "\"oam_detected\":{},\"aiam_detected\":{},\"metric_b_winner\":{},\"metric_c_oam_pct\":{},"
        "\"metric_d_aiam_pct\":{},\"oam_mean_steps\":{},\"aiam_mean_steps\":{}}}{}\n",
        r.scenario, r.known_entities, r.unknown_entities, r.repetitions, flag(r.oam_detected()),
        flag(r.aiam_detected()), r.metric_b ? fmt::format("\"{}\"", winner_name(*r.metric_b)) : "null",
        opt6_json(r.metric_c), opt6_json(r.metric_d), opt6_json(r.oam_mean_steps), opt6_json(r.aiam_mean_steps),
        i + 1 < rows.size() ? "," : "");
  }
  return out + "]\n";
}

SuiteResult run_suite(const std::vector<ScenarioSpec>& specs, const SuiteOptions& options) {
  std::vector<Job> jobs;
  for (const auto& spec : specs)
    for (int rep = 0; rep < spec.repetitions; ++rep) jobs.push_back({&spec, rep});

  std::vector<JobOutput> outputs(jobs.size());
  const int workers = std::max(1, std::min<int>(options.jobs, static_cast<int>(jobs.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) outputs[i] = run_job(jobs[i], options);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) outputs[i] = run_job(jobs[i], options);
      });
    }
  }

  SuiteResult result;
  std::vector<const ScanReport*> all_reports;
  std::exception_ptr first_error;
  for (auto& o : outputs) {
    if (o.error && !first_error) first_error = o.error;
    for (auto& r : o.runs) result.runs.push_back(r);
    for (auto& rep : o.reports) all_reports.push_back(&rep);
  }
  const SerializeOptions so{options.encoding, options.include_timing};
  const bool csv = options.encoding == Encoding::Csv;
  write_file(options.out_dir / (csv ? "metrics.csv" : "metrics.json"), serialize_metrics_table(all_reports, so));
  if (first_error) std::rethrow_exception(first_error);

  for (const auto& spec : specs) {
    ComparisonRow row;
    row.scenario = spec.name;
    row.known_entities = spec.known_entities;
    row.unknown_entities = spec.unknown_entities;
    row.repetitions = spec.repetitions;
    std::vector<double> c, d, oam_steps, aiam_steps;
    for (const auto& run : result.runs) {
      if (run.scenario != spec.name) continue;
      auto& pct = run.agent == "aiam" ? d : c;
      auto& steps = run.agent == "aiam" ? aiam_steps : oam_steps;
      pct.push_back(run.metrics.detection_pct);
      steps.push_back(static_cast<double>(run.metrics.stats.step_count));
    }
    row.metric_c = mean_of(c);
    row.metric_d = mean_of(d);
    row.oam_mean_steps = mean_of(oam_steps);
    row.aiam_mean_steps = mean_of(aiam_steps);
    if (row.oam_mean_steps && row.aiam_mean_steps) {
      row.metric_b = *row.aiam_mean_steps < *row.oam_mean_steps   ? Winner::Aiam
                     : *row.oam_mean_steps < *row.aiam_mean_steps ? Winner::Oam
                                                                  : Winner::Tie;
    }
    result.rows.push_back(std::move(row));
  }
  write_file(options.out_dir / (csv ? "comparison.csv" : "comparison.json"),
             serialize_comparison(result.rows, options.encoding));
  return result;
}

}  // namespace lumen
