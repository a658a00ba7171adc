#include <cstdlib>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lumen/harness.hpp"

namespace lumen {

namespace {
constexpr const char* kOutDirEnv = "LUMEN_OUT_DIR";
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spiral-search lumen scanner: runs AIAM and OAM experiment scenarios", "lumen_scan"};
  std::string config_path;
  std::string out_dir = std::getenv(kOutDirEnv) ? std::getenv(kOutDirEnv) : "out";
  std::optional<std::uint64_t> seed;
  std::string agent = "both";
  std::string format = "csv";
  bool emit_plots = false;
  bool list_scenarios = false;
  bool timing = false;
  int jobs = 1;
  std::vector<std::string> scenario_filter;

  app.add_option("--config", config_path, "Scenario config file (YAML)")->required();
  app.add_option("--out", out_dir, fmt::format("Artifact directory (default ${} or ./out)", kOutDirEnv));
  app.add_option("--seed", seed, "Base seed; overrides every scenario's seed");
  app.add_option("--agent", agent, "Agents to run")->check(CLI::IsMember({"aiam", "oam", "both"}));
  app.add_option("--format", format, "Artifact and table encoding")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--emit-plots", emit_plots, "Write SVG CIPG/CILG plots per run");
  app.add_flag("--list-scenarios", list_scenarios, "Print scenario names and exit");
  app.add_option("--scenario", scenario_filter, "Run only the named scenario(s)");
  app.add_option("--jobs", jobs, "Parallel scenario/repetition workers")->check(CLI::PositiveNumber);
  app.add_flag("--timing", timing, "Include wall-clock columns in metrics tables (not byte-stable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  std::vector<ScenarioSpec> specs;
  try {
    specs = parse_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }

  if (list_scenarios) {
    for (const auto& s : specs) out << s.name << "\n";
    return 0;
  }

  if (!scenario_filter.empty()) {
    std::vector<ScenarioSpec> kept;
    for (const auto& name : scenario_filter) {
      auto it = std::find_if(specs.begin(), specs.end(), [&](const ScenarioSpec& s) { return s.name == name; });
      if (it == specs.end()) {
        err << "error: no scenario named '" << name << "' in " << config_path << "\n";
        return 2;
      }
      kept.push_back(*it);
    }
    specs = std::move(kept);
  }
  if (seed)
    for (auto& s : specs) s.seed = *seed;

  SuiteOptions options;
  options.out_dir = out_dir;
  options.agents = agent == "aiam" ? AgentSelection::Aiam : agent == "oam" ? AgentSelection::Oam : AgentSelection::Both;
  options.encoding = parse_encoding(format);
  options.emit_plots = emit_plots;
  options.include_timing = timing;
  options.jobs = jobs;

  try {
    const SuiteResult result = run_suite(specs, options);
    out << serialize_comparison(result.rows, options.encoding);
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace lumen
