#include "lumen/harness.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

using namespace lumen;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(
defaults:
  repetitions: 2
  seed: 11
  world: {theta: 12, z: 16, traits: 7, trait_noise: 0.0}
scenarios:
  - name: tiny
    known_entities: 1
    unknown_entities: 1
    world:
      infection_types:
        - {clusters: 1, radius: [1, 2], repeat: 2}
      obstacles:
        - {kind: static, count: 3}
  - name: plain
    known_entities: 1
    repetitions: 1
    world:
      infection_types:
        - {clusters: 1, radius: 1}
)";

fs::path config_dir() {
  const char* d = std::getenv("LUMEN_CONFIG_DIR");
  return d ? fs::path(d) : fs::path(LUMEN_CONFIG_DIR_DEFAULT);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lumen-harness-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const std::string& text) {
  const fs::path p = scratch("cfg") / "scenarios.cfg";
  std::ofstream(p) << text;
  return p;
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lumen_scan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), dir).generic_string()] = ss.str();
  }
  return files;
}

int count_with_suffix(const fs::path& dir, const std::string& suffix) {
  int n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    n += name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  }
  return n;
}

}  // namespace

TEST(Config, MinimalConfigWithDefaults) {
  const auto specs = parse_config_text(kMinimal);
  ASSERT_EQ(specs.size(), 2u);
  const auto& tiny = specs[0];
  EXPECT_EQ(tiny.name, "tiny");
  EXPECT_EQ(tiny.repetitions, 2);
  EXPECT_EQ(tiny.seed, 11u);
  EXPECT_EQ(tiny.world.theta_size, 12);
  EXPECT_EQ(tiny.world.infection_types.size(), 2u);
  EXPECT_EQ(tiny.world.obstacles.at(0).count, 3);
  EXPECT_EQ(tiny.agent.d_avoid, 5);
  EXPECT_EQ(specs[1].repetitions, 1);
  EXPECT_EQ(specs[1].world.infection_types.at(0).clusters.radius_max, 1);

  EXPECT_EQ(tiny.repetition_seed(1), 12u);
  EXPECT_EQ(tiny.world_for(1).seed, 12u);
  const AgentSpec a = tiny.agent_for(0, "aiam");
  EXPECT_EQ(a.known.size(), 1u);
  EXPECT_TRUE(a.known.contains(0));
}

TEST(Config, EntityCountsMustMatchTypes) {
  const std::string bad = R"(
scenarios:
  - name: x
    known_entities: 1
    unknown_entities: 2
    world:
      infection_types:
        - {clusters: 1, radius: 1, repeat: 2}
)";
  EXPECT_THROW(parse_config_text(bad), ConfigError);
}

TEST(Config, UnknownKeyReportsLine) {
  const std::string bad = "scenarios:\n  - name: x\n    known_entities: 0\n    colour: red\n";
  try {
    parse_config_text(bad);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line, 4);
    EXPECT_NE(e.key.find("colour"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(parse_config_text("scenarios:\n  - name: x\n    known_entities: zero\n"), ConfigError);
  EXPECT_THROW(parse_config_text("scenarios:\n  - {name: a, known_entities: 0}\n  - {name: a, known_entities: 0}\n"),
               ConfigError);
  EXPECT_THROW(parse_config_text("scenarios:\n  - {name: a/b, known_entities: 0}\n"), ConfigError);
  EXPECT_THROW(parse_config_text(""), ConfigError);
  EXPECT_THROW(parse_config("/nonexistent/lumen.cfg"), ConfigError);
}

TEST(Config, ShippedFigure8Config) {
  const auto specs = parse_config(config_dir() / "figure8.cfg");
  std::vector<std::string> names;
  for (const auto& s : specs) names.push_back(s.name);
  EXPECT_EQ(names, (std::vector<std::string>{"1KE", "2KE", "KEgt10", "1UKE", "2UKE", "UKEgt10"}));
  for (const auto& s : specs) {
    EXPECT_EQ(s.world.theta_size, 32);
    EXPECT_EQ(s.world.z_size, 64);
    EXPECT_EQ(s.world.radius, 10.0);
    EXPECT_EQ(s.repetitions, 10);
  }
  EXPECT_EQ(specs[2].known_entities, 12);
  EXPECT_EQ(specs[5].unknown_entities, 12);
}

TEST(Suite, RowsAndArtifacts) {
  const auto specs = parse_config_text(kMinimal);
  SuiteOptions opt;
  opt.out_dir = scratch("suite");
  const SuiteResult r = run_suite(specs, opt);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.runs.size(), 6u);  // (2 + 1) repetitions x 2 agents
  const auto& tiny = r.rows[0];
  EXPECT_EQ(tiny.known_entities, 1);
  EXPECT_EQ(tiny.unknown_entities, 1);
  ASSERT_TRUE(tiny.metric_c && tiny.metric_d && tiny.metric_b);
  EXPECT_GE(*tiny.metric_d, *tiny.metric_c);
  EXPECT_EQ(*tiny.metric_d, 100.0);
  EXPECT_TRUE(fs::exists(opt.out_dir / "metrics.csv"));
  EXPECT_TRUE(fs::exists(opt.out_dir / "comparison.csv"));
  EXPECT_TRUE(fs::exists(opt.out_dir / "tiny" / "rep01" / "aiam.observations.csv"));
  EXPECT_TRUE(fs::exists(opt.out_dir / "plain" / "rep00" / "oam.curves.csv"));
  EXPECT_EQ(count_with_suffix(opt.out_dir, ".svg"), 0);
}

TEST(Suite, OneAgentLeavesOtherColumnsEmpty) {
  SuiteOptions opt;
  opt.out_dir = scratch("single");
  opt.agents = AgentSelection::Aiam;
  const SuiteResult r = run_suite(parse_config_text(kMinimal), opt);
  EXPECT_TRUE(r.rows[0].metric_d);
  EXPECT_FALSE(r.rows[0].metric_c);
  EXPECT_FALSE(r.rows[0].metric_b);
  EXPECT_FALSE(fs::exists(opt.out_dir / "tiny" / "rep00" / "oam.observations.csv"));
}

TEST(Suite, ParallelRunsAreByteIdentical) {
  const auto specs = parse_config_text(kMinimal);
  std::map<std::string, std::string> snaps[3];
  const int jobs[3] = {1, 3, 3};
  for (int i = 0; i < 3; ++i) {
    SuiteOptions opt;
    opt.out_dir = scratch("det" + std::to_string(i));
    opt.emit_plots = true;
    opt.jobs = jobs[i];
    run_suite(specs, opt);
    snaps[i] = snapshot(opt.out_dir);
  }
  EXPECT_FALSE(snaps[0].empty());
  EXPECT_EQ(snaps[0], snaps[1]);
  EXPECT_EQ(snaps[1], snaps[2]);
}

TEST(Cli, ListScenarios) {
  const auto r = cli({"--config", (config_dir() / "figure8.cfg").string(), "--list-scenarios"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1KE\n2KE\nKEgt10\n1UKE\n2UKE\nUKEgt10\n");
}

TEST(Cli, ExitCodes) {
  const auto missing = cli({"--config", "/nonexistent/x.cfg"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("config not found"), std::string::npos);

  EXPECT_EQ(cli({"--config", write_config(kMinimal).string(), "--bogus"}).code, 2);
  EXPECT_EQ(cli({"--config", write_config(kMinimal).string(), "--scenario", "nope"}).code, 2);
  EXPECT_EQ(cli({"--config", write_config(kMinimal).string(), "--format", "xml"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
}

TEST(Cli, SingleScenarioWithPlots) {
  const fs::path out = scratch("cli");
  const auto r = cli({"--config", write_config(kMinimal).string(), "--out", out.string(), "--scenario", "tiny",
                      "--emit-plots", "--jobs", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 2u);  // header + tiny
  EXPECT_EQ(rows[1].rfind("tiny,1,1,2,", 0), 0u);
  EXPECT_FALSE(fs::exists(out / "plain"));
  // One CILG plot per run; CIPG plots per curve.
  EXPECT_EQ(count_with_suffix(out, ".cilg.svg"), 4);
  EXPECT_GE(count_with_suffix(out, ".svg"), 4 + 4);
}

TEST(Cli, SeedOverrideChangesWorlds) {
  const fs::path a = scratch("seedA"), b = scratch("seedB");
  const auto cfg = write_config(kMinimal).string();
  ASSERT_EQ(cli({"--config", cfg, "--out", a.string(), "--scenario", "tiny"}).code, 0);
  ASSERT_EQ(cli({"--config", cfg, "--out", b.string(), "--scenario", "tiny", "--seed", "99"}).code, 0);
  EXPECT_NE(snapshot(a), snapshot(b));
}

TEST(Cli, BinaryExitStatus) {
  const char* env = std::getenv("LUMEN_SCAN_BIN");
  const std::string bin = env ? env : LUMEN_SCAN_BIN_DEFAULT;
  const std::string quiet = " >/dev/null 2>&1";
  auto status = [&](const std::string& args) {
    const int rc = std::system((bin + " " + args + quiet).c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  EXPECT_EQ(status("--config " + (config_dir() / "figure8.cfg").string() + " --list-scenarios"), 0);
  EXPECT_EQ(status("--config /nonexistent/x.cfg"), 1);
  EXPECT_EQ(status("--no-such-flag"), 2);
}
