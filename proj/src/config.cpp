#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "lumen/harness.hpp"

namespace lumen {

ConfigError::ConfigError(const std::string& message, std::string key_, int line_)
    : Error(line_ > 0 ? fmt::format("line {}: {}: {}", line_, key_, message)
                      : (key_.empty() ? message : fmt::format("{}: {}", key_, message))),
      key(std::move(key_)),
      line(line_) {}

namespace {

int line_of(const YAML::Node& n) {
  try {
    const auto mark = n.Mark();
    return mark.line >= 0 ? mark.line + 1 : 0;
  } catch (const YAML::Exception&) {
    return 0;  // key absent: no position to report
  }
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& key, const std::string& message) {
  throw ConfigError(message, key, line_of(n));
}

void require_map(const YAML::Node& n, const std::string& key) {
  if (!n.IsMap()) fail(n, key, "expected a mapping");
}

void reject_unknown(const YAML::Node& n, const std::string& path, const std::set<std::string>& allowed) {
  require_map(n, path);
  for (const auto& kv : n) {
    const auto name = kv.first.as<std::string>();
    if (!allowed.contains(name)) fail(kv.first, path.empty() ? name : path + "." + name, "unknown key");
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) fail(n, key, "expected a scalar value");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, key, fmt::format("cannot read '{}' as a {}", n.Scalar(), std::is_same_v<T, double> ? "number" : "value"));
  }
}

std::vector<double> vector_of(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) fail(n, key, "expected a list of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < n.size(); ++i) v.push_back(scalar<double>(n[i], fmt::format("{}[{}]", key, i)));
  return v;
}

// Scenario value overrides defaults value, per key.
YAML::Node pick(const YAML::Node& scenario, const YAML::Node& defaults, const std::string& key) {
  if (scenario && scenario.IsMap() && scenario[key]) return scenario[key];
  if (defaults && defaults.IsMap() && defaults[key]) return defaults[key];
  return YAML::Node(YAML::NodeType::Undefined);
}

const std::set<std::string> kScenarioKeys{"name",        "known_entities", "unknown_entities", "repetitions",
                                          "seed",        "world",          "agent"};
const std::set<std::string> kDefaultsKeys{"repetitions", "seed", "world", "agent"};
const std::set<std::string> kWorldKeys{"theta",     "z",        "radius",    "traits", "trait_noise",
                                       "healthy_signature", "infection_types", "obstacles"};
const std::set<std::string> kTypeKeys{"clusters", "radius", "signature", "repeat"};
const std::set<std::string> kObstacleKeys{"kind", "count", "signature"};
const std::set<std::string> kAgentKeys{"payload",     "sensor_noise",       "d_avoid",      "d_avoid_known",
                                       "s_skip",      "obstacle_tolerance", "novelty_threshold", "dual_margin"};

WorldSpec parse_world(const YAML::Node& sw, const YAML::Node& dw, const std::string& prefix) {
  if (sw) reject_unknown(sw, prefix + "world", kWorldKeys);
  if (dw) reject_unknown(dw, "defaults.world", kWorldKeys);
  WorldSpec w;
  auto get = [&](const std::string& key) { return pick(sw, dw, key); };
  const std::string at = prefix + "world.";
  if (auto n = get("theta")) w.theta_size = scalar<int>(n, at + "theta");
  if (auto n = get("z")) w.z_size = scalar<int>(n, at + "z");
  if (auto n = get("radius")) w.radius = scalar<double>(n, at + "radius");
  if (auto n = get("traits")) w.trait_count = scalar<int>(n, at + "traits");
  if (auto n = get("trait_noise")) w.trait_noise = scalar<double>(n, at + "trait_noise");
  if (w.theta_size < 4) fail(get("theta"), at + "theta", "must be >= 4");
  if (w.z_size < 4) fail(get("z"), at + "z", "must be >= 4");
  if (w.trait_count < 1) fail(get("traits"), at + "traits", "must be >= 1");
  if (!(w.radius > 0)) fail(get("radius"), at + "radius", "must be > 0");

  auto builtin = [&](const YAML::Node& where, const std::string& key, auto&& make) {
    try {
      return make();
    } catch (const std::invalid_argument& e) {
      fail(where, key, std::string("no signature given and ") + e.what());
    }
  };

  if (auto n = get("healthy_signature")) {
    w.healthy_signature = vector_of(n, at + "healthy_signature");
  } else {
    w.healthy_signature = builtin(sw, at + "healthy_signature", [&] { return default_healthy_signature(w.trait_count); });
  }

  if (auto types = get("infection_types")) {
    if (!types.IsSequence()) fail(types, at + "infection_types", "expected a list");
    for (std::size_t i = 0; i < types.size(); ++i) {
      const auto& t = types[i];
      const std::string key = fmt::format("{}infection_types[{}]", at, i);
      reject_unknown(t, key, kTypeKeys);
      ClusterSpec cs;
      if (t["clusters"]) cs.count = scalar<int>(t["clusters"], key + ".clusters");
      if (auto r = t["radius"]) {
        if (r.IsSequence()) {
          if (r.size() != 2) fail(r, key + ".radius", "expected [min, max]");
          cs.radius_min = scalar<int>(r[0], key + ".radius[0]");
          cs.radius_max = scalar<int>(r[1], key + ".radius[1]");
        } else {
          cs.radius_min = cs.radius_max = scalar<int>(r, key + ".radius");
        }
      }
      const int repeat = t["repeat"] ? scalar<int>(t["repeat"], key + ".repeat") : 1;
      if (repeat < 1) fail(t["repeat"], key + ".repeat", "must be >= 1");
      if (t["signature"] && repeat > 1) fail(t["signature"], key + ".signature", "cannot be combined with repeat > 1");
      for (int k = 0; k < repeat; ++k) {
        InfectionTypeSpec spec;
        spec.clusters = cs;
        const int id = static_cast<int>(w.infection_types.size());
        spec.signature = t["signature"] ? vector_of(t["signature"], key + ".signature")
                                        : builtin(t, key + ".signature",
                                                  [&] { return default_infection_signature(id, w.trait_count); });
        w.infection_types.push_back(std::move(spec));
      }
    }
  }

  if (auto obs = get("obstacles")) {
    if (!obs.IsSequence()) fail(obs, at + "obstacles", "expected a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const auto& o = obs[i];
      const std::string key = fmt::format("{}obstacles[{}]", at, i);
      reject_unknown(o, key, kObstacleKeys);
      ObstacleSpec spec;
      const std::string kind = o["kind"] ? scalar<std::string>(o["kind"], key + ".kind") : "static";
      if (kind == "static") {
        spec.kind = CellKind::StaticObstacle;
      } else if (kind == "pathogen") {
        spec.kind = CellKind::Pathogen;
      } else {
        fail(o["kind"], key + ".kind", "must be 'static' or 'pathogen'");
      }
      if (o["count"]) spec.count = scalar<int>(o["count"], key + ".count");
      spec.signature = o["signature"] ? vector_of(o["signature"], key + ".signature")
                                      : builtin(o, key + ".signature",
                                                [&] { return default_obstacle_signature(spec.kind, w.trait_count); });
      w.obstacles.push_back(std::move(spec));
    }
  }

  try {
    w.validate();
  } catch (const std::invalid_argument& e) {
    fail(sw ? sw : dw, prefix + "world", e.what());
  }
  return w;
}

AgentParams parse_agent(const YAML::Node& sa, const YAML::Node& da, const std::string& prefix) {
  if (sa) reject_unknown(sa, prefix + "agent", kAgentKeys);
  if (da) reject_unknown(da, "defaults.agent", kAgentKeys);
  AgentParams a;
  const std::string at = prefix + "agent.";
  auto get = [&](const std::string& key) { return pick(sa, da, key); };
  if (auto n = get("payload")) a.payload_units = scalar<int>(n, at + "payload");
  if (auto n = get("sensor_noise")) a.sensor_noise = scalar<double>(n, at + "sensor_noise");
  if (auto n = get("d_avoid")) a.d_avoid = scalar<int>(n, at + "d_avoid");
  if (auto n = get("d_avoid_known")) a.d_avoid_known = scalar<int>(n, at + "d_avoid_known");
  if (auto n = get("s_skip")) a.s_skip = scalar<int>(n, at + "s_skip");
  if (auto n = get("obstacle_tolerance")) a.obstacle_match_tolerance = scalar<double>(n, at + "obstacle_tolerance");
  if (auto n = get("novelty_threshold")) a.novelty_threshold = scalar<double>(n, at + "novelty_threshold");
  if (auto n = get("dual_margin")) a.dual_margin = scalar<double>(n, at + "dual_margin");
  if (a.payload_units < 0) fail(get("payload"), at + "payload", "must be >= 0");
  if (a.sensor_noise < 0) fail(get("sensor_noise"), at + "sensor_noise", "must be >= 0");
  if (a.d_avoid < 0) fail(get("d_avoid"), at + "d_avoid", "must be >= 0");
  if (a.d_avoid_known < 0) fail(get("d_avoid_known"), at + "d_avoid_known", "must be >= 0");
  if (a.s_skip < 0) fail(get("s_skip"), at + "s_skip", "must be >= 0");
  if (!(a.obstacle_match_tolerance > 0))
    fail(get("obstacle_tolerance"), at + "obstacle_tolerance", "must be > 0");
  if (a.novelty_threshold && !(*a.novelty_threshold > 0))
    fail(get("novelty_threshold"), at + "novelty_threshold", "must be > 0");
  if (a.dual_margin < 0) fail(get("dual_margin"), at + "dual_margin", "must be >= 0");
  return a;
}

}  // namespace

WorldSpec ScenarioSpec::world_for(int rep) const {
  WorldSpec w = world;
  w.seed = repetition_seed(rep);
  return w;
}

AgentSpec ScenarioSpec::agent_for(int rep, const std::string& agent_name) const {
  AgentSpec a;
  a.healthy = TraitVector(world.healthy_signature);
  for (int k = 0; k < known_entities; ++k) a.known.emplace(k, TraitVector(world.infection_types[k].signature));
  a.novelty_threshold = agent.novelty_threshold;
  a.dual_margin = agent.dual_margin;
  a.payload_units = agent.payload_units;
  a.sensor_noise = agent.sensor_noise;
  a.seed = repetition_seed(rep);
  a.d_avoid = agent.d_avoid;
  a.d_avoid_known = agent.d_avoid_known;
  a.s_skip = agent.s_skip;
  a.obstacle_match_tolerance = agent.obstacle_match_tolerance;
  a.label = {name, rep, agent_name};
  return a;
}

std::vector<ScenarioSpec> parse_config_text(const std::string& text, const std::string& source_name) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("{}: {}", source_name, e.msg), "", e.mark.line + 1);
  }
  if (!root || root.IsNull()) throw ConfigError("config is empty", "", 0);
  reject_unknown(root, "", {"defaults", "scenarios"});
  const YAML::Node defaults = root["defaults"];
  if (defaults) reject_unknown(defaults, "defaults", kDefaultsKeys);
  const YAML::Node scenarios = root["scenarios"];
  if (!scenarios) throw ConfigError("missing required key", "scenarios", 0);
  if (!scenarios.IsSequence() || scenarios.size() == 0) fail(scenarios, "scenarios", "expected a non-empty list");

  std::vector<ScenarioSpec> out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const YAML::Node& s = scenarios[i];
    const std::string base = fmt::format("scenarios[{}]", i);
    reject_unknown(s, base, kScenarioKeys);
    ScenarioSpec spec;
    if (!s["name"]) fail(s, base + ".name", "missing required field");
    spec.name = scalar<std::string>(s["name"], base + ".name");
    if (spec.name.empty() || spec.name.find_first_of("/\\,\"") != std::string::npos)
      fail(s["name"], base + ".name", "must be non-empty without '/', '\\', ',' or '\"'");
    if (!names.insert(spec.name).second) fail(s["name"], base + ".name", "duplicate scenario name");
    const std::string prefix = base + ".";

    if (!s["known_entities"]) fail(s, prefix + "known_entities", "missing required field");
    spec.known_entities = scalar<int>(s["known_entities"], prefix + "known_entities");
    spec.unknown_entities =
        s["unknown_entities"] ? scalar<int>(s["unknown_entities"], prefix + "unknown_entities") : 0;
    if (auto n = pick(s, defaults, "repetitions")) spec.repetitions = scalar<int>(n, prefix + "repetitions");
    if (auto n = pick(s, defaults, "seed")) spec.seed = scalar<std::uint64_t>(n, prefix + "seed");
    if (spec.known_entities < 0) fail(s["known_entities"], prefix + "known_entities", "must be >= 0");
    if (spec.unknown_entities < 0) fail(s["unknown_entities"], prefix + "unknown_entities", "must be >= 0");
    if (spec.repetitions < 1) fail(pick(s, defaults, "repetitions"), prefix + "repetitions", "must be >= 1");

    spec.world = parse_world(s["world"], defaults ? defaults["world"] : YAML::Node(), prefix);
    spec.agent = parse_agent(s["agent"], defaults ? defaults["agent"] : YAML::Node(), prefix);

    const int types = static_cast<int>(spec.world.infection_types.size());
    if (spec.known_entities + spec.unknown_entities != types)
      fail(s, prefix + "unknown_entities",
           fmt::format("known_entities ({}) + unknown_entities ({}) must equal the number of infection types ({})",
                       spec.known_entities, spec.unknown_entities, types));
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<ScenarioSpec> parse_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(fmt::format("config not found: {}", file.string()), "", 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), file.string());
}

}  // namespace lumen
