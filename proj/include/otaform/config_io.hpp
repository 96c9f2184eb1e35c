#pragma once

// YAML scenario files. Every key is optional (defaults come from
// ScenarioConfig); unknown keys and ill-typed values are rejected with a
// ConfigError naming the dotted key path.

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include "otaform/error.hpp"
#include "otaform/scenario.hpp"

namespace otaform {

namespace yaml_detail {

inline std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

inline void require_map(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) throw ConfigError(path.empty() ? "<root>" : path, "expected a mapping");
}

inline void reject_unknown(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!keys.contains(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

template <typename T>
void read(const YAML::Node& node, const std::string& path, const char* key, T& out) {
  const YAML::Node v = node[key];
  if (!v) return;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(join(path, key), "wrong type for value '" + (v.IsScalar() ? v.Scalar() : std::string("<node>")) + "'");
  }
}

template <typename Enum>
void read_enum(const YAML::Node& node, const std::string& path, const char* key, Enum& out,
               std::initializer_list<std::pair<const char*, Enum>> choices) {
  std::string s;
  read(node, path, key, s);
  if (s.empty()) return;
  for (const auto& [name, value] : choices) {
    if (s == name) {
      out = value;
      return;
    }
  }
  throw ConfigError(join(path, key), "unrecognized value '" + s + "'");
}

inline Vec2 read_vec2(const YAML::Node& v, const std::string& path) {
  if (!v.IsSequence() || v.size() != 2) throw ConfigError(path, "expected a [x, y] pair");
  try {
    return {v[0].as<double>(), v[1].as<double>()};
  } catch (const YAML::Exception&) {
    throw ConfigError(path, "expected numeric coordinates");
  }
}

inline void read_agent(const YAML::Node& node, const std::string& path, AgentConfig& a, bool allow_overrides,
                       bool allow_index) {
  require_map(node, path);
  if (allow_overrides) {
    reject_unknown(node, path, {"model", "controller_variant", "kappa_eps", "deadband", "mu_rot", "gamma", "lambda", "overrides"});
  } else if (allow_index) {
    reject_unknown(node, path, {"index", "model", "controller_variant", "kappa_eps", "deadband", "mu_rot", "gamma", "lambda"});
  }
  read_enum(node, path, "model", a.kind, {{"unicycle", AgentKind::Unicycle}, {"first_order", AgentKind::FirstOrder}});
  read_enum(node, path, "controller_variant", a.variant,
            {{"perpendicular", ControllerVariant::Perpendicular}, {"paper_literal", ControllerVariant::PaperLiteral}});
  read(node, path, "kappa_eps", a.kappa_eps);
  read(node, path, "deadband", a.deadband);
  read(node, path, "mu_rot", a.mu_rot);
  read(node, path, "lambda", a.lambda);
  if (const YAML::Node g = node["gamma"]) {
    const std::string gp = join(path, "gamma");
    require_map(g, gp);
    reject_unknown(g, gp, {"law", "value", "a_min", "a_max", "scale"});
    read_enum(g, gp, "law", a.gamma.kind, {{"fixed", GammaLawKind::Fixed}, {"neg_log_uniform", GammaLawKind::NegLogUniform}});
    read(g, gp, "value", a.gamma.value);
    read(g, gp, "a_min", a.gamma.a_min);
    read(g, gp, "a_max", a.gamma.a_max);
    read(g, gp, "scale", a.gamma.scale);
  }
}

// Shortest text that parses back to the same double.
inline std::string real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void emit_agent(YAML::Emitter& e, const AgentConfig& a) {
  e << YAML::Key << "model" << YAML::Value << (a.kind == AgentKind::Unicycle ? "unicycle" : "first_order");
  e << YAML::Key << "controller_variant" << YAML::Value << to_string(a.variant);
  e << YAML::Key << "kappa_eps" << YAML::Value << real(a.kappa_eps);
  e << YAML::Key << "deadband" << YAML::Value << real(a.deadband);
  e << YAML::Key << "mu_rot" << YAML::Value << real(a.mu_rot);
  e << YAML::Key << "gamma" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "law" << YAML::Value << (a.gamma.kind == GammaLawKind::Fixed ? "fixed" : "neg_log_uniform");
  e << YAML::Key << "value" << YAML::Value << real(a.gamma.value);
  e << YAML::Key << "a_min" << YAML::Value << real(a.gamma.a_min);
  e << YAML::Key << "a_max" << YAML::Value << real(a.gamma.a_max);
  e << YAML::Key << "scale" << YAML::Value << real(a.gamma.scale);
  e << YAML::EndMap;
  e << YAML::Key << "lambda" << YAML::Value << real(a.lambda);
}

}  // namespace yaml_detail

inline ScenarioConfig parse_scenario(const std::string& text) {
  using namespace yaml_detail;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("malformed YAML: ") + e.what());
  }
  ScenarioConfig c;
  if (!root || root.IsNull()) return c;
  require_map(root, "");
  reject_unknown(root, "", {"name", "seed", "n", "horizon", "schedule", "integrator", "agents", "formation", "topology", "init", "analysis"});
  read(root, "", "name", c.name);
  read(root, "", "seed", c.seed);
  read(root, "", "n", c.n);
  read(root, "", "horizon", c.horizon);

  if (const YAML::Node s = root["schedule"]) {
    require_map(s, "schedule");
    reject_unknown(s, "schedule", {"mode", "t_min", "t_max"});
    read_enum(s, "schedule", "mode", c.schedule, {{"fixed", ScheduleMode::Fixed}, {"random", ScheduleMode::Random}});
    read(s, "schedule", "t_min", c.t_min);
    read(s, "schedule", "t_max", c.t_max);
  }
  if (const YAML::Node s = root["integrator"]) {
    require_map(s, "integrator");
    reject_unknown(s, "integrator", {"step", "samples_per_interval"});
    read(s, "integrator", "step", c.step);
    read(s, "integrator", "samples_per_interval", c.samples_per_interval);
  }
  if (const YAML::Node s = root["agents"]) {
    read_agent(s, "agents", c.agents, true, false);
    if (const YAML::Node list = s["overrides"]) {
      if (!list.IsSequence()) throw ConfigError("agents.overrides", "expected a list");
      for (std::size_t j = 0; j < list.size(); ++j) {
        const std::string path = "agents.overrides[" + std::to_string(j) + "]";
        AgentOverride o;
        o.agent = c.agents;
        read_agent(list[j], path, o.agent, false, true);
        if (!list[j]["index"]) throw ConfigError(path + ".index", "missing");
        read(list[j], path, "index", o.index);
        c.overrides.push_back(o);
      }
    }
  }
  if (const YAML::Node s = root["formation"]) {
    require_map(s, "formation");
    reject_unknown(s, "formation", {"kind", "radius", "displacements"});
    read_enum(s, "formation", "kind", c.formation.kind, {{"polygon", FormationKind::Polygon}, {"explicit", FormationKind::Explicit}});
    read(s, "formation", "radius", c.formation.radius);
    if (const YAML::Node d = s["displacements"]) {
      if (!d.IsSequence()) throw ConfigError("formation.displacements", "expected a list of [x, y] pairs");
      for (std::size_t j = 0; j < d.size(); ++j) {
        c.formation.displacements.push_back(read_vec2(d[j], "formation.displacements[" + std::to_string(j) + "]"));
      }
    }
  }
  if (const YAML::Node s = root["topology"]) {
    require_map(s, "topology");
    reject_unknown(s, "topology", {"edge_probability", "xi_min", "cycle_backbone"});
    read(s, "topology", "edge_probability", c.topology.edge_probability);
    read(s, "topology", "xi_min", c.topology.xi_min);
    read(s, "topology", "cycle_backbone", c.topology.cycle_backbone);
  }
  if (const YAML::Node s = root["init"]) {
    require_map(s, "init");
    reject_unknown(s, "init", {"mode", "position_min", "position_max", "heading_min", "heading_max", "center"});
    read_enum(s, "init", "mode", c.init.mode, {{"random", InitMode::Random}, {"in_formation", InitMode::InFormation}});
    read(s, "init", "position_min", c.init.position_min);
    read(s, "init", "position_max", c.init.position_max);
    read(s, "init", "heading_min", c.init.heading_min);
    read(s, "init", "heading_max", c.init.heading_max);
    if (const YAML::Node v = s["center"]) c.init.center = read_vec2(v, "init.center");
  }
  if (const YAML::Node s = root["analysis"]) {
    require_map(s, "analysis");
    reject_unknown(s, "analysis", {"sigma_step", "mixing_window", "verdict_ratio"});
    read(s, "analysis", "sigma_step", c.analysis.sigma_step);
    read(s, "analysis", "mixing_window", c.analysis.mixing_window);
    read(s, "analysis", "verdict_ratio", c.analysis.verdict_ratio);
  }
  c.validate();
  return c;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

/// Full YAML rendering; parse_scenario(dump_scenario(c)) reproduces c.
inline std::string dump_scenario(const ScenarioConfig& c) {
  using namespace yaml_detail;
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << c.name;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::Key << "n" << YAML::Value << c.n;
  e << YAML::Key << "horizon" << YAML::Value << real(c.horizon);
  e << YAML::Key << "schedule" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "mode" << YAML::Value << (c.schedule == ScheduleMode::Fixed ? "fixed" : "random");
  e << YAML::Key << "t_min" << YAML::Value << real(c.t_min);
  e << YAML::Key << "t_max" << YAML::Value << real(c.t_max);
  e << YAML::EndMap;
  e << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "step" << YAML::Value << real(c.step);
  e << YAML::Key << "samples_per_interval" << YAML::Value << c.samples_per_interval;
  e << YAML::EndMap;
  e << YAML::Key << "agents" << YAML::Value << YAML::BeginMap;
  emit_agent(e, c.agents);
  if (!c.overrides.empty()) {
    e << YAML::Key << "overrides" << YAML::Value << YAML::BeginSeq;
    for (const auto& o : c.overrides) {
      e << YAML::BeginMap << YAML::Key << "index" << YAML::Value << o.index;
      emit_agent(e, o.agent);
      e << YAML::EndMap;
    }
    e << YAML::EndSeq;
  }
  e << YAML::EndMap;
  e << YAML::Key << "formation" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << (c.formation.kind == FormationKind::Polygon ? "polygon" : "explicit");
  e << YAML::Key << "radius" << YAML::Value << real(c.formation.radius);
  if (!c.formation.displacements.empty()) {
    e << YAML::Key << "displacements" << YAML::Value << YAML::BeginSeq;
    for (const auto& d : c.formation.displacements) e << YAML::Flow << YAML::BeginSeq << real(d.x()) << real(d.y()) << YAML::EndSeq;
    e << YAML::EndSeq;
  }
  e << YAML::EndMap;
  e << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "edge_probability" << YAML::Value << real(c.topology.edge_probability);
  e << YAML::Key << "xi_min" << YAML::Value << real(c.topology.xi_min);
  e << YAML::Key << "cycle_backbone" << YAML::Value << c.topology.cycle_backbone;
  e << YAML::EndMap;
  e << YAML::Key << "init" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "mode" << YAML::Value << (c.init.mode == InitMode::Random ? "random" : "in_formation");
  e << YAML::Key << "position_min" << YAML::Value << real(c.init.position_min);
  e << YAML::Key << "position_max" << YAML::Value << real(c.init.position_max);
  e << YAML::Key << "heading_min" << YAML::Value << real(c.init.heading_min);
  e << YAML::Key << "heading_max" << YAML::Value << real(c.init.heading_max);
  e << YAML::Key << "center" << YAML::Value << YAML::Flow << YAML::BeginSeq << real(c.init.center.x()) << c.init.center.y()
    << YAML::EndSeq;
  e << YAML::EndMap;
  e << YAML::Key << "analysis" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "sigma_step" << YAML::Value << real(c.analysis.sigma_step);
  e << YAML::Key << "mixing_window" << YAML::Value << c.analysis.mixing_window;
  e << YAML::Key << "verdict_ratio" << YAML::Value << real(c.analysis.verdict_ratio);
  e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace otaform
