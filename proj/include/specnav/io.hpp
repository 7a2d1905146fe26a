#pragma once

// Versioned JSON documents for environments, episode sets, policy
// configurations, result records and metric summaries. Floating point values
// are written with 17 significant digits so files round-trip bit for bit.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "specnav/controller.hpp"
#include "specnav/data_aug.hpp"
#include "specnav/env_model.hpp"
#include "specnav/metrics.hpp"
#include "specnav/sos_features.hpp"
#include "specnav/topo_map.hpp"

namespace specnav {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kEnvSchema = "specnav.env";
inline constexpr std::string_view kEpisodesSchema = "specnav.episodes";
inline constexpr std::string_view kConfigSchema = "specnav.config";
inline constexpr std::string_view kResultSchema = "specnav.result";
inline constexpr std::string_view kMetricsSchema = "specnav.metrics";

// ---------------------------------------------------------------------------
// Writer

namespace detail {

inline void append_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void write_json(std::string& out, const Json& j, int indent, int level) {
  auto newline = [&](int lvl) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * lvl), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write_json(out, it.value(), indent, level + 1);
      }
      newline(level);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line even in indented output.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat && indent >= 0 ? ", " : ",";
        first = false;
        if (!flat) newline(level + 1);
        write_json(out, e, indent, level + 1);
      }
      if (!flat) newline(level);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      append_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

/// Serializes with object keys in sorted order; indent < 0 gives one line.
inline std::string dump_json(const Json& j, int indent = -1) {
  std::string out;
  detail::write_json(out, j, indent, 0);
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

inline Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(origin + ": " + e.what());
  }
}

inline void check_schema(const Json& doc, std::string_view schema) {
  if (!doc.is_object() || !doc.contains("schema") || doc["schema"] != schema) {
    throw SchemaError("expected a '" + std::string(schema) + "' document");
  }
  const int version = doc.value("schema_version", -1);
  if (version != kSchemaVersion) {
    throw SchemaError("'" + std::string(schema) + "' schema_version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(kSchemaVersion) + ")");
  }
}

template <class T>
T required(const Json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("field '") + key + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Environment

inline Json env_to_json(const EnvGraph& env) {
  Json nodes = Json::array();
  for (std::size_t v = 0; v < env.node_count(); ++v) {
    const Vec2 p = env.position(static_cast<NodeId>(v));
    nodes.push_back({{"id", v}, {"x", p.x}, {"y", p.y}});
  }
  Json edges = Json::array();
  for (std::size_t a = 0; a < env.node_count(); ++a) {
    for (const Edge& e : env.neighbors(static_cast<NodeId>(a))) {
      if (static_cast<std::size_t>(e.to) > a) edges.push_back({{"a", a}, {"b", e.to}, {"weight", e.weight}});
    }
  }
  Json objects = Json::array();
  for (const PlacedObject& o : env.objects()) {
    objects.push_back({{"category", o.category},
                       {"x", o.position.x},
                       {"y", o.position.y},
                       {"width_m", o.width_m},
                       {"height_m", o.height_m},
                       {"visibility_radius", o.visibility_radius}});
  }
  return {{"schema", kEnvSchema},
          {"schema_version", kSchemaVersion},
          {"env_id", env.env_id()},
          {"category_count", env.category_count()},
          {"pano", {{"width", env.pano_dims().width}, {"height", env.pano_dims().height}}},
          {"nodes", nodes},
          {"edges", edges},
          {"objects", objects}};
}

/// Rebuilds an environment and rejects it unless every graph invariant holds.
inline EnvGraph env_from_json(const Json& doc) {
  check_schema(doc, kEnvSchema);
  const Json& pano = doc.at("pano");
  EnvGraph env(required<std::string>(doc, "env_id"), required<int>(doc, "category_count"),
               {required<int>(pano, "width"), required<int>(pano, "height")});
  const auto& nodes = doc.at("nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (required<std::size_t>(nodes[i], "id") != i) throw SchemaError("node ids must be 0..N-1 in order");
    env.add_node({required<double>(nodes[i], "x"), required<double>(nodes[i], "y")});
  }
  for (const auto& e : doc.at("edges")) {
    const auto a = required<NodeId>(e, "a");
    const auto b = required<NodeId>(e, "b");
    env.add_edge(a, b);
    if (e.contains("weight") && std::abs(e["weight"].get<double>() - distance(env.position(a), env.position(b))) > 1e-9) {
      throw SchemaError("edge weight does not match node positions");
    }
  }
  for (const auto& o : doc.at("objects")) {
    env.add_object({required<int>(o, "category"),
                    {required<double>(o, "x"), required<double>(o, "y")},
                    required<double>(o, "width_m"),
                    required<double>(o, "height_m"),
                    required<double>(o, "visibility_radius")});
  }
  if (const auto problem = env.validate()) throw SchemaError("invalid environment: " + *problem);
  return env;
}

inline EnvGraph load_env(const std::string& path) { return env_from_json(parse_json(read_text_file(path), path)); }

// ---------------------------------------------------------------------------
// Episodes

inline Json episode_to_json(const Episode& ep) {
  return {{"id", ep.id},
          {"env_id", ep.env_id},
          {"start", ep.start},
          {"goal", ep.goal},
          {"tokens", ep.instruction.tokens},
          {"target", ep.instruction.target},
          {"gt_path", ep.gt_path},
          {"d_success", ep.d_success},
          {"max_steps", ep.max_steps}};
}

inline Episode episode_from_json(const Json& j) {
  Episode ep;
  ep.id = required<int>(j, "id");
  ep.env_id = required<std::string>(j, "env_id");
  ep.start = required<NodeId>(j, "start");
  ep.goal = required<NodeId>(j, "goal");
  ep.instruction.tokens = required<std::vector<int>>(j, "tokens");
  ep.instruction.target = required<int>(j, "target");
  ep.gt_path = required<std::vector<NodeId>>(j, "gt_path");
  ep.d_success = required<double>(j, "d_success");
  ep.max_steps = required<int>(j, "max_steps");
  if (ep.gt_path.empty() || ep.gt_path.front() != ep.start || ep.gt_path.back() != ep.goal) {
    throw SchemaError("episode " + std::to_string(ep.id) + ": gt_path must run from start to goal");
  }
  if (ep.instruction.tokens.empty()) throw SchemaError("episode " + std::to_string(ep.id) + ": no tokens");
  return ep;
}

struct EpisodeSet {
  std::string env_id;
  std::vector<Episode> episodes;
  bool augmented = false;
  std::vector<AugmentedTrajectory> trajectories;  // only for augmented sets
};

inline Json episode_set_to_json(const EpisodeSet& set) {
  Json eps = Json::array();
  for (const auto& ep : set.episodes) eps.push_back(episode_to_json(ep));
  Json doc{{"schema", kEpisodesSchema},
           {"schema_version", kSchemaVersion},
           {"env_id", set.env_id},
           {"augmented", set.augmented},
           {"episodes", eps}};
  if (set.augmented) {
    Json trajs = Json::array();
    for (const auto& t : set.trajectories) {
      trajs.push_back({{"episode_index", t.episode_index}, {"kind", to_string(t.kind)}, {"nodes", t.nodes}});
    }
    doc["trajectories"] = trajs;
  }
  return doc;
}

inline AugmentKind augment_kind_from_string(std::string_view name) {
  for (AugmentKind k : {AugmentKind::GroundTruth, AugmentKind::GroundTruthPrefix, AugmentKind::RandomWalk,
                        AugmentKind::Detoured, AugmentKind::BranchOff}) {
    if (to_string(k) == name) return k;
  }
  throw SchemaError("unknown trajectory kind '" + std::string(name) + "'");
}

inline EpisodeSet episode_set_from_json(const Json& doc) {
  check_schema(doc, kEpisodesSchema);
  EpisodeSet set;
  set.env_id = required<std::string>(doc, "env_id");
  set.augmented = doc.value("augmented", false);
  for (const auto& j : doc.at("episodes")) set.episodes.push_back(episode_from_json(j));
  if (set.augmented && doc.contains("trajectories")) {
    for (const auto& j : doc["trajectories"]) {
      set.trajectories.push_back({required<int>(j, "episode_index"),
                                  augment_kind_from_string(required<std::string>(j, "kind")),
                                  required<std::vector<NodeId>>(j, "nodes")});
    }
  }
  return set;
}

inline EpisodeSet load_episode_set(const std::string& path) {
  return episode_set_from_json(parse_json(read_text_file(path), path));
}

// ---------------------------------------------------------------------------
// Policy configuration

inline Json policy_to_json(const PolicyConfig& cfg) {
  return {{"name", cfg.name},
          {"mode_selector", to_string(cfg.mode_selector)},
          {"patience", cfg.patience},
          {"explore_policy", to_string(cfg.explore)},
          {"p_err", cfg.p_err},
          {"exploit_policy", to_string(cfg.exploit)},
          {"stop_rule", {{"kind", to_string(cfg.stop_rule)}, {"threshold", cfg.stop_threshold}}}};
}

inline PolicyConfig policy_from_json(const Json& j) {
  PolicyConfig cfg;
  cfg.name = required<std::string>(j, "name");
  cfg.mode_selector = enum_from_string(kModeSelectorNames, j.value("mode_selector", "oracle"), "mode selector");
  cfg.patience = j.value("patience", cfg.patience);
  cfg.explore = enum_from_string(kExplorePolicyNames, j.value("explore_policy", "noisy_oracle"), "explore policy");
  cfg.p_err = j.value("p_err", cfg.p_err);
  cfg.exploit = enum_from_string(kExploitPolicyNames, j.value("exploit_policy", "spectral"), "exploit policy");
  if (j.contains("stop_rule")) {
    const Json& s = j["stop_rule"];
    cfg.stop_rule = enum_from_string(kStopRuleNames, s.value("kind", "policy"), "stop rule");
    cfg.stop_threshold = s.value("threshold", cfg.stop_threshold);
  }
  cfg.validate();
  return cfg;
}

struct RunConfig {
  int eta = 0;  // 0 selects the default for the panorama width
  std::vector<PolicyConfig> policies;
};

inline Json run_config_to_json(const RunConfig& rc) {
  Json policies = Json::array();
  for (const auto& p : rc.policies) policies.push_back(policy_to_json(p));
  return {{"schema", kConfigSchema}, {"schema_version", kSchemaVersion}, {"eta", rc.eta}, {"policies", policies}};
}

inline RunConfig run_config_from_json(const Json& doc) {
  check_schema(doc, kConfigSchema);
  RunConfig rc;
  rc.eta = doc.value("eta", 0);
  for (const auto& p : doc.at("policies")) rc.policies.push_back(policy_from_json(p));
  if (rc.policies.empty()) throw ConfigError("configuration lists no policies");
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  return run_config_from_json(parse_json(read_text_file(path), path));
}

// ---------------------------------------------------------------------------
// Results

inline Json result_to_json(const EpisodeResult& r) {
  Json modes = Json::array();
  for (StepMode m : r.modes) modes.push_back(to_string(m));
  return {{"schema", kResultSchema},
          {"schema_version", kSchemaVersion},
          {"episode_id", r.episode_id},
          {"env_id", r.env_id},
          {"policy", r.policy},
          {"trajectory", r.trajectory},
          {"modes", modes},
          {"stopped", r.stopped},
          {"steps", r.steps},
          {"success", success(r) > 0.5},
          {"oracle_success", oracle_success(r) > 0.5},
          {"grounded", r.grounded},
          {"d_success", r.d_success},
          {"path_length", r.path_length},
          {"shortest_length", r.shortest_length},
          {"final_distance", r.final_distance},
          {"min_distance", r.min_distance},
          {"nav_score", r.final_nav_score},
          {"nav_score_inverse_ratio", r.final_nav_score_inverse_ratio}};
}

inline EpisodeResult result_from_json(const Json& j) {
  check_schema(j, kResultSchema);
  EpisodeResult r;
  r.episode_id = required<int>(j, "episode_id");
  r.env_id = required<std::string>(j, "env_id");
  r.policy = required<std::string>(j, "policy");
  r.trajectory = required<std::vector<NodeId>>(j, "trajectory");
  for (const auto& m : j.at("modes")) r.modes.push_back(m.get<std::string>() == "explore" ? StepMode::Explore : StepMode::Exploit);
  r.stopped = required<bool>(j, "stopped");
  r.steps = required<int>(j, "steps");
  r.grounded = required<bool>(j, "grounded");
  r.d_success = required<double>(j, "d_success");
  r.path_length = required<double>(j, "path_length");
  r.shortest_length = required<double>(j, "shortest_length");
  r.final_distance = required<double>(j, "final_distance");
  r.min_distance = required<double>(j, "min_distance");
  r.final_nav_score = required<double>(j, "nav_score");
  r.final_nav_score_inverse_ratio = required<double>(j, "nav_score_inverse_ratio");
  return r;
}

inline Json metrics_to_json(const MetricSummary& m) {
  return {{"episodes", m.episodes}, {"sr", m.sr},   {"spl", m.spl}, {"osr", m.osr},
          {"tl", m.tl},             {"ne", m.ne},   {"fsr", m.fsr}, {"fspl", m.fspl}};
}

// ---------------------------------------------------------------------------
// Features and map snapshots

inline Json sos_to_json(const SosFeature& f) {
  return {{"shape", {f.categories(), f.eta()}}, {"values", std::vector<double>(f.flat().begin(), f.flat().end())}};
}

inline SosFeature sos_from_json(const Json& j) {
  const auto shape = required<std::vector<std::size_t>>(j, "shape");
  if (shape.size() != 2) throw SchemaError("SOS shape must have two entries");
  return SosFeature(shape[0], shape[1], required<std::vector<double>>(j, "values"));
}

inline Json topo_map_to_json(const TopoMap& map) {
  Json nodes = Json::array();
  for (NodeId v : map.visited()) {
    const auto& rec = map.node(v);
    nodes.push_back({{"id", v}, {"x", rec.position.x}, {"y", rec.position.y}, {"status", "visited"},
                     {"last_visit", rec.last_visit}, {"chosen", map.was_chosen(v)}});
  }
  for (NodeId v : map.frontier()) {
    const auto& rec = map.node(v);
    nodes.push_back({{"id", v}, {"x", rec.position.x}, {"y", rec.position.y}, {"status", "frontier"},
                     {"chosen", map.was_chosen(v)}});
  }
  Json edges = Json::array();
  for (NodeId v : map.visited()) {
    for (const Edge& e : map.neighbors(v)) {
      if (!map.is_visited(e.to) || e.to > v) edges.push_back({{"a", v}, {"b", e.to}, {"weight", e.weight}});
    }
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

}  // namespace specnav
