#pragma once

// Hierarchical explore/exploit navigation loop. A mode selector emits the
// probability to explore; while it stays at or above one half the agent
// takes single exploration steps, otherwise it picks a local goal among the
// observed but unvisited nodes, walks the planned path there, and returns to
// exploration.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "specnav/env_model.hpp"
#include "specnav/metrics.hpp"
#include "specnav/nav_scoring.hpp"
#include "specnav/rng.hpp"
#include "specnav/sos_features.hpp"
#include "specnav/topo_map.hpp"

namespace specnav {

// ---------------------------------------------------------------------------
// Perception cache

/// An environment together with everything an agent can perceive in it:
/// per-node spectra and object counts, category statistics for reference
/// spectra, and geodesic distances (used only by oracles and metrics).
class World {
 public:
  World(const EnvGraph& env, int eta) : env_(&env), eta_(eta), distances_(env) {
    if (eta < 1 || eta > max_eta(env.pano_dims().width)) throw ConfigError("eta out of range for panorama width");
    stats_ = collect_category_stats(env);
    observations_.reserve(env.node_count());
    visible_.reserve(env.node_count());
    for (std::size_t v = 0; v < env.node_count(); ++v) {
      const auto id = static_cast<NodeId>(v);
      const PanoObservation pano = render_pano(env, id);
      observations_.push_back({id, env.position(id), compute_sos(pano, eta), category_histogram(pano)});
      visible_.push_back(visible_categories(pano));
    }
  }

  explicit World(const EnvGraph& env) : World(env, default_eta(env.pano_dims().width)) {}

  const EnvGraph& env() const { return *env_; }
  int eta() const { return eta_; }
  int category_count() const { return env_->category_count(); }
  const CategoryStats& stats() const { return stats_; }
  const DistanceTable& distances() const { return distances_; }
  const NodeObservation& observe(NodeId v) const { return observations_.at(static_cast<std::size_t>(v)); }
  const SosFeature& feature(NodeId v) const { return observe(v).feature; }
  const std::vector<int>& visible(NodeId v) const { return visible_.at(static_cast<std::size_t>(v)); }

  std::vector<SosFeature> references(const Instruction& instruction) const {
    return reference_sos_list(instruction.tokens, stats_, eta_, category_count());
  }

  std::vector<SosFeature> features(std::span<const NodeId> nodes) const {
    std::vector<SosFeature> out;
    out.reserve(nodes.size());
    for (NodeId v : nodes) out.push_back(feature(v));
    return out;
  }

 private:
  const EnvGraph* env_;
  int eta_;
  DistanceTable distances_;
  CategoryStats stats_;
  std::vector<NodeObservation> observations_;
  std::vector<std::vector<int>> visible_;
};

// ---------------------------------------------------------------------------
// Configuration

enum class ModeSelectorKind { Oracle, ScoreTrend };
enum class ExplorePolicyKind { GreedySos, Random, Oracle, NoisyOracle };
enum class ExploitPolicyKind { Spectral, Spatial, Homing, Random, Oracle };
enum class StopRuleKind { Spectral, Policy };

struct PolicyConfig {
  std::string name = "spectral";
  ModeSelectorKind mode_selector = ModeSelectorKind::Oracle;
  int patience = 2;
  ExplorePolicyKind explore = ExplorePolicyKind::NoisyOracle;
  double p_err = 0.3;
  ExploitPolicyKind exploit = ExploitPolicyKind::Spectral;
  StopRuleKind stop_rule = StopRuleKind::Policy;
  double stop_threshold = 0.8;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(p_err >= 0.0 && p_err <= 1.0)) throw ConfigError("p_err must lie in [0, 1]");
    if (patience < 1) throw ConfigError("patience must be at least 1");
    if (!(stop_threshold >= -1.0 && stop_threshold <= 1.0)) throw ConfigError("stop_threshold must lie in [-1, 1]");
  }
};

template <class E>
struct EnumName {
  E value;
  std::string_view name;
};

inline constexpr std::array<EnumName<ModeSelectorKind>, 2> kModeSelectorNames{{
    {ModeSelectorKind::Oracle, "oracle"},
    {ModeSelectorKind::ScoreTrend, "score_trend"},
}};
inline constexpr std::array<EnumName<ExplorePolicyKind>, 4> kExplorePolicyNames{{
    {ExplorePolicyKind::GreedySos, "greedy_sos"},
    {ExplorePolicyKind::Random, "random"},
    {ExplorePolicyKind::Oracle, "oracle"},
    {ExplorePolicyKind::NoisyOracle, "noisy_oracle"},
}};
inline constexpr std::array<EnumName<ExploitPolicyKind>, 5> kExploitPolicyNames{{
    {ExploitPolicyKind::Spectral, "spectral"},
    {ExploitPolicyKind::Spatial, "spatial"},
    {ExploitPolicyKind::Homing, "homing"},
    {ExploitPolicyKind::Random, "random"},
    {ExploitPolicyKind::Oracle, "oracle"},
}};
inline constexpr std::array<EnumName<StopRuleKind>, 2> kStopRuleNames{{
    {StopRuleKind::Spectral, "spectral"},
    {StopRuleKind::Policy, "policy"},
}};

template <class E, std::size_t N>
std::string_view enum_to_string(const std::array<EnumName<E>, N>& table, E value) {
  for (const auto& entry : table) {
    if (entry.value == value) return entry.name;
  }
  return "?";
}

template <class E, std::size_t N>
E enum_from_string(const std::array<EnumName<E>, N>& table, std::string_view name, std::string_view what) {
  for (const auto& entry : table) {
    if (entry.name == name) return entry.value;
  }
  std::string valid;
  for (const auto& entry : table) {
    if (!valid.empty()) valid += ", ";
    valid += entry.name;
  }
  throw ConfigError("unknown " + std::string(what) + " '" + std::string(name) + "' (valid: " + valid + ")");
}

inline std::string_view to_string(ModeSelectorKind k) { return enum_to_string(kModeSelectorNames, k); }
inline std::string_view to_string(ExplorePolicyKind k) { return enum_to_string(kExplorePolicyNames, k); }
inline std::string_view to_string(ExploitPolicyKind k) { return enum_to_string(kExploitPolicyNames, k); }
inline std::string_view to_string(StopRuleKind k) { return enum_to_string(kStopRuleNames, k); }
inline std::string_view to_string(StepMode m) { return m == StepMode::Explore ? "explore" : "exploit"; }

// ---------------------------------------------------------------------------
// State

struct ControllerState {
  const Episode* episode = nullptr;
  std::vector<SosFeature> refs;  // reference spectra of the instruction tokens
  NodeId current = 0;
  int t = 0;
  std::vector<NodeId> trajectory;
  std::vector<StepMode> modes;
  std::vector<double> prefix_scores;  // score of trajectory[0..s] for each s
  std::vector<double> trend_scores;   // prefix scores since the last exploitation
  double p_explore = 1.0;
  double path_length = 0.0;
  TopoMap map;

  NodeId start() const { return episode->start; }
};

inline std::vector<NodeObservation> observe_neighbors(const World& world, NodeId v) {
  std::vector<NodeObservation> out;
  for (const Edge& e : world.env().neighbors(v)) out.push_back(world.observe(e.to));
  return out;
}

inline double trajectory_score(const World& world, const ControllerState& state, std::span<const NodeId> nodes) {
  const auto feats = world.features(nodes);
  return nav_score(state.refs, feats);
}

inline ControllerState initial_state(const World& world, const Episode& episode) {
  ControllerState state;
  state.episode = &episode;
  state.refs = world.references(episode.instruction);
  state.current = episode.start;
  state.trajectory = {episode.start};
  const auto neighbors = observe_neighbors(world, episode.start);
  state.map.update(world.observe(episode.start), neighbors, 0);
  const double s0 = trajectory_score(world, state, state.trajectory);
  state.prefix_scores = {s0};
  state.trend_scores = {s0};
  return state;
}

// ---------------------------------------------------------------------------
// Mode selection

/// 0 when the last `patience` scores each failed to strictly exceed their
/// predecessor, else 1.
inline double score_trend_probability(std::span<const double> scores, int patience) {
  int stalled = 0;
  for (std::size_t i = scores.size(); i > 1; --i) {
    if (scores[i - 1] > scores[i - 2]) break;
    ++stalled;
  }
  return stalled >= patience ? 0.0 : 1.0;
}

/// Probability to explore. The oracle selector follows the ground-truth
/// label (1 exactly on the shortest ground-truth path).
inline double select_mode(const ControllerState& state, const PolicyConfig& cfg) {
  if (state.t == 0) return 1.0;
  switch (cfg.mode_selector) {
    case ModeSelectorKind::Oracle: {
      const auto& gt = state.episode->gt_path;
      return std::find(gt.begin(), gt.end(), state.current) != gt.end() ? 1.0 : 0.0;
    }
    case ModeSelectorKind::ScoreTrend:
      return score_trend_probability(state.trend_scores, cfg.patience);
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// Exploration

struct ExploreAction {
  bool stop = false;
  NodeId next = -1;

  static ExploreAction stop_action() { return {true, -1}; }
  static ExploreAction move(NodeId v) { return {false, v}; }
};

inline ExploreAction explore_step(const ControllerState& state, const PolicyConfig& cfg, const World& world,
                                  Rng& rng) {
  const EnvGraph& env = world.env();
  const auto& neighbors = env.neighbors(state.current);
  if (neighbors.empty()) throw ControlError("node " + std::to_string(state.current) + " has no neighbors");
  const Episode& ep = *state.episode;

  std::vector<NodeId> unvisited;
  for (const Edge& e : neighbors) {
    if (!state.map.is_visited(e.to)) unvisited.push_back(e.to);
  }

  switch (cfg.explore) {
    case ExplorePolicyKind::Oracle: {
      if (state.current == ep.goal) return ExploreAction::stop_action();
      return ExploreAction::move(world.distances().next_hop(env, state.current, ep.goal));
    }
    case ExplorePolicyKind::NoisyOracle: {
      // The deviation draw happens on every step so that runs differing only
      // in exploitation policy see the same noise sequence.
      const bool deviate = rng.uniform() < cfg.p_err;
      if (state.current == ep.goal) return ExploreAction::stop_action();
      const NodeId intended = world.distances().next_hop(env, state.current, ep.goal);
      if (!deviate) return ExploreAction::move(intended);
      std::vector<NodeId> wrong;
      for (NodeId v : unvisited) {
        if (v != intended) wrong.push_back(v);
      }
      if (wrong.empty()) {
        for (const Edge& e : neighbors) {
          if (e.to != intended) wrong.push_back(e.to);
        }
      }
      if (wrong.empty()) return ExploreAction::move(intended);
      return ExploreAction::move(wrong[rng.index(wrong.size())]);
    }
    case ExplorePolicyKind::Random: {
      if (!unvisited.empty()) return ExploreAction::move(unvisited[rng.index(unvisited.size())]);
      return ExploreAction::move(neighbors[rng.index(neighbors.size())].to);
    }
    case ExplorePolicyKind::GreedySos: {
      if (unvisited.empty()) {
        // Everything around is visited: go where we have not been longest.
        NodeId best = neighbors.front().to;
        for (const Edge& e : neighbors) {
          if (state.map.last_visit(e.to) < state.map.last_visit(best)) best = e.to;
        }
        return ExploreAction::move(best);
      }
      if (unvisited.size() == 1) return ExploreAction::move(unvisited.front());
      auto feats = world.features(state.trajectory);
      NodeId best = -1;
      double best_score = -std::numeric_limits<double>::infinity();
      for (NodeId v : unvisited) {
        feats.push_back(state.map.feature(v));
        const double s = nav_score(state.refs, feats);
        feats.pop_back();
        if (s > best_score) {
          best_score = s;
          best = v;
        }
      }
      return ExploreAction::move(best);
    }
  }
  throw ControlError("unhandled exploration policy");
}

// ---------------------------------------------------------------------------
// Exploitation

/// Score of the corrected trajectory: the shortest path in the agent's map
/// from the episode start to `candidate`.
inline double corrected_trajectory_score(const ControllerState& state, NodeId candidate) {
  const auto path = state.map.shortest_path(state.start(), candidate);
  std::vector<SosFeature> feats;
  feats.reserve(path.nodes.size());
  for (NodeId v : path.nodes) feats.push_back(state.map.feature(v));
  return nav_score(state.refs, feats);
}

/// Highest corrected-trajectory score among `candidates`; ties go to the
/// smaller id. Candidates must be sorted.
inline std::optional<NodeId> best_scoring_node(const ControllerState& state, std::span<const NodeId> candidates) {
  std::optional<NodeId> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (NodeId v : candidates) {
    const double s = corrected_trajectory_score(state, v);
    if (s > best_score) {
      best_score = s;
      best = v;
    }
  }
  return best;
}

/// Visited node (other than the current one) at which the trajectory prefix
/// scored highest; later visits win ties.
inline std::optional<NodeId> homing_target(const ControllerState& state) {
  std::optional<NodeId> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < state.trajectory.size(); ++s) {
    const NodeId v = state.trajectory[s];
    if (v == state.current) continue;
    if (state.prefix_scores[s] >= best_score) {
      best_score = state.prefix_scores[s];
      best = v;
    }
  }
  return best;
}

inline std::vector<double> token_histogram(const Instruction& instruction, int category_count) {
  std::vector<double> bag(static_cast<std::size_t>(category_count), 0.0);
  for (int tok : instruction.tokens) bag[static_cast<std::size_t>(tok)] += 1.0;
  return bag;
}

/// Local goal for the next exploitation phase, or nullopt when the agent
/// has nowhere left to go (which the loop turns into a stop).
inline std::optional<NodeId> local_goal_search(const ControllerState& state, const PolicyConfig& cfg,
                                               const World& world, Rng& rng) {
  if (cfg.exploit == ExploitPolicyKind::Homing) return homing_target(state);
  const auto candidates = state.map.frontier_candidates();
  if (candidates.empty()) return homing_target(state);
  if (candidates.size() == 1) return candidates.front();

  switch (cfg.exploit) {
    case ExploitPolicyKind::Spectral:
      return best_scoring_node(state, candidates);
    case ExploitPolicyKind::Spatial: {
      const auto bag = token_histogram(state.episode->instruction, world.category_count());
      NodeId best = candidates.front();
      double best_sim = -std::numeric_limits<double>::infinity();
      for (NodeId v : candidates) {
        const double sim = cosine_similarity(state.map.node(v).category_histogram, bag);
        if (sim > best_sim) {
          best_sim = sim;
          best = v;
        }
      }
      return best;
    }
    case ExploitPolicyKind::Random:
      return candidates[rng.index(candidates.size())];
    case ExploitPolicyKind::Oracle: {
      NodeId best = candidates.front();
      double best_d = std::numeric_limits<double>::infinity();
      for (NodeId v : candidates) {
        const double d = world.distances()(v, state.episode->goal);
        if (d < best_d) {
          best_d = d;
          best = v;
        }
      }
      return best;
    }
    case ExploitPolicyKind::Homing:
      break;
  }
  return homing_target(state);
}

// ---------------------------------------------------------------------------
// Stop rule and grounding

/// Cosine between the target row of a node's spectrum and the target row
/// of the target's reference spectrum.
inline double target_similarity(const World& world, NodeId node, int target) {
  const SosFeature ref = reference_sos(target, world.stats(), world.eta(), world.category_count());
  const auto t = static_cast<std::size_t>(target);
  return cosine_similarity(world.feature(node).row(t), ref.row(t));
}

/// Grounding at the stop node: among visible categories, the one whose
/// reference spectrum is most similar to the target's; smaller index on ties.
inline bool grounds_target(const World& world, NodeId node, int target) {
  const auto& visible = world.visible(node);
  if (visible.empty() || !world.stats().at(target).present()) return false;
  const SosFeature target_ref = reference_sos(target, world.stats(), world.eta(), world.category_count());
  int best = -1;
  double best_sim = -std::numeric_limits<double>::infinity();
  for (int c : visible) {
    if (!world.stats().at(c).present()) continue;
    const double sim = cosine_similarity(reference_sos(c, world.stats(), world.eta(), world.category_count()), target_ref);
    if (sim > best_sim) {
      best_sim = sim;
      best = c;
    }
  }
  return best == target;
}

// ---------------------------------------------------------------------------
// Episode loop

/// 1 - d(v, goal) / d(start, goal); 1 when start and goal coincide.
inline double progress(const DistanceTable& distances, const Episode& episode, NodeId v) {
  if (episode.start == episode.goal) return 1.0;
  return 1.0 - distances(v, episode.goal) / distances(episode.start, episode.goal);
}

inline double progress(const EnvGraph& env, const Episode& episode, NodeId v) {
  if (episode.start == episode.goal) return 1.0;
  return 1.0 - geodesic_distance(env, v, episode.goal) / geodesic_distance(env, episode.start, episode.goal);
}

namespace detail {

inline void advance(ControllerState& state, const World& world, NodeId next, StepMode mode) {
  const EnvGraph& env = world.env();
  if (!env.has_edge(state.current, next)) {
    throw ControlError("move between non-adjacent nodes " + std::to_string(state.current) + " -> " +
                       std::to_string(next));
  }
  state.path_length += distance(env.position(state.current), env.position(next));
  state.current = next;
  ++state.t;
  state.trajectory.push_back(next);
  state.modes.push_back(mode);
  const auto neighbors = observe_neighbors(world, next);
  state.map.update(world.observe(next), neighbors, state.t);
  const double s = trajectory_score(world, state, state.trajectory);
  state.prefix_scores.push_back(s);
  state.trend_scores.push_back(s);
}

}  // namespace detail

/// Per-episode random stream: a function of the global seed and episode id only.
inline std::uint64_t episode_seed(std::uint64_t global_seed, int episode_id) {
  return derive_seed(global_seed, static_cast<std::uint64_t>(episode_id) + 0x7A3C0000ULL);
}

inline EpisodeResult run_episode(const World& world, const Episode& episode, const PolicyConfig& cfg) {
  cfg.validate();
  Rng rng(episode_seed(cfg.seed, episode.id));
  ControllerState state = initial_state(world, episode);
  bool stopped = false;

  while (state.t < episode.max_steps) {
    if (cfg.stop_rule == StopRuleKind::Spectral &&
        target_similarity(world, state.current, episode.instruction.target) >= cfg.stop_threshold) {
      stopped = true;
      break;
    }
    if (state.p_explore >= 0.5) {
      const ExploreAction action = explore_step(state, cfg, world, rng);
      if (action.stop) {
        stopped = true;
        break;
      }
      detail::advance(state, world, action.next, StepMode::Explore);
    } else {
      const auto goal = local_goal_search(state, cfg, world, rng);
      if (!goal) {
        stopped = true;
        break;
      }
      state.map.mark_chosen(*goal);
      const PathResult plan = state.map.shortest_path(state.current, *goal);
      for (std::size_t i = 1; i < plan.nodes.size() && state.t < episode.max_steps; ++i) {
        detail::advance(state, world, plan.nodes[i], StepMode::Exploit);
      }
      // Back to exploration; the trend restarts from the local goal.
      state.trend_scores = {state.prefix_scores.back()};
    }
    state.p_explore = select_mode(state, cfg);
  }

  EpisodeResult result;
  result.episode_id = episode.id;
  result.env_id = episode.env_id;
  result.policy = cfg.name;
  result.trajectory = state.trajectory;
  result.modes = state.modes;
  result.stopped = stopped;
  result.steps = state.t;
  result.d_success = episode.d_success;
  result.path_length = state.path_length;
  result.shortest_length = world.distances()(episode.start, episode.goal);
  result.final_distance = world.distances()(state.current, episode.goal);
  result.min_distance = result.final_distance;
  for (NodeId v : state.trajectory) {
    result.min_distance = std::min(result.min_distance, world.distances()(v, episode.goal));
  }
  result.grounded = grounds_target(world, state.current, episode.instruction.target);
  const auto terms = nav_score_terms(state.refs, world.features(state.trajectory));
  result.final_nav_score = terms.score;
  result.final_nav_score_inverse_ratio = terms.score_inverse_ratio;
  return result;
}

}  // namespace specnav
