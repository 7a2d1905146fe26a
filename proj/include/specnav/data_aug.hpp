#pragma once

// Demonstrations with detours (labelled for mode supervision) and augmented
// trajectory sets for studying how trajectory scores track ground truth.

#include <algorithm>
#include <cstdint>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "specnav/env_model.hpp"
#include "specnav/rng.hpp"

namespace specnav {

struct LabeledStep {
  NodeId node = 0;
  int label = 0;  // 1 on the ground-truth shortest path, else 0

  friend bool operator==(const LabeledStep&, const LabeledStep&) = default;
};

/// Walks the ground-truth path; at each node, with probability detour_rate,
/// steps out along `depth` off-path nodes and back the same way.
inline std::vector<LabeledStep> generate_detour_demo(const EnvGraph& env, const Episode& episode, std::uint64_t seed,
                                                     double detour_rate, int depth = 1) {
  if (!(detour_rate >= 0.0 && detour_rate <= 1.0)) throw ConfigError("detour_rate must lie in [0, 1]");
  if (depth < 1) throw ConfigError("detour depth must be at least 1");
  if (episode.gt_path.empty()) throw ConfigError("episode has no ground-truth path");
  const std::set<NodeId> on_path(episode.gt_path.begin(), episode.gt_path.end());
  auto label = [&](NodeId v) { return on_path.contains(v) ? 1 : 0; };

  Rng rng(seed);
  std::vector<LabeledStep> demo;
  for (std::size_t i = 0; i < episode.gt_path.size(); ++i) {
    const NodeId v = episode.gt_path[i];
    demo.push_back({v, label(v)});
    if (i + 1 == episode.gt_path.size()) break;
    if (!rng.bernoulli(detour_rate)) continue;

    std::vector<NodeId> excursion;
    std::set<NodeId> used;
    NodeId at = v;
    for (int d = 0; d < depth; ++d) {
      std::vector<NodeId> options;
      for (const Edge& e : env.neighbors(at)) {
        if (!on_path.contains(e.to) && !used.contains(e.to)) options.push_back(e.to);
      }
      if (options.empty()) break;
      at = options[rng.index(options.size())];
      used.insert(at);
      excursion.push_back(at);
    }
    for (NodeId x : excursion) demo.push_back({x, label(x)});
    for (std::size_t k = excursion.size(); k-- > 1;) demo.push_back({excursion[k - 1], label(excursion[k - 1])});
    if (!excursion.empty()) demo.push_back({v, label(v)});
  }
  return demo;
}

enum class AugmentKind { GroundTruth, GroundTruthPrefix, RandomWalk, Detoured, BranchOff };

inline std::string_view to_string(AugmentKind k) {
  switch (k) {
    case AugmentKind::GroundTruth: return "gt";
    case AugmentKind::GroundTruthPrefix: return "gt_prefix";
    case AugmentKind::RandomWalk: return "random_walk";
    case AugmentKind::Detoured: return "detoured";
    case AugmentKind::BranchOff: return "branch_off";
  }
  return "?";
}

struct AugmentedTrajectory {
  int episode_index = 0;  // position in the episode list passed in
  AugmentKind kind = AugmentKind::GroundTruth;
  std::vector<NodeId> nodes;

  friend bool operator==(const AugmentedTrajectory&, const AugmentedTrajectory&) = default;
};

namespace detail {

/// Extends `path` by a random walk that avoids immediate backtracking when it can.
inline void random_walk(const EnvGraph& env, std::vector<NodeId>& path, std::size_t target_len, Rng& rng) {
  while (path.size() < target_len) {
    const NodeId at = path.back();
    const auto& adj = env.neighbors(at);
    if (adj.empty()) break;
    std::vector<NodeId> options;
    for (const Edge& e : adj) {
      if (path.size() < 2 || e.to != path[path.size() - 2]) options.push_back(e.to);
    }
    if (options.empty()) options.push_back(adj.front().to);
    path.push_back(options[rng.index(options.size())]);
  }
}

}  // namespace detail

/// Perturbed versions of each episode's ground-truth path, all starting at
/// the episode start and at most max_hops nodes long. Per episode the first
/// sample is the ground truth itself (truncated to max_hops), then the kinds
/// cycle through prefixes, random walks, detoured paths and paths that
/// leave the ground truth part way.
inline std::vector<AugmentedTrajectory> augment_trajectories(const EnvGraph& env, std::span<const Episode> episodes,
                                                             std::uint64_t seed, int per_episode, int max_hops = 15) {
  if (per_episode < 1) throw ConfigError("per_episode must be at least 1");
  if (max_hops < 1) throw ConfigError("max_hops must be at least 1");
  const auto cap = static_cast<std::size_t>(max_hops);
  std::vector<AugmentedTrajectory> out;
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const Episode& ep = episodes[e];
    Rng rng(derive_seed(seed, SeedScope::Augmentation, e));
    const auto& gt = ep.gt_path;
    for (int i = 0; i < per_episode; ++i) {
      AugmentedTrajectory traj;
      traj.episode_index = static_cast<int>(e);
      const int kind = i == 0 ? 0 : 1 + (i - 1) % 4;
      switch (kind) {
        case 0:
          traj.kind = AugmentKind::GroundTruth;
          traj.nodes.assign(gt.begin(), gt.begin() + static_cast<std::ptrdiff_t>(std::min(gt.size(), cap)));
          break;
        case 1: {
          traj.kind = AugmentKind::GroundTruthPrefix;
          const std::size_t len = 1 + rng.index(std::min(gt.size(), cap));
          traj.nodes.assign(gt.begin(), gt.begin() + static_cast<std::ptrdiff_t>(len));
          break;
        }
        case 2: {
          traj.kind = AugmentKind::RandomWalk;
          traj.nodes = {ep.start};
          detail::random_walk(env, traj.nodes, 1 + rng.index(cap), rng);
          break;
        }
        case 3: {
          traj.kind = AugmentKind::Detoured;
          const auto demo = generate_detour_demo(env, ep, rng.next(), 0.5, 1 + static_cast<int>(rng.index(2)));
          for (const auto& step : demo) traj.nodes.push_back(step.node);
          if (traj.nodes.size() > cap) traj.nodes.resize(cap);
          break;
        }
        default: {
          traj.kind = AugmentKind::BranchOff;
          const std::size_t keep = 1 + rng.index(std::min(gt.size(), cap));
          traj.nodes.assign(gt.begin(), gt.begin() + static_cast<std::ptrdiff_t>(keep));
          const std::size_t extra = 1 + rng.index(cap);
          detail::random_walk(env, traj.nodes, std::min(cap, keep + extra), rng);
          break;
        }
      }
      out.push_back(std::move(traj));
    }
  }
  return out;
}

/// All prefixes (v1), (v1, v2), ..., (v1, ..., vt) in increasing length.
inline std::vector<std::vector<NodeId>> expand_prefixes(std::span<const NodeId> trajectory) {
  if (trajectory.empty()) throw EmptyInput("expand_prefixes of an empty trajectory");
  std::vector<std::vector<NodeId>> out;
  out.reserve(trajectory.size());
  for (std::size_t len = 1; len <= trajectory.size(); ++len) {
    out.emplace_back(trajectory.begin(), trajectory.begin() + static_cast<std::ptrdiff_t>(len));
  }
  return out;
}

}  // namespace specnav
