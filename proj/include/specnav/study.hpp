#pragma once

// How well the navigation score of a trajectory tracks its distance-based
// agreement with the ground truth, over augmented and prefix-expanded sets.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "specnav/controller.hpp"
#include "specnav/data_aug.hpp"
#include "specnav/stats.hpp"

namespace specnav {

struct ScoreNdsPoint {
  int episode_id = 0;
  AugmentKind kind = AugmentKind::GroundTruth;
  std::vector<NodeId> nodes;
  double nav_score = 0.0;
  double nds = 0.0;
};

struct ScoreNdsStudy {
  std::vector<ScoreNdsPoint> points;
  double spearman = 0.0;
};

inline std::vector<ScoreNdsPoint> score_nds_points(const World& world, std::span<const Episode> episodes,
                                                   std::span<const AugmentedTrajectory> trajectories) {
  std::vector<ScoreNdsPoint> points;
  for (const auto& traj : trajectories) {
    const Episode& ep = episodes[static_cast<std::size_t>(traj.episode_index)];
    const auto refs = world.references(ep.instruction);
    for (auto& prefix : expand_prefixes(traj.nodes)) {
      ScoreNdsPoint p;
      p.episode_id = ep.id;
      p.kind = traj.kind;
      p.nav_score = nav_score(refs, world.features(prefix));
      p.nds = nds(ep.gt_path, prefix, world.distances(), ep.d_success);
      p.nodes = std::move(prefix);
      points.push_back(std::move(p));
    }
  }
  return points;
}

inline double points_spearman(std::span<const ScoreNdsPoint> points) {
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    xs.push_back(p.nav_score);
    ys.push_back(p.nds);
  }
  return spearman(xs, ys);
}

inline ScoreNdsStudy score_nds_study(const World& world, std::span<const Episode> episodes, std::uint64_t seed,
                                     int per_episode = 5, int max_hops = 15) {
  if (episodes.empty()) throw EmptyInput("score/nDS study needs at least one episode");
  const auto trajs = augment_trajectories(world.env(), episodes, seed, per_episode, max_hops);
  ScoreNdsStudy study;
  study.points = score_nds_points(world, episodes, trajs);
  study.spearman = points_spearman(study.points);
  return study;
}

}  // namespace specnav
