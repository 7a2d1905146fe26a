#pragma once

// Two-candidate "entering a room" scenarios: the agent has walked through
// viewpoints showing the first instruction tokens in order and must pick
// between a candidate showing the next token and one that breaks the order.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "specnav/env_model.hpp"
#include "specnav/nav_scoring.hpp"
#include "specnav/rng.hpp"
#include "specnav/sos_features.hpp"

namespace specnav {

struct ToyParams {
  int category_count = 12;
  PanoDims pano{256, 64};
  int eta = 64;
  int token_count = 3;               // path shows tokens[0..B-2], candidate A shows tokens[B-1]
  double clutter_probability = 0.3;  // chance of one unrelated object at each viewpoint
  double repeat_probability = 0.5;   // chance that B repeats an earlier token instead of an unrelated category
};

struct ToyScenario {
  EnvGraph env;
  Instruction instruction;
  std::vector<NodeId> path;  // walked so far, ends where the choice is made
  NodeId aligned = -1;       // extends the instruction order
  NodeId misaligned = -1;    // breaks it
  int eta = 0;
  CategoryStats stats;

  std::vector<SosFeature> references() const {
    return reference_sos_list(instruction.tokens, stats, eta, env.category_count());
  }

  SosFeature feature(NodeId v) const { return compute_sos(render_pano(env, v), eta); }

  std::vector<SosFeature> trajectory_features(NodeId candidate) const {
    std::vector<SosFeature> feats;
    for (NodeId v : path) feats.push_back(feature(v));
    feats.push_back(feature(candidate));
    return feats;
  }

  double score_through(NodeId candidate) const { return nav_score(references(), trajectory_features(candidate)); }
};

inline ToyScenario make_toy_scenario(std::uint64_t seed, const ToyParams& params = {}) {
  if (params.token_count < 2 || params.token_count > params.category_count - 1) {
    throw ConfigError("toy scenario needs 2 <= token_count < category_count");
  }
  Rng rng(seed);
  std::vector<int> cats(static_cast<std::size_t>(params.category_count));
  std::iota(cats.begin(), cats.end(), 0);
  rng.shuffle(cats);
  const std::vector<int> tokens(cats.begin(), cats.begin() + params.token_count);
  const std::vector<int> others(cats.begin() + params.token_count, cats.end());

  ToyScenario sc;
  sc.env = EnvGraph("toy-" + std::to_string(seed), params.category_count, params.pano);
  sc.eta = params.eta;
  sc.instruction.tokens = tokens;
  sc.instruction.target = tokens.back();

  constexpr double kStride = 6.0;
  for (int i = 0; i + 1 < params.token_count; ++i) {
    sc.path.push_back(sc.env.add_node({kStride * i, 0.0}));
    if (i > 0) sc.env.add_edge(sc.path[static_cast<std::size_t>(i - 1)], sc.path.back());
  }
  const double x = kStride * (params.token_count - 1);
  sc.aligned = sc.env.add_node({x, kStride / 2.0});
  sc.misaligned = sc.env.add_node({x, -kStride / 2.0});
  sc.env.add_edge(sc.path.back(), sc.aligned);
  sc.env.add_edge(sc.path.back(), sc.misaligned);

  auto scatter = [&](NodeId node, int category, int count, double min_w, double max_w) {
    const Vec2 at = sc.env.position(node);
    for (int i = 0; i < count; ++i) {
      const double r = rng.uniform(0.8, 2.0);
      const double heading = rng.uniform(0.0, kTwoPi);
      PlacedObject obj;
      obj.category = category;
      obj.position = {at.x + r * std::cos(heading), at.y + r * std::sin(heading)};
      obj.width_m = rng.uniform(min_w, max_w);
      obj.height_m = rng.uniform(0.5, 2.0);
      obj.visibility_radius = 2.5;
      sc.env.add_object(obj);
    }
  };

  int breaking = others[rng.index(others.size())];
  if (rng.bernoulli(params.repeat_probability)) {
    breaking = tokens[rng.index(tokens.size() - 1)];
  }
  for (std::size_t i = 0; i < sc.path.size(); ++i) scatter(sc.path[i], tokens[i], rng.range(1, 3), 0.6, 2.0);
  scatter(sc.aligned, tokens.back(), rng.range(1, 3), 0.6, 2.0);
  scatter(sc.misaligned, breaking, rng.range(1, 3), 0.6, 2.0);
  for (std::size_t v = 0; v < sc.env.node_count(); ++v) {
    if (rng.bernoulli(params.clutter_probability)) {
      scatter(static_cast<NodeId>(v), others[rng.index(others.size())], 1, 0.3, 1.0);
    }
  }
  sc.stats = collect_category_stats(sc.env);
  return sc;
}

}  // namespace specnav
