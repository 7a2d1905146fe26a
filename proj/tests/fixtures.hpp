#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "specnav/controller.hpp"
#include "specnav/env_model.hpp"
#include "specnav/rng.hpp"
#include "specnav/topo_map.hpp"

namespace fixture {

using namespace specnav;

/// Observation with `boxes` random rectangles spread over K category masks.
inline PanoObservation random_observation(Rng& rng, int K, int rows, int cols, int boxes) {
  PanoObservation obs;
  obs.masks.assign(static_cast<std::size_t>(K), BinaryMask(rows, cols));
  for (int b = 0; b < boxes; ++b) {
    PanoBox box;
    box.category = static_cast<int>(rng.index(static_cast<std::size_t>(K)));
    box.col_start = static_cast<int>(rng.index(static_cast<std::size_t>(cols)));
    box.width = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(cols)));
    box.row_start = static_cast<int>(rng.index(static_cast<std::size_t>(rows)));
    box.height = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(rows - box.row_start)));
    paint_box(obs.masks[static_cast<std::size_t>(box.category)], box);
    obs.boxes.push_back(box);
  }
  return obs;
}

/// Mask with independent random bits.
inline BinaryMask random_mask(Rng& rng, int rows, int cols, double density = 0.4) {
  BinaryMask m(rows, cols);
  for (auto& v : m.data) v = rng.bernoulli(density) ? 1 : 0;
  return m;
}

/// Nodes on distinct points of a small integer lattice (so equal-length
/// alternatives are common), a random spanning tree and some extra edges.
inline EnvGraph random_lattice_graph(std::uint64_t seed, int n, double extra_edge_probability = 0.35) {
  Rng rng(seed);
  std::vector<Vec2> points;
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 3; ++y) points.push_back({static_cast<double>(x), static_cast<double>(y)});
  }
  rng.shuffle(points);
  EnvGraph env("lattice-" + std::to_string(seed), 3, {16, 8});
  for (int i = 0; i < n; ++i) env.add_node(points[static_cast<std::size_t>(i)]);
  for (int i = 1; i < n; ++i) env.add_edge(i, static_cast<NodeId>(rng.index(static_cast<std::size_t>(i))));
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (!env.has_edge(a, b) && rng.bernoulli(extra_edge_probability)) env.add_edge(a, b);
    }
  }
  return env;
}

inline NodeObservation bare_observation(const EnvGraph& env, NodeId v) {
  return {v, env.position(v), SosFeature(1, 1), {}};
}

/// Map that has visited every node of a connected graph.
inline TopoMap full_map(const EnvGraph& env) {
  TopoMap map;
  for (std::size_t v = 0; v < env.node_count(); ++v) {
    const auto id = static_cast<NodeId>(v);
    std::vector<NodeObservation> nbrs;
    for (const Edge& e : env.neighbors(id)) nbrs.push_back(bare_observation(env, e.to));
    map.update(bare_observation(env, id), nbrs, static_cast<int>(v));
  }
  return map;
}

inline void visit(TopoMap& map, const EnvGraph& env, NodeId v, int t) {
  std::vector<NodeObservation> nbrs;
  for (const Edge& e : env.neighbors(v)) nbrs.push_back(bare_observation(env, e.to));
  map.update(bare_observation(env, v), nbrs, t);
}

/// Straight chain 0-1-...-(n-1) along x with the given gaps.
inline EnvGraph chain(const std::vector<double>& gaps, int K = 3) {
  EnvGraph env("chain", K, {16, 8});
  double x = 0.0;
  env.add_node({0.0, 0.0});
  for (double g : gaps) {
    x += g;
    const NodeId v = env.add_node({x, 0.0});
    env.add_edge(v - 1, v);
  }
  return env;
}

/// Object of `category` placed right next to node v (seen from nowhere else).
inline void mark(EnvGraph& env, NodeId v, int category, double width = 1.0) {
  const Vec2 p = env.position(v);
  env.add_object({category, {p.x + 0.5, p.y}, width, 1.0, 0.9});
}

}  // namespace fixture
