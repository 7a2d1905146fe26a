#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "specnav/types.hpp"

namespace specnav {

struct Edge {
  NodeId to = 0;
  double weight = 0.0;
};

struct PathResult {
  std::vector<NodeId> nodes;
  double length = 0.0;
};

// Relative slack when deciding that two path lengths tie. Edge weights are
// Euclidean distances, so sums of the same edges in different orders can
// differ in the last bits.
inline constexpr double kPathTieTolerance = 1e-9;

/// Graph concept used by the search routines: neighbors(v) yields edges
/// sorted by target id; contains(v) tells whether v is a node.
template <class G>
concept SearchGraph = requires(const G& g, NodeId v) {
  { g.contains(v) } -> std::convertible_to<bool>;
  { g.neighbors(v) } -> std::convertible_to<const std::vector<Edge>&>;
};

/// Single-source shortest path distances. Unreachable nodes are absent.
template <SearchGraph G>
std::map<NodeId, double> dijkstra_distances(const G& graph, NodeId source) {
  std::map<NodeId, double> dist;
  if (!graph.contains(source)) return dist;
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const Edge& e : graph.neighbors(v)) {
      const double nd = d + e.weight;
      auto it = dist.find(e.to);
      if (it == dist.end() || nd < it->second) {
        dist[e.to] = nd;
        queue.emplace(nd, e.to);
      }
    }
  }
  return dist;
}

/// Minimal-weight path from `from` to `to`; among equal-length paths the one
/// with the lexicographically smallest node-id sequence.
///
/// Runs Dijkstra from the target, then walks forward from the source always
/// taking the smallest-id neighbor that stays on some shortest path. A greedy
/// smallest-first walk over the shortest-path DAG yields the lexicographic
/// minimum, and every suffix of the result is itself the tie-broken shortest
/// path from its first node.
template <SearchGraph G>
PathResult lexicographic_shortest_path(const G& graph, NodeId from, NodeId to) {
  if (!graph.contains(from) || !graph.contains(to)) {
    throw NoPath("unknown node in path query " + std::to_string(from) + " -> " + std::to_string(to));
  }
  if (from == to) return {{from}, 0.0};
  const auto to_target = dijkstra_distances(graph, to);
  const auto start = to_target.find(from);
  if (start == to_target.end()) {
    throw NoPath("no path " + std::to_string(from) + " -> " + std::to_string(to));
  }
  PathResult result;
  result.nodes.push_back(from);
  NodeId v = from;
  while (v != to) {
    const double dv = to_target.at(v);
    const double slack = kPathTieTolerance * std::max(1.0, dv);
    NodeId next = v;
    double step = 0.0;
    for (const Edge& e : graph.neighbors(v)) {
      const auto it = to_target.find(e.to);
      if (it == to_target.end()) continue;
      if (std::abs(e.weight + it->second - dv) <= slack && it->second < dv) {
        next = e.to;
        step = e.weight;
        break;  // neighbors are sorted by id
      }
    }
    if (next == v) throw NoPath("shortest path reconstruction failed");
    result.nodes.push_back(next);
    result.length += step;
    v = next;
  }
  return result;
}

}  // namespace specnav
