#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "specnav/graph_search.hpp"
#include "specnav/sos_features.hpp"
#include "specnav/types.hpp"

namespace specnav {

/// What the agent perceives of one viewpoint.
struct NodeObservation {
  NodeId id = 0;
  Vec2 position;
  SosFeature feature;
  std::vector<double> category_histogram;  // visible object count per category
};

/// Agent-side map built while moving: visited viewpoints, observed but
/// unvisited frontier viewpoints, and only the edges seen so far.
class TopoMap {
 public:
  struct NodeRecord {
    Vec2 position;
    SosFeature feature;
    std::vector<double> category_histogram;
    bool visited = false;
    int last_visit = -1;
  };

  /// Marks `current` visited at timestep t, records its neighbors as
  /// frontier when unvisited, and stores the edges current-neighbor.
  /// Observations overwrite earlier ones for the same node.
  void update(const NodeObservation& current, std::span<const NodeObservation> neighbors, int t) {
    NodeRecord& cur = record(current);
    cur.visited = true;
    cur.last_visit = t;
    frontier_.erase(current.id);
    visited_.insert(current.id);
    for (const NodeObservation& n : neighbors) {
      if (n.id == current.id) continue;
      NodeRecord& rec = record(n);
      if (!rec.visited) frontier_.insert(n.id);
      add_edge(current.id, n.id, distance(cur.position, rec.position));
    }
  }

  void mark_chosen(NodeId v) { chosen_.insert(v); }

  /// Frontier nodes never selected as a local goal, in id order.
  std::vector<NodeId> frontier_candidates() const {
    std::vector<NodeId> out;
    for (NodeId v : frontier_) {
      if (!chosen_.contains(v)) out.push_back(v);
    }
    return out;
  }

  PathResult shortest_path(NodeId from, NodeId to) const { return lexicographic_shortest_path(*this, from, to); }

  bool contains(NodeId v) const { return nodes_.contains(v); }
  const std::vector<Edge>& neighbors(NodeId v) const {
    static const std::vector<Edge> kNone;
    const auto it = adjacency_.find(v);
    return it == adjacency_.end() ? kNone : it->second;
  }

  bool is_visited(NodeId v) const { return visited_.contains(v); }
  bool is_frontier(NodeId v) const { return frontier_.contains(v); }
  bool was_chosen(NodeId v) const { return chosen_.contains(v); }
  const std::set<NodeId>& visited() const { return visited_; }
  const std::set<NodeId>& frontier() const { return frontier_; }
  const std::set<NodeId>& chosen_history() const { return chosen_; }
  const NodeRecord& node(NodeId v) const { return nodes_.at(v); }
  const SosFeature& feature(NodeId v) const { return nodes_.at(v).feature; }
  int last_visit(NodeId v) const { return nodes_.at(v).last_visit; }
  std::size_t node_count() const { return nodes_.size(); }

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (const auto& [v, adj] : adjacency_) total += adj.size();
    return total / 2;
  }

  /// Returns the first violated invariant, if any.
  std::optional<std::string> check_invariants() const {
    for (NodeId v : frontier_) {
      if (visited_.contains(v)) return "node " + std::to_string(v) + " both visited and frontier";
      const auto& adj = neighbors(v);
      const bool anchored = std::any_of(adj.begin(), adj.end(), [&](const Edge& e) { return visited_.contains(e.to); });
      if (!anchored) return "frontier node " + std::to_string(v) + " has no visited neighbor";
    }
    for (NodeId v : visited_) {
      if (!nodes_.contains(v)) return "visited node without features";
    }
    for (NodeId v : frontier_) {
      if (!nodes_.contains(v)) return "frontier node without features";
    }
    return std::nullopt;
  }

  /// Clears everything, including the local-goal history.
  void reset() { *this = TopoMap{}; }

 private:
  NodeRecord& record(const NodeObservation& obs) {
    NodeRecord& rec = nodes_[obs.id];
    rec.position = obs.position;
    rec.feature = obs.feature;
    rec.category_histogram = obs.category_histogram;
    return rec;
  }

  void add_edge(NodeId a, NodeId b, double w) {
    auto insert = [](std::vector<Edge>& adj, Edge e) {
      auto it = std::lower_bound(adj.begin(), adj.end(), e.to, [](const Edge& x, NodeId id) { return x.to < id; });
      if (it != adj.end() && it->to == e.to) {
        it->weight = e.weight;
      } else {
        adj.insert(it, e);
      }
    };
    insert(adjacency_[a], {b, w});
    insert(adjacency_[b], {a, w});
  }

  std::map<NodeId, NodeRecord> nodes_;
  std::map<NodeId, std::vector<Edge>> adjacency_;
  std::set<NodeId> visited_;
  std::set<NodeId> frontier_;
  std::set<NodeId> chosen_;
};

}  // namespace specnav
