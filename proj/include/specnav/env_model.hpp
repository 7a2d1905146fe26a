#pragma once

// Simulated navigation environments: an undirected graph of viewpoints with
// physical objects around them, equirectangular mask rendering, and seeded
// generation of environments and instruction-following episodes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "specnav/graph_search.hpp"
#include "specnav/rng.hpp"
#include "specnav/types.hpp"

namespace specnav {

struct PlacedObject {
  int category = 0;
  Vec2 position;
  double width_m = 1.0;
  double height_m = 1.0;
  double visibility_radius = 5.0;
};

struct PanoDims {
  int width = 256;
  int height = 64;

  friend bool operator==(const PanoDims&, const PanoDims&) = default;
};

class EnvGraph {
 public:
  EnvGraph() = default;
  EnvGraph(std::string env_id, int category_count, PanoDims pano)
      : env_id_(std::move(env_id)), category_count_(category_count), pano_(pano) {
    if (category_count_ <= 0) throw ConfigError("category count must be positive");
    if (pano_.width <= 0 || pano_.height <= 0) throw ConfigError("panorama dimensions must be positive");
  }

  NodeId add_node(Vec2 position) {
    positions_.push_back(position);
    adjacency_.emplace_back();
    return static_cast<NodeId>(positions_.size() - 1);
  }

  /// Adds the undirected edge a-b weighted by the Euclidean distance between
  /// the endpoints. Self loops are rejected; repeated edges are ignored.
  void add_edge(NodeId a, NodeId b) {
    if (!contains(a) || !contains(b)) throw ConfigError("edge endpoint out of range");
    if (a == b) throw ConfigError("self loop at node " + std::to_string(a));
    if (has_edge(a, b)) return;
    const double w = distance(positions_[a], positions_[b]);
    if (!(w > 0.0)) throw ConfigError("coincident nodes cannot be joined");
    insert_sorted(adjacency_[a], {b, w});
    insert_sorted(adjacency_[b], {a, w});
  }

  void add_object(const PlacedObject& object) {
    if (object.category < 0 || object.category >= category_count_) {
      throw ConfigError("object category out of range");
    }
    if (!(object.width_m > 0.0) || !(object.height_m > 0.0) || !(object.visibility_radius > 0.0)) {
      throw ConfigError("object extents and visibility radius must be positive");
    }
    objects_.push_back(object);
  }

  const std::string& env_id() const { return env_id_; }
  int category_count() const { return category_count_; }
  PanoDims pano_dims() const { return pano_; }
  std::size_t node_count() const { return positions_.size(); }
  bool contains(NodeId v) const { return v >= 0 && static_cast<std::size_t>(v) < positions_.size(); }
  Vec2 position(NodeId v) const { return positions_.at(static_cast<std::size_t>(v)); }
  const std::vector<Edge>& neighbors(NodeId v) const { return adjacency_.at(static_cast<std::size_t>(v)); }
  const std::vector<PlacedObject>& objects() const { return objects_; }

  bool has_edge(NodeId a, NodeId b) const {
    if (!contains(a) || !contains(b)) return false;
    const auto& adj = adjacency_[a];
    return std::any_of(adj.begin(), adj.end(), [b](const Edge& e) { return e.to == b; });
  }

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (const auto& adj : adjacency_) total += adj.size();
    return total / 2;
  }

  bool is_connected() const {
    if (positions_.empty()) return true;
    std::vector<char> seen(positions_.size(), 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (const Edge& e : adjacency_[v]) {
        if (!seen[e.to]) {
          seen[e.to] = 1;
          ++count;
          stack.push_back(e.to);
        }
      }
    }
    return count == positions_.size();
  }

  /// Checks every structural invariant; returns a description of the first
  /// violation, or nullopt when the graph is well formed.
  std::optional<std::string> validate() const {
    for (std::size_t a = 0; a < adjacency_.size(); ++a) {
      for (const Edge& e : adjacency_[a]) {
        if (!contains(e.to)) return "edge to unknown node";
        if (e.to == static_cast<NodeId>(a)) return "self loop";
        if (!(e.weight > 0.0)) return "non-positive edge weight";
        if (std::abs(e.weight - distance(positions_[a], positions_[e.to])) > 1e-9) {
          return "edge weight differs from endpoint distance";
        }
        const auto& back = adjacency_[e.to];
        const bool symmetric = std::any_of(back.begin(), back.end(), [&](const Edge& r) {
          return r.to == static_cast<NodeId>(a) && r.weight == e.weight;
        });
        if (!symmetric) return "asymmetric adjacency";
      }
    }
    for (const auto& obj : objects_) {
      if (obj.category < 0 || obj.category >= category_count_) return "object category out of range";
    }
    if (!is_connected()) return "graph is not connected";
    return std::nullopt;
  }

 private:
  static void insert_sorted(std::vector<Edge>& adj, Edge edge) {
    auto it = std::lower_bound(adj.begin(), adj.end(), edge.to,
                               [](const Edge& e, NodeId id) { return e.to < id; });
    adj.insert(it, edge);
  }

  std::string env_id_;
  int category_count_ = 1;
  PanoDims pano_;
  std::vector<Vec2> positions_;
  std::vector<std::vector<Edge>> adjacency_;
  std::vector<PlacedObject> objects_;
};

// ---------------------------------------------------------------------------
// Panoramic masks

struct BinaryMask {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}

  std::uint8_t& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  std::uint8_t at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  std::size_t area() const { return static_cast<std::size_t>(std::count(data.begin(), data.end(), 1)); }
  bool empty() const { return std::none_of(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; }); }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// One rendered object: a column span that may wrap past the seam, and a row span.
struct PanoBox {
  int category = 0;
  int col_start = 0;  // in [0, W)
  int width = 1;      // columns, wraps modulo W
  int row_start = 0;
  int height = 1;
};

struct PanoObservation {
  std::vector<BinaryMask> masks;  // one per category, H x W
  std::vector<PanoBox> boxes;     // per-object boxes before merging

  int category_count() const { return static_cast<int>(masks.size()); }
};

inline constexpr double kCameraHeight = 1.5;
inline constexpr double kMinObjectDistance = 0.05;

namespace detail {

inline long round_half_up(double x) { return static_cast<long>(std::floor(x + 0.5)); }

inline double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

inline int wrap_column(long c, int width) {
  long m = c % width;
  if (m < 0) m += width;
  return static_cast<int>(m);
}

}  // namespace detail

/// Equirectangular box of an object seen from `viewpoint`. Heading 0 (the +x
/// direction) maps to column 0 and headings grow with the column index; the
/// vertical axis spans elevations +pi/2 (row 0) to -pi/2 (row H).
inline PanoBox project_object(const PlacedObject& obj, Vec2 viewpoint, PanoDims dims) {
  const double dx = obj.position.x - viewpoint.x;
  const double dy = obj.position.y - viewpoint.y;
  const double d = std::max(std::hypot(dx, dy), kMinObjectDistance);
  const double heading = detail::wrap_angle(std::atan2(dy, dx));
  const double center = heading / kTwoPi * dims.width;

  const double angular_width = 2.0 * std::atan(obj.width_m / (2.0 * d));
  const long width = std::clamp(detail::round_half_up(angular_width / kTwoPi * dims.width), 1L,
                                static_cast<long>(dims.width));
  const long start = detail::round_half_up(center - static_cast<double>(width) / 2.0);

  const double top = std::atan2(obj.height_m - kCameraHeight, d);
  const double bottom = std::atan2(-kCameraHeight, d);
  auto to_row = [&](double elevation) {
    return std::clamp(detail::round_half_up((kPi / 2.0 - elevation) / kPi * dims.height), 0L,
                      static_cast<long>(dims.height));
  };
  long row_top = to_row(top);
  long row_bottom = to_row(bottom);
  if (row_bottom <= row_top) {
    if (row_top >= dims.height) row_top = dims.height - 1;
    row_bottom = row_top + 1;
  }

  PanoBox box;
  box.category = obj.category;
  box.col_start = detail::wrap_column(start, dims.width);
  box.width = static_cast<int>(width);
  box.row_start = static_cast<int>(row_top);
  box.height = static_cast<int>(row_bottom - row_top);
  return box;
}

inline void paint_box(BinaryMask& mask, const PanoBox& box) {
  for (int r = box.row_start; r < box.row_start + box.height; ++r) {
    for (int c = 0; c < box.width; ++c) {
      mask.at(r, (box.col_start + c) % mask.cols) = 1;
    }
  }
}

/// Renders per-category panoramic masks at a viewpoint position. Objects
/// farther than their visibility radius are invisible; there is no occlusion.
inline PanoObservation render_pano_at(const EnvGraph& env, Vec2 viewpoint) {
  const PanoDims dims = env.pano_dims();
  PanoObservation obs;
  obs.masks.assign(static_cast<std::size_t>(env.category_count()), BinaryMask(dims.height, dims.width));
  for (const PlacedObject& obj : env.objects()) {
    if (distance(obj.position, viewpoint) > obj.visibility_radius) continue;
    PanoBox box = project_object(obj, viewpoint, dims);
    paint_box(obs.masks[static_cast<std::size_t>(obj.category)], box);
    obs.boxes.push_back(box);
  }
  return obs;
}

inline PanoObservation render_pano(const EnvGraph& env, NodeId node) {
  if (!env.contains(node)) throw ConfigError("render_pano: unknown node " + std::to_string(node));
  return render_pano_at(env, env.position(node));
}

/// Category with the largest mask area; ties go to the smaller index.
/// Returns -1 when nothing is visible.
inline int dominant_category(const PanoObservation& obs) {
  int best = -1;
  std::size_t best_area = 0;
  for (int k = 0; k < obs.category_count(); ++k) {
    const std::size_t area = obs.masks[static_cast<std::size_t>(k)].area();
    if (area > best_area) {
      best_area = area;
      best = k;
    }
  }
  return best;
}

inline std::vector<int> visible_categories(const PanoObservation& obs) {
  std::vector<int> out;
  for (int k = 0; k < obs.category_count(); ++k) {
    if (!obs.masks[static_cast<std::size_t>(k)].empty()) out.push_back(k);
  }
  return out;
}

/// Number of visible object instances per category.
inline std::vector<double> category_histogram(const PanoObservation& obs) {
  std::vector<double> hist(static_cast<std::size_t>(obs.category_count()), 0.0);
  for (const PanoBox& b : obs.boxes) hist[static_cast<std::size_t>(b.category)] += 1.0;
  return hist;
}

// ---------------------------------------------------------------------------
// Geodesic distances

inline double geodesic_distance(const EnvGraph& env, NodeId a, NodeId b) {
  if (!env.contains(a) || !env.contains(b)) throw ConfigError("geodesic_distance: unknown node");
  if (a == b) return 0.0;
  const auto dist = dijkstra_distances(env, a);
  const auto it = dist.find(b);
  if (it == dist.end()) throw NoPath("no path " + std::to_string(a) + " -> " + std::to_string(b));
  return it->second;
}

inline PathResult env_shortest_path(const EnvGraph& env, NodeId a, NodeId b) {
  return lexicographic_shortest_path(env, a, b);
}

/// All-pairs geodesic distances, precomputed once per environment.
class DistanceTable {
 public:
  DistanceTable() = default;
  explicit DistanceTable(const EnvGraph& env) : n_(env.node_count()) {
    dist_.assign(n_ * n_, std::numeric_limits<double>::infinity());
    for (std::size_t a = 0; a < n_; ++a) {
      for (const auto& [b, d] : dijkstra_distances(env, static_cast<NodeId>(a))) {
        dist_[a * n_ + static_cast<std::size_t>(b)] = d;
      }
    }
  }

  std::size_t size() const { return n_; }

  double operator()(NodeId a, NodeId b) const {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n_ || static_cast<std::size_t>(b) >= n_) {
      throw ConfigError("distance query for unknown node");
    }
    const double d = dist_[static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)];
    if (std::isinf(d)) throw NoPath("no path " + std::to_string(a) + " -> " + std::to_string(b));
    return d;
  }

  bool reachable(NodeId a, NodeId b) const {
    return !std::isinf(dist_[static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)]);
  }

  /// First step of the tie-broken shortest path from `from` to `to`, using
  /// the same smallest-id rule as lexicographic_shortest_path.
  NodeId next_hop(const EnvGraph& env, NodeId from, NodeId to) const {
    if (from == to) return from;
    const double dv = (*this)(from, to);
    const double slack = kPathTieTolerance * std::max(1.0, dv);
    for (const Edge& e : env.neighbors(from)) {
      if (!reachable(e.to, to)) continue;
      const double du = (*this)(e.to, to);
      if (std::abs(e.weight + du - dv) <= slack && du < dv) return e.to;
    }
    throw NoPath("next hop reconstruction failed");
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> dist_;
};

/// Number of edges on the tie-broken shortest path.
inline int hop_count(const PathResult& path) { return static_cast<int>(path.nodes.size()) - 1; }

// ---------------------------------------------------------------------------
// Procedural generation

struct GeneratorParams {
  int node_count = 40;
  int room_count = 6;
  int category_count = 12;
  PanoDims pano{256, 64};
  double node_spacing = 2.5;   // meters between neighboring viewpoints in a room
  double room_spacing = 12.0;  // meters between room centers
  int dominant_objects_per_room = 3;
  int clutter_objects_per_room = 2;
  double visibility_radius = 6.0;
  int extra_corridors = 1;

  void validate() const {
    if (node_count < 4) throw ConfigError("node_count must be at least 4");
    if (category_count < 3) throw ConfigError("category_count must be at least 3");
    if (room_count < 2) throw ConfigError("room_count must be at least 2");
    if (node_count < room_count) throw ConfigError("node_count must be at least room_count");
    if (pano.width < 2 || pano.height < 1) throw ConfigError("panorama dimensions too small");
    if (!(node_spacing > 0.0) || !(room_spacing > 0.0)) throw ConfigError("spacings must be positive");
    if (dominant_objects_per_room < 1 || clutter_objects_per_room < 0) {
      throw ConfigError("object counts out of range");
    }
    if (!(visibility_radius > 0.0)) throw ConfigError("visibility radius must be positive");
    if (extra_corridors < 0) throw ConfigError("extra_corridors must be non-negative");
  }
};

namespace detail {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

inline std::pair<NodeId, NodeId> closest_pair(const EnvGraph& env, const std::vector<NodeId>& a,
                                              const std::vector<NodeId>& b) {
  std::pair<NodeId, NodeId> best{a.front(), b.front()};
  double best_d = std::numeric_limits<double>::infinity();
  for (NodeId u : a) {
    for (NodeId v : b) {
      const double d = distance(env.position(u), env.position(v));
      if (d < best_d) {
        best_d = d;
        best = {u, v};
      }
    }
  }
  return best;
}

}  // namespace detail

/// Builds a connected environment of rooms laid out on a square grid. Each
/// room is a jittered grid of viewpoints, joined to its grid neighbors by
/// corridor edges along a random spanning tree (plus a few extra loops).
/// Rooms get distinct dominant object categories while enough categories
/// exist, and a few smaller clutter objects of other categories.
inline EnvGraph generate_env(std::uint64_t seed, const GeneratorParams& params,
                             std::string env_id = {}) {
  params.validate();
  Rng rng(seed);
  if (env_id.empty()) env_id = "env-" + std::to_string(seed);
  EnvGraph env(std::move(env_id), params.category_count, params.pano);

  const int rooms = params.room_count;
  const int grid_cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(rooms))));
  std::vector<Vec2> centers;
  for (int r = 0; r < rooms; ++r) {
    centers.push_back({(r % grid_cols) * params.room_spacing, (r / grid_cols) * params.room_spacing});
  }

  // Viewpoints.
  std::vector<std::vector<NodeId>> room_nodes(static_cast<std::size_t>(rooms));
  for (int r = 0; r < rooms; ++r) {
    const int count = params.node_count / rooms + (r < params.node_count % rooms ? 1 : 0);
    const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    const double jitter = 0.15 * params.node_spacing;
    for (int i = 0; i < count; ++i) {
      const double gx = (i % side - (side - 1) / 2.0) * params.node_spacing;
      const double gy = (i / side - (side - 1) / 2.0) * params.node_spacing;
      const Vec2 p{centers[r].x + gx + rng.uniform(-jitter, jitter),
                   centers[r].y + gy + rng.uniform(-jitter, jitter)};
      room_nodes[r].push_back(env.add_node(p));
    }
  }

  // Edges inside rooms: grid neighbors and diagonals, then patch components.
  for (const auto& nodes : room_nodes) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        if (distance(env.position(nodes[i]), env.position(nodes[j])) <= 1.5 * params.node_spacing) {
          env.add_edge(nodes[i], nodes[j]);
        }
      }
    }
    detail::DisjointSet ds(env.node_count());
    for (NodeId v : nodes) {
      for (const Edge& e : env.neighbors(v)) ds.unite(v, e.to);
    }
    while (true) {
      std::vector<NodeId> first, rest;
      const int root = ds.find(nodes.front());
      for (NodeId v : nodes) (ds.find(v) == root ? first : rest).push_back(v);
      if (rest.empty()) break;
      const auto [u, v] = detail::closest_pair(env, first, rest);
      env.add_edge(u, v);
      ds.unite(u, v);
    }
  }

  // Corridors between rooms adjacent on the room grid.
  std::vector<std::pair<int, int>> room_links;
  for (int r = 0; r < rooms; ++r) {
    if ((r % grid_cols) + 1 < grid_cols && r + 1 < rooms) room_links.emplace_back(r, r + 1);
    if (r + grid_cols < rooms) room_links.emplace_back(r, r + grid_cols);
  }
  rng.shuffle(room_links);
  detail::DisjointSet room_sets(static_cast<std::size_t>(rooms));
  std::vector<std::pair<int, int>> unused;
  for (const auto& [a, b] : room_links) {
    if (room_sets.unite(a, b)) {
      const auto [u, v] = detail::closest_pair(env, room_nodes[a], room_nodes[b]);
      env.add_edge(u, v);
    } else {
      unused.emplace_back(a, b);
    }
  }
  for (int i = 0; i < params.extra_corridors && i < static_cast<int>(unused.size()); ++i) {
    const auto [a, b] = unused[static_cast<std::size_t>(i)];
    const auto [u, v] = detail::closest_pair(env, room_nodes[a], room_nodes[b]);
    env.add_edge(u, v);
  }

  // Objects.
  std::vector<int> categories(static_cast<std::size_t>(params.category_count));
  std::iota(categories.begin(), categories.end(), 0);
  rng.shuffle(categories);
  const double half_extent_pad = 0.5 * params.node_spacing;
  auto place = [&](int room) {
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = -min_x;
    for (NodeId v : room_nodes[room]) {
      const Vec2 p = env.position(v);
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
    Vec2 pos;
    for (int attempt = 0; attempt < 32; ++attempt) {
      pos = {rng.uniform(min_x - half_extent_pad, max_x + half_extent_pad),
             rng.uniform(min_y - half_extent_pad, max_y + half_extent_pad)};
      bool clear = true;
      for (NodeId v : room_nodes[room]) {
        if (distance(env.position(v), pos) < 0.4) clear = false;
      }
      if (clear) break;
    }
    return pos;
  };
  for (int r = 0; r < rooms; ++r) {
    const int dominant = categories[static_cast<std::size_t>(r % params.category_count)];
    for (int i = 0; i < params.dominant_objects_per_room; ++i) {
      PlacedObject obj;
      obj.category = dominant;
      obj.position = place(r);
      obj.width_m = rng.uniform(0.6, 2.0);
      obj.height_m = rng.uniform(0.5, 2.0);
      obj.visibility_radius = params.visibility_radius * rng.uniform(0.8, 1.2);
      env.add_object(obj);
    }
    for (int i = 0; i < params.clutter_objects_per_room; ++i) {
      PlacedObject obj;
      obj.category = static_cast<int>(rng.index(static_cast<std::size_t>(params.category_count - 1)));
      if (obj.category >= dominant) ++obj.category;
      obj.position = place(r);
      obj.width_m = rng.uniform(0.3, 1.0);
      obj.height_m = rng.uniform(0.3, 1.0);
      obj.visibility_radius = params.visibility_radius * rng.uniform(0.5, 0.9);
      env.add_object(obj);
    }
  }
  return env;
}

// ---------------------------------------------------------------------------
// Episodes

struct Instruction {
  std::vector<int> tokens;  // object categories in order of appearance
  int target = -1;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Episode {
  int id = 0;
  std::string env_id;
  NodeId start = 0;
  NodeId goal = 0;
  Instruction instruction;
  std::vector<NodeId> gt_path;
  double d_success = 3.0;
  int max_steps = 0;

  friend bool operator==(const Episode&, const Episode&) = default;
};

struct EpisodeParams {
  int min_hops = 4;            // preferred minimum; never below 2
  double step_budget_factor = 2.0;
  int step_budget_slack = 4;   // T = ceil(factor * hops) + slack
  double d_success = 3.0;

  void validate() const {
    if (min_hops < 2) throw ConfigError("min_hops must be at least 2");
    if (!(step_budget_factor >= 1.0)) throw ConfigError("step_budget_factor must be >= 1");
    if (step_budget_slack < 1) throw ConfigError("step_budget_slack must be >= 1");
    if (!(d_success > 0.0)) throw ConfigError("d_success must be positive");
  }
};

/// Dominant categories along a path, with unseen nodes skipped and
/// consecutive repeats collapsed.
inline std::vector<int> instruction_tokens(const std::vector<int>& path_categories) {
  std::vector<int> tokens;
  for (int c : path_categories) {
    if (c < 0) continue;
    if (tokens.empty() || tokens.back() != c) tokens.push_back(c);
  }
  return tokens;
}

inline Episode make_episode(const EnvGraph& env, int id, NodeId start, NodeId goal,
                            const EpisodeParams& params) {
  Episode ep;
  ep.id = id;
  ep.env_id = env.env_id();
  ep.start = start;
  ep.goal = goal;
  ep.gt_path = env_shortest_path(env, start, goal).nodes;
  std::vector<int> cats;
  for (NodeId v : ep.gt_path) cats.push_back(dominant_category(render_pano(env, v)));
  ep.instruction.tokens = instruction_tokens(cats);
  ep.instruction.target = cats.back();
  ep.d_success = params.d_success;
  const int hops = static_cast<int>(ep.gt_path.size()) - 1;
  ep.max_steps = static_cast<int>(std::ceil(params.step_budget_factor * hops)) + params.step_budget_slack;
  return ep;
}

/// Samples start/goal uniformly among pairs whose tie-broken shortest path
/// has at least min_hops edges (relaxed down to 2 for small graphs) and whose
/// goal viewpoint sees at least one object. Candidate pairs are enumerated
/// once per environment.
class EpisodeSampler {
 public:
  EpisodeSampler(const EnvGraph& env, EpisodeParams params) : env_(env), params_(params) {
    params_.validate();
    if (env.node_count() < 2) throw GenerationError("environment needs at least two nodes");
    if (!env.is_connected()) throw GenerationError("environment is not connected");

    const std::size_t n = env.node_count();
    std::vector<int> goal_category(n);
    for (std::size_t v = 0; v < n; ++v) {
      goal_category[v] = dominant_category(render_pano(env, static_cast<NodeId>(v)));
    }
    const DistanceTable table(env);
    std::vector<int> hops(n * n, 0);
    int max_hops = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        int h = 0;
        for (NodeId v = static_cast<NodeId>(a); v != static_cast<NodeId>(b);
             v = table.next_hop(env, v, static_cast<NodeId>(b))) {
          ++h;
        }
        hops[a * n + b] = h;
        if (goal_category[b] >= 0) max_hops = std::max(max_hops, h);
      }
    }
    const int required = std::min(params_.min_hops, max_hops);
    if (required < 2) throw GenerationError("no start/goal pair at least two edges apart");
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (goal_category[b] >= 0 && hops[a * n + b] >= required) {
          pairs_.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
        }
      }
    }
  }

  Episode sample(std::uint64_t seed, int id) const {
    Rng rng(seed);
    const auto [start, goal] = pairs_[rng.index(pairs_.size())];
    return make_episode(env_, id, start, goal, params_);
  }

  std::size_t pair_count() const { return pairs_.size(); }

 private:
  const EnvGraph& env_;
  EpisodeParams params_;
  std::vector<std::pair<NodeId, NodeId>> pairs_;
};

inline Episode generate_episode(const EnvGraph& env, std::uint64_t seed, int id = 0,
                                const EpisodeParams& params = {}) {
  return EpisodeSampler(env, params).sample(seed, id);
}

/// Episode i is drawn with the seed derived from (seed, i), so a set is a
/// pure function of (env, seed, count, params).
inline std::vector<Episode> generate_episodes(const EnvGraph& env, std::uint64_t seed, int count,
                                              const EpisodeParams& params = {}) {
  const EpisodeSampler sampler(env, params);
  std::vector<Episode> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(sampler.sample(derive_seed(seed, SeedScope::Episode, static_cast<std::uint64_t>(i)), i));
  }
  return out;
}

}  // namespace specnav
