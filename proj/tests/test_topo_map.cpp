#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "specnav/topo_map.hpp"

using namespace specnav;

namespace {

// 0 at the center of a plus shape: 1, 2, 3 around it; 1 continues to 4 and 5.
EnvGraph six_node_fixture() {
  EnvGraph env("six", 3, {16, 8});
  env.add_node({0, 0});
  env.add_node({2, 0});
  env.add_node({0, 2});
  env.add_node({-2, 0});
  env.add_node({4, 1});
  env.add_node({4, -1});
  env.add_edge(0, 1);
  env.add_edge(0, 2);
  env.add_edge(0, 3);
  env.add_edge(1, 4);
  env.add_edge(1, 5);
  return env;
}

}  // namespace

TEST(TopoMap, FirstUpdate) {
  const EnvGraph env = six_node_fixture();
  TopoMap map;
  fixture::visit(map, env, 0, 0);
  EXPECT_EQ(map.visited(), (std::set<NodeId>{0}));
  EXPECT_EQ(map.frontier(), (std::set<NodeId>{1, 2, 3}));
  EXPECT_EQ(map.frontier_candidates(), (std::vector<NodeId>{1, 2, 3}));
  EXPECT_EQ(map.last_visit(0), 0);
  EXPECT_FALSE(map.check_invariants().has_value());
}

TEST(TopoMap, RevisitRefreshesTimestampOnly) {
  const EnvGraph env = six_node_fixture();
  TopoMap map;
  fixture::visit(map, env, 0, 0);
  fixture::visit(map, env, 2, 1);
  const auto frontier = map.frontier();
  fixture::visit(map, env, 0, 2);
  EXPECT_EQ(map.frontier(), frontier);
  EXPECT_EQ(map.last_visit(0), 2);
}

TEST(TopoMap, MovingToFrontierExposesNeighbors) {
  const EnvGraph env = six_node_fixture();
  TopoMap map;
  fixture::visit(map, env, 0, 0);
  fixture::visit(map, env, 1, 1);
  EXPECT_EQ(map.frontier(), (std::set<NodeId>{2, 3, 4, 5}));
  EXPECT_EQ(map.visited(), (std::set<NodeId>{0, 1}));
}

TEST(TopoMap, LatestObservationWins) {
  TopoMap map;
  NodeObservation a{0, {0, 0}, SosFeature(1, 2, {1, 0}), {1.0}};
  NodeObservation b{1, {1, 0}, SosFeature(1, 2, {0, 1}), {0.0}};
  map.update(a, std::span(&b, 1), 0);
  b.feature = SosFeature(1, 2, {0.5, 0.5});
  map.update(a, std::span(&b, 1), 1);
  EXPECT_EQ(map.feature(1), SosFeature(1, 2, {0.5, 0.5}));
}

TEST(TopoMap, ShortestPathBasics) {
  const EnvGraph env = six_node_fixture();
  TopoMap map;
  fixture::visit(map, env, 0, 0);
  const auto self = map.shortest_path(2, 2);
  EXPECT_EQ(self.nodes, (std::vector<NodeId>{2}));
  EXPECT_EQ(self.length, 0.0);
  // Frontier 3 and 1 are only joined through the visited node 0.
  const auto p = map.shortest_path(3, 1);
  EXPECT_EQ(p.nodes, (std::vector<NodeId>{3, 0, 1}));
  EXPECT_DOUBLE_EQ(p.length, 4.0);
  EXPECT_THROW(map.shortest_path(0, 4), NoPath);
}

TEST(TopoMap, ChosenNodesLeaveTheCandidatePool) {
  const EnvGraph env = six_node_fixture();
  TopoMap map;
  fixture::visit(map, env, 0, 0);
  map.mark_chosen(2);
  EXPECT_EQ(map.frontier_candidates(), (std::vector<NodeId>{1, 3}));
  map.mark_chosen(1);
  map.mark_chosen(3);
  EXPECT_TRUE(map.frontier_candidates().empty());
  EXPECT_EQ(map.frontier().size(), 3u);
  map.reset();
  EXPECT_EQ(map.node_count(), 0u);
  EXPECT_TRUE(map.chosen_history().empty());
}

TEST(TopoMap, PathsMatchExhaustiveSearch) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int n = 3 + static_cast<int>(seed % 6);
    const EnvGraph env = fixture::random_lattice_graph(seed, n);
    const TopoMap map = fixture::full_map(env);
    const auto g = oracle::from_env(env);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const auto want = oracle::exhaustive_shortest(g, a, b);
        const auto got = map.shortest_path(a, b);
        ASSERT_TRUE(want.found);
        EXPECT_NEAR(got.length, want.length, 1e-9) << "seed " << seed;
        EXPECT_EQ(got.nodes, want.nodes) << "seed " << seed << " " << a << "->" << b;
        EXPECT_EQ(env_shortest_path(env, a, b).nodes, want.nodes);
      }
    }
  }
}

TEST(TopoMap, RandomWalkKeepsInvariants) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const EnvGraph env = generate_env(seed, GeneratorParams{});
    const DistanceTable full(env);
    Rng rng(seed);
    TopoMap map;
    NodeId at = static_cast<NodeId>(rng.index(env.node_count()));
    fixture::visit(map, env, at, 0);
    std::map<std::pair<NodeId, NodeId>, double> last_length;
    for (int t = 1; t <= 120; ++t) {
      const auto& nbrs = env.neighbors(at);
      at = nbrs[rng.index(nbrs.size())].to;
      fixture::visit(map, env, at, t);
      ASSERT_FALSE(map.check_invariants().has_value()) << *map.check_invariants();
      for (NodeId f : map.frontier()) {
        ASSERT_FALSE(map.is_visited(f));
        bool touches_visited = false;
        for (const Edge& e : map.neighbors(f)) touches_visited |= map.is_visited(e.to);
        ASSERT_TRUE(touches_visited);
      }
      // Known paths only get shorter as the map grows and never beat the true graph.
      if (t % 10 == 0) {
        for (NodeId a : map.visited()) {
          for (NodeId b : map.frontier()) {
            const double len = map.shortest_path(a, b).length;
            EXPECT_GE(len, full(a, b) - 1e-9);
            const auto key = std::make_pair(a, b);
            if (last_length.contains(key)) EXPECT_LE(len, last_length[key] + 1e-12);
            last_length[key] = len;
          }
        }
      }
    }
  }
}

TEST(TopoMap, FullCoverageEqualsTrueDistances) {
  const EnvGraph env = generate_env(8, GeneratorParams{});
  const TopoMap map = fixture::full_map(env);
  const DistanceTable table(env);
  for (NodeId a = 0; a < static_cast<NodeId>(env.node_count()); a += 3) {
    for (NodeId b = 0; b < static_cast<NodeId>(env.node_count()); ++b) {
      EXPECT_NEAR(map.shortest_path(a, b).length, table(a, b), 1e-9);
    }
  }
  EXPECT_EQ(map.edge_count(), env.edge_count());
}
