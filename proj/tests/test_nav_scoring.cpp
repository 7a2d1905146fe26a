#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "specnav/nav_scoring.hpp"
#include "specnav/stats.hpp"
#include "specnav/toy_scenario.hpp"

using namespace specnav;

namespace {

std::vector<oracle::Vec> flat(const std::vector<SosFeature>& fs) {
  std::vector<oracle::Vec> out;
  for (const auto& f : fs) out.emplace_back(f.flat().begin(), f.flat().end());
  return out;
}

std::vector<SosFeature> random_features(Rng& rng, std::size_t n, std::size_t K, std::size_t eta, double zero_p = 0.3) {
  std::vector<SosFeature> out;
  for (std::size_t i = 0; i < n; ++i) {
    SosFeature f(K, eta);
    for (double& v : f.flat()) v = rng.bernoulli(zero_p) ? 0.0 : rng.uniform();
    out.push_back(f);
  }
  return out;
}

}  // namespace

TEST(NavScore, SingleReferenceIsZero) {
  const std::vector<SosFeature> refs{SosFeature(1, 2, {1, 0})};
  const std::vector<SosFeature> traj{SosFeature(1, 2, {1, 0}), SosFeature(1, 2, {0, 1})};
  EXPECT_EQ(nav_score(refs, traj), 0.0);
}

TEST(NavScore, TwoByTwoHandFixture) {
  const std::vector<SosFeature> refs{SosFeature(1, 2, {1, 0}), SosFeature(1, 2, {0, 1})};
  const std::vector<SosFeature> traj = refs;
  // Means are (0.5, 0.5); deviations are +-(0.5, -0.5) with squared norm 0.5.
  // Numerator: cos = 1 on the diagonal (products 0.5 each) and 0 off it.
  // Denominator: sqrt(1 * 1.0 * 1.0).
  EXPECT_NEAR(nav_score(refs, traj), 1.0 / (1.0 + 1e-12), 1e-12);
  EXPECT_NEAR(nav_score(refs, traj), oracle::nav_score(flat(refs), flat(traj)), 1e-12);
  // The double sum does not depend on the order of trajectory steps.
  const std::vector<SosFeature> reversed{traj[1], traj[0]};
  EXPECT_NEAR(nav_score(refs, reversed), nav_score(refs, traj), 1e-15);
}

TEST(NavScore, MatchesDoubleSumOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t B = 1 + rng.index(5), T = 1 + rng.index(8);
    const std::size_t K = 1 + rng.index(8), eta = 1 + rng.index(64 / K);
    const auto refs = random_features(rng, B, K, eta);
    const auto traj = random_features(rng, T, K, eta);
    const double got = nav_score(refs, traj);
    const double want = oracle::nav_score(flat(refs), flat(traj));
    ASSERT_LE(std::abs(got - want), 1e-12 * std::max(1.0, std::abs(want))) << "trial " << trial;
  }
}

TEST(NavScore, JointScalingInvariance) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto refs = random_features(rng, 3, 4, 5);
    auto traj = random_features(rng, 4, 4, 5);
    const double base = nav_score(refs, traj);
    const double c = rng.uniform(0.1, 10.0);
    for (auto& f : refs) for (double& v : f.flat()) v *= c;
    for (auto& f : traj) for (double& v : f.flat()) v *= c;
    EXPECT_NEAR(nav_score(refs, traj), base, 1e-9 * std::max(1.0, std::abs(base)));
  }
}

TEST(NavScore, CoordinatePermutationSymmetry) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto refs = random_features(rng, 3, 3, 4);
    const auto traj = random_features(rng, 5, 3, 4);
    std::vector<std::size_t> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    auto permute = [&](const std::vector<SosFeature>& fs) {
      std::vector<SosFeature> out;
      for (const auto& f : fs) {
        std::vector<double> v(12);
        for (std::size_t i = 0; i < 12; ++i) v[perm[i]] = f.flat()[i];
        out.emplace_back(3, 4, v);
      }
      return out;
    };
    EXPECT_NEAR(nav_score(permute(refs), permute(traj)), nav_score(refs, traj), 1e-12);
  }
}

TEST(NavScore, ErrorsAndInverseRatio) {
  const std::vector<SosFeature> none;
  const std::vector<SosFeature> one{SosFeature(2, 2)};
  const std::vector<SosFeature> other{SosFeature(2, 3)};
  EXPECT_THROW(nav_score(none, one), EmptyInput);
  EXPECT_THROW(nav_score(one, none), EmptyInput);
  EXPECT_THROW(nav_score(one, other), ShapeError);

  Rng rng(14);
  const auto refs = random_features(rng, 3, 2, 4, 0.0);
  const auto traj = random_features(rng, 6, 2, 4, 0.0);
  const auto terms = nav_score_terms(refs, traj);
  EXPECT_NEAR(terms.score, terms.numerator / (std::sqrt(2.0 * terms.ref_spread * terms.traj_spread) + 1e-12), 1e-14);
  EXPECT_NEAR(terms.score_inverse_ratio,
              terms.numerator / (std::sqrt(0.5 * terms.ref_spread * terms.traj_spread) + 1e-12), 1e-14);
}

TEST(SimilarityMatrix, BaseCaseAndOrthogonality) {
  const std::vector<SosFeature> r{SosFeature(1, 3, {1, 2, 3})};
  const std::vector<SosFeature> s{SosFeature(1, 3, {0.5, 0.0, 2.0})};
  const auto m = similarity_matrix(r, s);
  ASSERT_EQ(m.rows, 1u);
  ASSERT_EQ(m.cols, 1u);
  EXPECT_DOUBLE_EQ(m.at(0, 0), 6.5);

  std::vector<SosFeature> refs, traj;
  for (int k = 0; k < 3; ++k) {
    SosFeature f(3, 2);
    f.at(static_cast<std::size_t>(k), 0) = 1.0 + k;
    refs.push_back(f);
    traj.push_back(f);
  }
  const auto band = similarity_matrix(refs, traj);
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (t == j) EXPECT_GT(band.at(t, j), 0.0);
      else EXPECT_EQ(band.at(t, j), 0.0);
    }
  }
}

TEST(SimilarityMatrix, ToyScenarioIsBanded) {
  ToyParams params;
  params.clutter_probability = 0.0;
  params.token_count = 4;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sc = make_toy_scenario(seed, params);
    const auto m = similarity_matrix(sc.references(), sc.trajectory_features(sc.aligned));
    ASSERT_EQ(m.rows, 4u);
    ASSERT_EQ(m.cols, 4u);
    std::size_t previous = 0;
    for (std::size_t t = 0; t < m.rows; ++t) {
      std::size_t arg = 0;
      for (std::size_t j = 1; j < m.cols; ++j) {
        if (m.at(t, j) > m.at(t, arg)) arg = j;
      }
      EXPECT_GE(arg, previous) << "seed " << seed << " row " << t;
      previous = arg;
    }
  }
}

TEST(Nds, IdentityHandValueAndSymmetry) {
  const EnvGraph env = fixture::chain({3.0, 1.0, 2.0, 4.0});
  const std::vector<NodeId> r{0, 1, 2};
  EXPECT_DOUBLE_EQ(nds(r, r, env, 3.0), 1.0);
  const std::vector<NodeId> a{0}, b{1};
  EXPECT_NEAR(nds(a, b, env, 3.0), std::exp(-2.0), 1e-12);
  EXPECT_NEAR(nds(a, b, env, 3.0), 0.1353352832366127, 1e-12);
  const DistanceTable table(env);
  Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<NodeId> p, q;
    for (std::size_t i = 0, n = 1 + rng.index(4); i < n; ++i) p.push_back(static_cast<NodeId>(rng.index(5)));
    for (std::size_t i = 0, n = 1 + rng.index(4); i < n; ++i) q.push_back(static_cast<NodeId>(rng.index(5)));
    const double v = nds(p, q, table, 3.0);
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(v, nds(q, p, env, 3.0), 1e-12);
  }
}

TEST(Nds, DecaysWithDistance) {
  const EnvGraph env = fixture::chain(std::vector<double>(30, 5.0));
  const std::vector<NodeId> r{0};
  double previous = 1.0;
  for (NodeId q = 1; q < 31; ++q) {
    const std::vector<NodeId> query{q};
    const double v = nds(r, query, env, 3.0);
    EXPECT_LT(v, previous);
    EXPECT_GT(v, 0.0);
    previous = v;
  }
  EXPECT_LT(previous, 1e-40);
}

TEST(Nds, ErrorsPropagate) {
  EnvGraph env = fixture::chain({1.0});
  env.add_node({9.0, 9.0});
  const std::vector<NodeId> a{0}, b{2}, none;
  EXPECT_THROW(nds(a, b, env, 3.0), NoPath);
  EXPECT_THROW(nds(a, none, env, 3.0), EmptyInput);
  EXPECT_THROW(nds(a, a, env, 0.0), ConfigError);
}

TEST(ToyScenario, AlignedCandidateUsuallyWins) {
  int wins = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto sc = make_toy_scenario(derive_seed(3, SeedScope::Toy, s));
    if (sc.score_through(sc.aligned) > sc.score_through(sc.misaligned)) ++wins;
  }
  EXPECT_GE(wins, 90);
}

TEST(Spearman, MatchesNaiveRankOracle) {
  Rng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.index(60);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.index(8));  // plenty of ties
      y[i] = rng.bernoulli(0.5) ? x[i] + rng.uniform() : rng.uniform(0.0, 8.0);
    }
    if (std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end()) continue;
    EXPECT_NEAR(spearman(x, y), oracle::naive_spearman(x, y), 1e-9);
  }
  const std::vector<double> up{1, 2, 3, 4}, down{9, 7, 5, 1};
  EXPECT_NEAR(spearman(up, up), 1.0, 1e-15);
  EXPECT_NEAR(spearman(up, down), -1.0, 1e-15);
  const std::vector<double> tied{1, 1, 2};
  EXPECT_EQ(average_ranks(tied), (std::vector<double>{1.5, 1.5, 3.0}));
  EXPECT_THROW(spearman(std::vector<double>{1.0}, std::vector<double>{2.0}), EmptyInput);
}
