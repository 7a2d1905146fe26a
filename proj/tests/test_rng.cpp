#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "specnav/rng.hpp"

using namespace specnav;

TEST(Rng, SameSeedSameStream) {
  Rng a(99), b(99), c(100);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, RangesAndIndices) {
  Rng rng(5);
  std::set<int> seen;
  for (int i = 0; i < 2000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.index(7), 7u);
    seen.insert(rng.range(-2, 2));
  }
  EXPECT_EQ(seen, (std::set<int>{-2, -1, 0, 1, 2}));
  EXPECT_FALSE(rng.bernoulli(0.0));
  EXPECT_TRUE(rng.bernoulli(1.0));
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng rng(6);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  rng.shuffle(w);
  EXPECT_NE(w, v);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(w, v);
}

TEST(SeedDerivation, ScopesAndIndicesSeparate) {
  std::set<std::uint64_t> seeds;
  for (auto scope : {SeedScope::Environment, SeedScope::Episode, SeedScope::Augmentation, SeedScope::Toy}) {
    for (std::uint64_t i = 0; i < 50; ++i) seeds.insert(derive_seed(1, scope, i));
  }
  EXPECT_EQ(seeds.size(), 200u);
  EXPECT_EQ(derive_seed(1, SeedScope::Toy, 3), derive_seed(1, SeedScope::Toy, 3));
  EXPECT_NE(derive_seed(1, SeedScope::Toy, 3), derive_seed(2, SeedScope::Toy, 3));
}
