#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace specnav {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for a sub-scope (episode, environment, sample) of a global seed.
/// derive_seed(s, a) != derive_seed(s, b) for a != b with overwhelming probability.
constexpr std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t scope_id) {
  return splitmix64(splitmix64(global_seed) ^ splitmix64(scope_id + 0x632BE59BD9B4E019ULL));
}

// Scope tags so that e.g. environment 3 and episode 3 never share a stream.
enum class SeedScope : std::uint64_t {
  Environment = 0x1000,
  Episode = 0x2000,
  Augmentation = 0x3000,
  Detour = 0x4000,
  Toy = 0x5000,
};

constexpr std::uint64_t derive_seed(std::uint64_t global_seed, SeedScope scope, std::uint64_t id) {
  return derive_seed(derive_seed(global_seed, static_cast<std::uint64_t>(scope)), id);
}

/// Deterministic random source. The distributions are implemented here rather
/// than through <random> distribution classes, whose output is not specified
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return static_cast<std::size_t>(draw % bound);
  }

  /// Uniform integer in [lo, hi].
  int range(int lo, int hi) { return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1))); }

  template <class T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace specnav
