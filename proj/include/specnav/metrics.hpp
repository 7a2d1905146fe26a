#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "specnav/types.hpp"

namespace specnav {

enum class StepMode { Explore, Exploit };

struct EpisodeResult {
  int episode_id = 0;
  std::string env_id;
  std::string policy;
  std::vector<NodeId> trajectory;
  std::vector<StepMode> modes;  // one per executed move
  bool stopped = false;
  int steps = 0;
  double d_success = 3.0;
  double path_length = 0.0;      // l_i, meters walked
  double shortest_length = 0.0;  // p_i, ground-truth geodesic length
  double final_distance = 0.0;   // geodesic distance from the last node to the goal
  double min_distance = 0.0;     // closest approach to the goal along the trajectory
  bool grounded = false;         // target object grounded at the stop node
  double final_nav_score = 0.0;
  double final_nav_score_inverse_ratio = 0.0;

  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

/// Stopped within d_success of the goal, boundary inclusive.
inline int success(const EpisodeResult& r, double d_success) {
  return r.stopped && r.final_distance <= d_success ? 1 : 0;
}

inline int success(const EpisodeResult& r) { return success(r, r.d_success); }

inline int oracle_success(const EpisodeResult& r) { return r.min_distance <= r.d_success ? 1 : 0; }

/// Navigation success and target grounding.
inline int find_success(const EpisodeResult& r) { return success(r) && r.grounded ? 1 : 0; }

namespace detail {

inline void require_nonempty(std::span<const EpisodeResult> results, const char* metric) {
  if (results.empty()) throw EmptyInput(std::string(metric) + " of an empty result set");
}

template <class F>
double mean_over(std::span<const EpisodeResult> results, const char* metric, F f) {
  require_nonempty(results, metric);
  double total = 0.0;
  for (const auto& r : results) total += f(r);
  return total / static_cast<double>(results.size());
}

/// shortest / max(shortest, actual); a zero-length optimal episode walked
/// without moving counts as fully efficient.
inline double path_efficiency(double shortest, double actual) {
  const double denom = std::max(shortest, actual);
  return denom > 0.0 ? shortest / denom : 1.0;
}

}  // namespace detail

inline double sr(std::span<const EpisodeResult> results) {
  return detail::mean_over(results, "SR", [](const EpisodeResult& r) { return success(r); });
}

/// Success weighted by path length: mean of S_i p_i / max(p_i, l_i).
inline double spl(std::span<const EpisodeResult> results) {
  return detail::mean_over(results, "SPL", [](const EpisodeResult& r) {
    return success(r) * detail::path_efficiency(r.shortest_length, r.path_length);
  });
}

inline double osr(std::span<const EpisodeResult> results) {
  return detail::mean_over(results, "OSR", [](const EpisodeResult& r) { return oracle_success(r); });
}

inline double tl(std::span<const EpisodeResult> results) {
  return detail::mean_over(results, "TL", [](const EpisodeResult& r) { return r.path_length; });
}

inline double ne(std::span<const EpisodeResult> results) {
  return detail::mean_over(results, "NE", [](const EpisodeResult& r) { return r.final_distance; });
}

inline double fsr(std::span<const EpisodeResult> results) {
  return detail::mean_over(results, "FSR", [](const EpisodeResult& r) { return find_success(r); });
}

/// Target-finding success weighted by path length:
/// mean of S_nav S_loc l_gt / max(l_nav, l_gt).
inline double fspl(std::span<const EpisodeResult> results) {
  return detail::mean_over(results, "FSPL", [](const EpisodeResult& r) {
    return find_success(r) * detail::path_efficiency(r.shortest_length, r.path_length);
  });
}

struct MetricSummary {
  std::size_t episodes = 0;
  double sr = 0.0;
  double spl = 0.0;
  double osr = 0.0;
  double tl = 0.0;
  double ne = 0.0;
  double fsr = 0.0;
  double fspl = 0.0;
};

inline MetricSummary summarize(std::span<const EpisodeResult> results) {
  MetricSummary s;
  s.episodes = results.size();
  s.sr = sr(results);
  s.spl = spl(results);
  s.osr = osr(results);
  s.tl = tl(results);
  s.ne = ne(results);
  s.fsr = fsr(results);
  s.fspl = fspl(results);
  return s;
}

}  // namespace specnav
