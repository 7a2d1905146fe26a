#pragma once

// Trajectory scoring against an instruction's reference spectra, the
// token/observation similarity matrix, and the normalized distance sum used
// to grade a trajectory against ground truth.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "specnav/env_model.hpp"
#include "specnav/sos_features.hpp"
#include "specnav/types.hpp"

namespace specnav {

inline constexpr double kNavScoreEpsilon = 1e-12;

struct NavScoreTerms {
  double score = 0.0;           // sqrt((t'/B) ...) in the denominator
  double score_inverse_ratio = 0.0;  // same with B/t', for comparison only
  double numerator = 0.0;
  double ref_spread = 0.0;      // sum_i |r_i - r_mean|^2
  double traj_spread = 0.0;     // sum_j |s_j - s_mean|^2
};

namespace detail {

inline void check_same_shapes(std::span<const SosFeature> refs, std::span<const SosFeature> traj) {
  if (refs.empty() || traj.empty()) throw EmptyInput("navigation score needs references and observations");
  const SosFeature& first = refs.front();
  for (const auto& f : refs) {
    if (!f.same_shape(first)) throw ShapeError("reference spectra differ in shape");
  }
  for (const auto& f : traj) {
    if (!f.same_shape(first)) throw ShapeError("trajectory spectra differ in shape from references");
  }
}

inline std::vector<double> mean_of(std::span<const SosFeature> xs) {
  std::vector<double> mean(xs.front().size(), 0.0);
  for (const auto& x : xs) {
    const auto v = x.flat();
    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += v[d];
  }
  for (double& m : mean) m /= static_cast<double>(xs.size());
  return mean;
}

}  // namespace detail

/// Pseudo correlation between the instruction's reference spectra r_i and
/// a trajectory's spectra s_j:
///
///   sum_ij cos(r_i, s_j) <r_i - r_mean, s_j - s_mean>
///   -------------------------------------------------------------- ,
///   sqrt((t'/B) sum_i |r_i - r_mean|^2 sum_j |s_j - s_mean|^2) + eps
///
/// with all products over flattened K x eta matrices. Degenerate centering
/// (one reference, one observation, constant features) scores 0.
inline NavScoreTerms nav_score_terms(std::span<const SosFeature> refs, std::span<const SosFeature> traj) {
  detail::check_same_shapes(refs, traj);
  const std::size_t dim = refs.front().size();
  const auto ref_mean = detail::mean_of(refs);
  const auto traj_mean = detail::mean_of(traj);

  std::vector<std::vector<double>> ref_dev(refs.size(), std::vector<double>(dim));
  std::vector<std::vector<double>> traj_dev(traj.size(), std::vector<double>(dim));
  NavScoreTerms terms;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto v = refs[i].flat();
    for (std::size_t d = 0; d < dim; ++d) {
      ref_dev[i][d] = v[d] - ref_mean[d];
      terms.ref_spread += ref_dev[i][d] * ref_dev[i][d];
    }
  }
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const auto v = traj[j].flat();
    for (std::size_t d = 0; d < dim; ++d) {
      traj_dev[j][d] = v[d] - traj_mean[d];
      terms.traj_spread += traj_dev[j][d] * traj_dev[j][d];
    }
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    for (std::size_t j = 0; j < traj.size(); ++j) {
      double centered = 0.0;
      for (std::size_t d = 0; d < dim; ++d) centered += ref_dev[i][d] * traj_dev[j][d];
      terms.numerator += cosine_similarity(refs[i].flat(), traj[j].flat()) * centered;
    }
  }
  const double b = static_cast<double>(refs.size());
  const double t = static_cast<double>(traj.size());
  const double spread = terms.ref_spread * terms.traj_spread;
  terms.score = terms.numerator / (std::sqrt(t / b * spread) + kNavScoreEpsilon);
  terms.score_inverse_ratio = terms.numerator / (std::sqrt(b / t * spread) + kNavScoreEpsilon);
  return terms;
}

inline double nav_score(std::span<const SosFeature> refs, std::span<const SosFeature> traj) {
  return nav_score_terms(refs, traj).score;
}

/// Row-major t' x B matrix of raw dot products s_t . r_j.
struct SimilarityMatrix {
  std::size_t rows = 0;  // trajectory steps
  std::size_t cols = 0;  // instruction tokens
  std::vector<double> values;

  double at(std::size_t t, std::size_t j) const { return values[t * cols + j]; }
};

inline SimilarityMatrix similarity_matrix(std::span<const SosFeature> refs, std::span<const SosFeature> traj) {
  detail::check_same_shapes(refs, traj);
  SimilarityMatrix m{traj.size(), refs.size(), std::vector<double>(traj.size() * refs.size(), 0.0)};
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto s = traj[t].flat();
    for (std::size_t j = 0; j < refs.size(); ++j) {
      const auto r = refs[j].flat();
      double dot = 0.0;
      for (std::size_t d = 0; d < s.size(); ++d) dot += r[d] * s[d];
      m.values[t * m.cols + j] = dot;
    }
  }
  return m;
}

using DistanceFn = std::function<double(NodeId, NodeId)>;

/// Normalized distance sum between a reference trajectory R and a query Q:
/// exp(-(sum_R min_Q d + sum_Q min_R d) / (((|R| + |Q|) / 2) d_success)).
inline double nds(std::span<const NodeId> reference, std::span<const NodeId> query, const DistanceFn& dist,
                  double d_success) {
  if (reference.empty() || query.empty()) throw EmptyInput("nds needs two non-empty trajectories");
  if (!(d_success > 0.0)) throw ConfigError("d_success must be positive");
  auto nearest_sum = [&](std::span<const NodeId> from, std::span<const NodeId> to) {
    double total = 0.0;
    for (NodeId v : from) {
      double best = std::numeric_limits<double>::infinity();
      for (NodeId u : to) best = std::min(best, dist(v, u));
      total += best;
    }
    return total;
  };
  const double sum = nearest_sum(reference, query) + nearest_sum(query, reference);
  const double scale = (static_cast<double>(reference.size() + query.size()) / 2.0) * d_success;
  return std::exp(-sum / scale);
}

inline double nds(std::span<const NodeId> reference, std::span<const NodeId> query, const EnvGraph& env,
                  double d_success) {
  return nds(reference, query, [&env](NodeId a, NodeId b) { return geodesic_distance(env, a, b); }, d_success);
}

inline double nds(std::span<const NodeId> reference, std::span<const NodeId> query, const DistanceTable& table,
                  double d_success) {
  return nds(reference, query, [&table](NodeId a, NodeId b) { return table(a, b); }, d_success);
}

}  // namespace specnav
