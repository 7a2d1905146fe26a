#pragma once

// Scene object spectra: category-wise 2D Fourier magnitudes of panoramic
// object masks, pooled over vertical frequency, plus the synthetic reference
// spectra used to ground instruction object tokens.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specnav/env_model.hpp"
#include "specnav/fft.hpp"
#include "specnav/types.hpp"

namespace specnav {

/// K x eta nonnegative matrix, row-major. Row k describes category k.
class SosFeature {
 public:
  SosFeature() = default;
  SosFeature(std::size_t categories, std::size_t eta)
      : categories_(categories), eta_(eta), values_(categories * eta, 0.0) {}
  SosFeature(std::size_t categories, std::size_t eta, std::vector<double> values)
      : categories_(categories), eta_(eta), values_(std::move(values)) {
    if (values_.size() != categories_ * eta_) throw ShapeError("SosFeature: buffer does not match shape");
  }

  std::size_t categories() const { return categories_; }
  std::size_t eta() const { return eta_; }
  std::size_t size() const { return values_.size(); }

  double& at(std::size_t k, std::size_t j) { return values_[k * eta_ + j]; }
  double at(std::size_t k, std::size_t j) const { return values_[k * eta_ + j]; }

  std::span<const double> flat() const { return values_; }
  std::span<double> flat() { return values_; }
  std::span<const double> row(std::size_t k) const { return std::span(values_).subspan(k * eta_, eta_); }

  bool same_shape(const SosFeature& other) const {
    return categories_ == other.categories_ && eta_ == other.eta_;
  }

  double max_entry() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
  }

  /// Divides every entry by the maximum entry; all-zero matrices are unchanged.
  void normalize_by_max() {
    const double m = max_entry();
    if (m > 0.0) {
      for (double& v : values_) v /= m;
    }
  }

  friend bool operator==(const SosFeature&, const SosFeature&) = default;

 private:
  std::size_t categories_ = 0;
  std::size_t eta_ = 0;
  std::vector<double> values_;
};

inline int max_eta(int pano_width) { return pano_width / 2 + 1; }

/// Default retained horizontal frequencies: a quarter of the panorama width.
inline int default_eta(int pano_width) { return std::clamp(pano_width / 4, 1, max_eta(pano_width)); }

/// |DFT| of one mask, mean-pooled over all vertical frequencies (DC row
/// included), for horizontal frequencies 0..eta-1. No log, no normalization.
inline std::vector<double> pooled_magnitude(const BinaryMask& mask, int eta) {
  const auto rows = static_cast<std::size_t>(mask.rows);
  const auto cols = static_cast<std::size_t>(mask.cols);
  const auto keep = static_cast<std::size_t>(eta);
  std::vector<double> pooled(keep, 0.0);
  if (mask.empty()) return pooled;

  // Horizontal transform of every row, keeping the first eta coefficients.
  // Rendered masks are unions of rectangles, so consecutive rows often repeat.
  std::vector<Complex> spectrum(rows * keep);
  std::vector<Complex> line(cols);
  const FftPlan& row_plan = fft_plan(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const bool repeat = r > 0 && std::equal(mask.data.begin() + static_cast<std::ptrdiff_t>(r * cols),
                                            mask.data.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols),
                                            mask.data.begin() + static_cast<std::ptrdiff_t>((r - 1) * cols));
    if (repeat) {
      std::copy_n(spectrum.begin() + static_cast<std::ptrdiff_t>((r - 1) * keep), keep,
                  spectrum.begin() + static_cast<std::ptrdiff_t>(r * keep));
      continue;
    }
    for (std::size_t c = 0; c < cols; ++c) line[c] = mask.data[r * cols + c];
    row_plan.forward(line);
    std::copy_n(line.begin(), keep, spectrum.begin() + static_cast<std::ptrdiff_t>(r * keep));
  }

  // Vertical transform per retained column, then the mean magnitude.
  const FftPlan& col_plan = fft_plan(rows);
  std::vector<Complex> column(rows);
  for (std::size_t j = 0; j < keep; ++j) {
    for (std::size_t r = 0; r < rows; ++r) column[r] = spectrum[r * keep + j];
    col_plan.forward(column);
    double sum = 0.0;
    for (const Complex& z : column) sum += std::abs(z);
    pooled[j] = sum / static_cast<double>(rows);
  }
  return pooled;
}

/// Scene object spectrum of a panorama: per category, log(1 + pooled |DFT|),
/// then the whole K x eta matrix divided by its maximum entry.
inline SosFeature compute_sos(const PanoObservation& obs, int eta) {
  if (obs.masks.empty()) throw ConfigError("compute_sos: observation has no categories");
  const int width = obs.masks.front().cols;
  if (eta < 1 || eta > max_eta(width)) {
    throw ConfigError("compute_sos: eta " + std::to_string(eta) + " outside [1, " +
                      std::to_string(max_eta(width)) + "]");
  }
  SosFeature out(obs.masks.size(), static_cast<std::size_t>(eta));
  for (std::size_t k = 0; k < obs.masks.size(); ++k) {
    const BinaryMask& mask = obs.masks[k];
    if (mask.cols != width) throw ShapeError("compute_sos: masks differ in width");
    const auto pooled = pooled_magnitude(mask, eta);
    for (std::size_t j = 0; j < pooled.size(); ++j) out.at(k, j) = std::log1p(pooled[j]);
  }
  out.normalize_by_max();
  return out;
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("cosine_similarity: length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline double cosine_similarity(const SosFeature& a, const SosFeature& b) {
  if (!a.same_shape(b)) throw ShapeError("cosine_similarity: SOS shapes differ");
  return cosine_similarity(a.flat(), b.flat());
}

// ---------------------------------------------------------------------------
// Reference spectra

struct CategoryStat {
  double width = 0.0;   // median panoramic box width, columns
  double height = 0.0;  // median panoramic box height, rows
  std::size_t samples = 0;

  bool present() const { return samples > 0; }
};

struct CategoryStats {
  std::vector<CategoryStat> categories;

  const CategoryStat& at(int k) const {
    if (k < 0 || static_cast<std::size_t>(k) >= categories.size()) {
      throw MissingStats("no statistics for category " + std::to_string(k));
    }
    return categories[static_cast<std::size_t>(k)];
  }
};

/// Lower median: for an even count, the smaller of the two middle values.
inline double lower_median(std::vector<double> values) {
  if (values.empty()) throw EmptyInput("median of empty sample");
  const std::size_t mid = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  return values[mid];
}

inline CategoryStats category_stats_from_boxes(std::span<const PanoBox> boxes, int category_count) {
  std::vector<std::vector<double>> widths(static_cast<std::size_t>(category_count));
  std::vector<std::vector<double>> heights(static_cast<std::size_t>(category_count));
  for (const PanoBox& b : boxes) {
    if (b.category < 0 || b.category >= category_count) throw ConfigError("box category out of range");
    widths[static_cast<std::size_t>(b.category)].push_back(b.width);
    heights[static_cast<std::size_t>(b.category)].push_back(b.height);
  }
  CategoryStats stats;
  stats.categories.resize(static_cast<std::size_t>(category_count));
  for (std::size_t k = 0; k < stats.categories.size(); ++k) {
    if (widths[k].empty()) continue;
    stats.categories[k] = {lower_median(widths[k]), lower_median(heights[k]), widths[k].size()};
  }
  return stats;
}

/// Per-category median box sizes over every viewpoint's rendered panorama.
inline CategoryStats collect_category_stats(const EnvGraph& env) {
  if (env.node_count() == 0) throw ConfigError("collect_category_stats: empty environment");
  std::vector<PanoBox> boxes;
  for (std::size_t v = 0; v < env.node_count(); ++v) {
    const auto obs = render_pano(env, static_cast<NodeId>(v));
    boxes.insert(boxes.end(), obs.boxes.begin(), obs.boxes.end());
  }
  return category_stats_from_boxes(boxes, env.category_count());
}

/// Normalized sinc, sin(pi x) / (pi x), with sinc(0) = 1.
inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

/// Reference spectrum of an object token: only row `token` is nonzero and
/// holds lambda * |sinc(j/2 - eta/4)| for 0-based j, lambda being the median
/// box width of the category. Max-normalized like compute_sos.
inline SosFeature reference_sos_raw(int token, const CategoryStats& stats, int eta, int category_count) {
  if (eta < 1) throw ConfigError("reference_sos: eta must be positive");
  if (token < 0 || token >= category_count) throw ConfigError("reference_sos: token out of range");
  const CategoryStat& stat = stats.at(token);
  if (!stat.present()) throw MissingStats("category " + std::to_string(token) + " never observed");
  SosFeature out(static_cast<std::size_t>(category_count), static_cast<std::size_t>(eta));
  for (int j = 0; j < eta; ++j) {
    out.at(static_cast<std::size_t>(token), static_cast<std::size_t>(j)) =
        stat.width * std::abs(sinc(j / 2.0 - eta / 4.0));
  }
  return out;
}

inline SosFeature reference_sos(int token, const CategoryStats& stats, int eta, int category_count) {
  SosFeature out = reference_sos_raw(token, stats, eta, category_count);
  out.normalize_by_max();
  return out;
}

inline std::vector<SosFeature> reference_sos_list(std::span<const int> tokens, const CategoryStats& stats,
                                                  int eta, int category_count) {
  std::vector<SosFeature> refs;
  refs.reserve(tokens.size());
  for (int t : tokens) refs.push_back(reference_sos(t, stats, eta, category_count));
  return refs;
}

// ---------------------------------------------------------------------------
// Front-view to panorama box conversion

struct FrontBox {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;  // pixels, y grows downward
};

struct CameraView {
  double heading = 0.0;       // radians, camera optical axis
  double fov = kPi / 2.0;     // horizontal field of view, radians
  double front_width = 640.0;
  double front_height = 480.0;
};

struct PanoRect {
  double col_begin = 0.0;
  double col_end = 0.0;
  double row_begin = 0.0;
  double row_end = 0.0;

  double width() const { return col_end - col_begin; }
};

/// Panoramic box that may cross the 0/W seam.
struct PanoSpan {
  double col_begin = 0.0;  // in [0, W)
  double col_width = 0.0;
  double row_begin = 0.0;
  double row_end = 0.0;
  double pano_width = 0.0;

  double col_center() const {
    double c = col_begin + col_width / 2.0;
    return c >= pano_width ? c - pano_width : c;
  }

  /// One rectangle, or two when the span wraps past the seam.
  std::vector<PanoRect> pieces() const {
    if (col_begin + col_width <= pano_width) {
      return {{col_begin, col_begin + col_width, row_begin, row_end}};
    }
    return {{col_begin, pano_width, row_begin, row_end},
            {0.0, col_begin + col_width - pano_width, row_begin, row_end}};
  }
};

/// Maps a detection box in a pinhole front view to the equirectangular
/// panorama. Column x views heading heading + atan((2x/W_f - 1) tan(fov/2));
/// rows use the elevation through the image's vertical center line, so the
/// result stays an axis-aligned rectangle.
inline PanoSpan frontview_to_pano_box(const FrontBox& box, const CameraView& cam, PanoDims pano) {
  if (!(cam.fov > 0.0 && cam.fov < kPi)) throw ConfigError("field of view must lie in (0, pi)");
  if (!(cam.front_width > 0.0 && cam.front_height > 0.0)) throw ConfigError("front view must be non-empty");
  if (box.x0 < 0.0 || box.y0 < 0.0 || box.x1 > cam.front_width || box.y1 > cam.front_height) {
    throw ConfigError("box outside the front view");
  }
  if (!(box.x1 > box.x0) || !(box.y1 > box.y0)) throw DegenerateBox("box has zero area");

  const double tan_h = std::tan(cam.fov / 2.0);
  const double tan_v = tan_h * cam.front_height / cam.front_width;
  auto heading_of = [&](double x) { return cam.heading + std::atan((2.0 * x / cam.front_width - 1.0) * tan_h); };
  auto elevation_of = [&](double y) { return std::atan((1.0 - 2.0 * y / cam.front_height) * tan_v); };

  const double W = pano.width;
  const double H = pano.height;
  PanoSpan span;
  span.pano_width = W;
  const double begin = heading_of(box.x0) / kTwoPi * W;
  span.col_width = (heading_of(box.x1) - heading_of(box.x0)) / kTwoPi * W;
  span.col_begin = std::fmod(begin, W);
  if (span.col_begin < 0.0) span.col_begin += W;
  span.row_begin = (kPi / 2.0 - elevation_of(box.y0)) / kPi * H;
  span.row_end = (kPi / 2.0 - elevation_of(box.y1)) / kPi * H;
  return span;
}

}  // namespace specnav
