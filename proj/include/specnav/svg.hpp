#pragma once

// Minimal self-rendered SVG: a similarity heatmap and a scatter plot.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "specnav/nav_scoring.hpp"

namespace specnav {

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// White to dark blue.
inline std::string heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255.0 * (1.0 - 0.85 * t)));
  const int g = static_cast<int>(std::lround(255.0 * (1.0 - 0.65 * t)));
  const int b = static_cast<int>(std::lround(255.0 * (1.0 - 0.25 * t)));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace detail

/// Rows are trajectory steps, columns are instruction tokens. Values are
/// scaled to the matrix range for coloring.
inline std::string similarity_heatmap_svg(const SimilarityMatrix& m, const std::string& title,
                                          const std::vector<std::string>& col_labels = {},
                                          const std::vector<std::string>& row_labels = {}) {
  if (m.rows == 0 || m.cols == 0) throw EmptyInput("heatmap of an empty matrix");
  constexpr double cell = 32.0, left = 70.0, top = 50.0;
  const double width = left + cell * static_cast<double>(m.cols) + 20.0;
  const double height = top + cell * static_cast<double>(m.rows) + 20.0;
  const auto [lo_it, hi_it] = std::minmax_element(m.values.begin(), m.values.end());
  const double lo = *lo_it, span = *hi_it - *lo_it;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt(width) + "\" height=\"" +
       detail::fmt(height) + "\">\n";
  s += "<text x=\"" + detail::fmt(left) + "\" y=\"18\" font-size=\"13\">" + detail::xml_escape(title) + "</text>\n";
  for (std::size_t c = 0; c < m.cols; ++c) {
    const std::string label = c < col_labels.size() ? col_labels[c] : "r" + std::to_string(c);
    s += "<text x=\"" + detail::fmt(left + cell * (static_cast<double>(c) + 0.5)) + "\" y=\"" +
         detail::fmt(top - 6.0) + "\" font-size=\"10\" text-anchor=\"middle\">" + detail::xml_escape(label) +
         "</text>\n";
  }
  for (std::size_t r = 0; r < m.rows; ++r) {
    const std::string label = r < row_labels.size() ? row_labels[r] : "s" + std::to_string(r);
    s += "<text x=\"" + detail::fmt(left - 6.0) + "\" y=\"" +
         detail::fmt(top + cell * (static_cast<double>(r) + 0.5) + 4.0) +
         "\" font-size=\"10\" text-anchor=\"end\">" + detail::xml_escape(label) + "</text>\n";
    for (std::size_t c = 0; c < m.cols; ++c) {
      const double v = m.at(r, c);
      const double t = span > 0.0 ? (v - lo) / span : 0.0;
      s += "<rect class=\"cell\" x=\"" + detail::fmt(left + cell * static_cast<double>(c)) + "\" y=\"" +
           detail::fmt(top + cell * static_cast<double>(r)) + "\" width=\"" + detail::fmt(cell) + "\" height=\"" +
           detail::fmt(cell) + "\" fill=\"" + detail::heat_color(t) + "\"><title>" + detail::fmt(v) +
           "</title></rect>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

/// One circle per point, axes scaled to the data range.
inline std::string scatter_svg(const std::vector<std::pair<double, double>>& points, const std::string& title,
                               const std::string& x_label, const std::string& y_label) {
  if (points.empty()) throw EmptyInput("scatter plot of no points");
  constexpr double width = 520.0, height = 420.0, left = 60.0, right = 20.0, top = 40.0, bottom = 50.0;
  double xlo = points.front().first, xhi = xlo, ylo = points.front().second, yhi = ylo;
  for (const auto& [x, y] : points) {
    xlo = std::min(xlo, x), xhi = std::max(xhi, x);
    ylo = std::min(ylo, y), yhi = std::max(yhi, y);
  }
  if (xhi - xlo < 1e-12) xhi = xlo + 1.0;
  if (yhi - ylo < 1e-12) yhi = ylo + 1.0;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return top + ph - (y - ylo) / (yhi - ylo) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt(width) + "\" height=\"" +
       detail::fmt(height) + "\">\n";
  s += "<text x=\"" + detail::fmt(left) + "\" y=\"22\" font-size=\"13\">" + detail::xml_escape(title) + "</text>\n";
  s += "<rect x=\"" + detail::fmt(left) + "\" y=\"" + detail::fmt(top) + "\" width=\"" + detail::fmt(pw) +
       "\" height=\"" + detail::fmt(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  s += "<text x=\"" + detail::fmt(left + pw / 2) + "\" y=\"" + detail::fmt(height - 12) +
       "\" font-size=\"11\" text-anchor=\"middle\">" + detail::xml_escape(x_label) + "</text>\n";
  s += "<text x=\"14\" y=\"" + detail::fmt(top + ph / 2) + "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
       detail::fmt(top + ph / 2) + ")\">" + detail::xml_escape(y_label) + "</text>\n";
  for (const auto& [v, x] : {std::pair{xlo, px(xlo)}, std::pair{xhi, px(xhi)}}) {
    s += "<text x=\"" + detail::fmt(x) + "\" y=\"" + detail::fmt(top + ph + 16) +
         "\" font-size=\"9\" text-anchor=\"middle\">" + detail::fmt(v) + "</text>\n";
  }
  for (const auto& [v, y] : {std::pair{ylo, py(ylo)}, std::pair{yhi, py(yhi)}}) {
    s += "<text x=\"" + detail::fmt(left - 4) + "\" y=\"" + detail::fmt(y + 3) +
         "\" font-size=\"9\" text-anchor=\"end\">" + detail::fmt(v) + "</text>\n";
  }
  for (const auto& [x, y] : points) {
    s += "<circle class=\"point\" cx=\"" + detail::fmt(px(x)) + "\" cy=\"" + detail::fmt(py(y)) +
         "\" r=\"2\" fill=\"#1f5fa8\" fill-opacity=\"0.45\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace specnav
