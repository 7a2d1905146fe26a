#pragma once

// Complex FFT for arbitrary lengths: iterative radix-2 for powers of two,
// Bluestein's chirp-z convolution otherwise. Plans are cached per thread.

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "specnav/types.hpp"

namespace specnav {

using Complex = std::complex<double>;

class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    if (n_ == 0) throw ConfigError("FFT length must be positive");
    if (is_power_of_two(n_)) {
      init_radix2(n_, bitrev_, twiddles_);
    } else {
      init_bluestein();
    }
  }

  std::size_t size() const { return n_; }

  /// In-place forward transform, X[k] = sum_n x[n] exp(-2 pi i k n / N).
  void forward(std::span<Complex> data) const {
    if (data.size() != n_) throw ShapeError("FFT input length mismatch");
    if (n_ == 1) return;
    if (bluestein_m_ == 0) {
      radix2(data, bitrev_, twiddles_);
    } else {
      bluestein(data);
    }
  }

 private:
  static bool is_power_of_two(std::size_t n) { return (n & (n - 1)) == 0; }

  static void init_radix2(std::size_t n, std::vector<std::size_t>& bitrev, std::vector<Complex>& tw) {
    bitrev.assign(n, 0);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      }
      bitrev[i] = r;
    }
    // Twiddles are evaluated directly (no recurrence) to keep the error at
    // a few ulps per butterfly stage.
    tw.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double angle = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
      tw[k] = {std::cos(angle), std::sin(angle)};
    }
  }

  static void radix2(std::span<Complex> a, const std::vector<std::size_t>& bitrev,
                     const std::vector<Complex>& tw) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (i < bitrev[i]) std::swap(a[i], a[bitrev[i]]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = n / len;
      for (std::size_t start = 0; start < n; start += len) {
        for (std::size_t k = 0; k < half; ++k) {
          const Complex t = tw[k * stride] * a[start + k + half];
          a[start + k + half] = a[start + k] - t;
          a[start + k] += t;
        }
      }
    }
  }

  void init_bluestein() {
    std::size_t m = 1;
    while (m < 2 * n_ - 1) m <<= 1;
    bluestein_m_ = m;
    init_radix2(m, bitrev_, twiddles_);
    chirp_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      // k^2 mod 2N keeps the angle argument small and exact.
      const std::size_t k2 = (k * k) % (2 * n_);
      const double angle = -kPi * static_cast<double>(k2) / static_cast<double>(n_);
      chirp_[k] = {std::cos(angle), std::sin(angle)};
    }
    kernel_.assign(m, Complex{});
    kernel_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n_; ++k) {
      kernel_[k] = std::conj(chirp_[k]);
      kernel_[m - k] = std::conj(chirp_[k]);
    }
    radix2(kernel_, bitrev_, twiddles_);
  }

  void bluestein(std::span<Complex> data) const {
    const std::size_t m = bluestein_m_;
    std::vector<Complex> work(m, Complex{});
    for (std::size_t k = 0; k < n_; ++k) work[k] = data[k] * chirp_[k];
    radix2(work, bitrev_, twiddles_);
    for (std::size_t k = 0; k < m; ++k) work[k] *= kernel_[k];
    // Inverse via conjugation: ifft(x) = conj(fft(conj(x))) / m.
    for (auto& w : work) w = std::conj(w);
    radix2(work, bitrev_, twiddles_);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n_; ++k) data[k] = std::conj(work[k]) * scale * chirp_[k];
  }

  std::size_t n_;
  std::size_t bluestein_m_ = 0;
  std::vector<std::size_t> bitrev_;
  std::vector<Complex> twiddles_;
  std::vector<Complex> chirp_;
  std::vector<Complex> kernel_;
};

inline const FftPlan& fft_plan(std::size_t n) {
  thread_local std::map<std::size_t, FftPlan> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, FftPlan(n)).first;
  return it->second;
}

inline void fft_inplace(std::span<Complex> data) { fft_plan(data.size()).forward(data); }

/// Full 2D forward DFT of a real rows x cols matrix stored row-major.
inline std::vector<Complex> fft2d(std::span<const double> values, std::size_t rows, std::size_t cols) {
  if (values.size() != rows * cols) throw ShapeError("fft2d: buffer does not match shape");
  std::vector<Complex> out(values.begin(), values.end());
  const FftPlan& row_plan = fft_plan(cols);
  for (std::size_t r = 0; r < rows; ++r) row_plan.forward(std::span(out).subspan(r * cols, cols));
  const FftPlan& col_plan = fft_plan(rows);
  std::vector<Complex> column(rows);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) column[r] = out[r * cols + c];
    col_plan.forward(column);
    for (std::size_t r = 0; r < rows; ++r) out[r * cols + c] = column[r];
  }
  return out;
}

}  // namespace specnav
