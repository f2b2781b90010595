// Copyright 2026 The ewtforecast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace ewtf::ewt {

using Complex = std::complex<double>;

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void fft_radix2(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        // Twiddles computed directly rather than by recurrence to keep the
        // round-off at the 1e-15 level for long transforms.
        const Complex w = std::polar(1.0, ang * static_cast<double>(k));
        const Complex u = a[i + k];
        const Complex v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

inline void dft_direct(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  std::vector<Complex> twiddle(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k)
    twiddle[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc{};
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      acc += a[t] * twiddle[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    out[k] = acc;
  }
  a.swap(out);
}

}  // namespace detail

/// Forward DFT, X_k = sum_t x_t exp(-2 pi i k t / n). Radix-2 for powers of
/// two, direct summation otherwise (the lengths used here are short).
inline std::vector<Complex> dft(std::span<const Complex> x) {
  std::vector<Complex> a(x.begin(), x.end());
  if (detail::is_power_of_two(a.size()))
    detail::fft_radix2(a, false);
  else
    detail::dft_direct(a, false);
  return a;
}

inline std::vector<Complex> dft(std::span<const double> x) {
  std::vector<Complex> c(x.begin(), x.end());
  return dft(std::span<const Complex>(c));
}

/// Inverse DFT including the 1/n factor.
inline std::vector<Complex> idft(std::span<const Complex> x) {
  std::vector<Complex> a(x.begin(), x.end());
  if (detail::is_power_of_two(a.size()))
    detail::fft_radix2(a, true);
  else
    detail::dft_direct(a, true);
  const double inv = 1.0 / static_cast<double>(a.size());
  for (auto& v : a) v *= inv;
  return a;
}

/// Angular frequency in [0, pi] of DFT bin k for length n (negative-frequency
/// bins fold onto their positive mirror).
inline double bin_frequency(std::size_t k, std::size_t n) {
  const std::size_t folded = k <= n / 2 ? k : n - k;
  return 2.0 * std::numbers::pi * static_cast<double>(folded) / static_cast<double>(n);
}

}  // namespace ewtf::ewt
