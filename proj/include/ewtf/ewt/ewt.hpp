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

// Empirical wavelet transform: a filter bank whose band edges sit halfway
// between the dominant maxima of the input's Fourier magnitude. One low-pass
// scaling filter plus band-pass wavelet filters with Meyer-type transitions
// form a tight frame, so the components sum back to the input.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "ewtf/core/error.hpp"
#include "ewtf/ewt/fft.hpp"

namespace ewtf::ewt {

inline constexpr double kPi = std::numbers::pi;

struct EwtConfig {
  std::optional<std::size_t> num_components;  // nullopt selects `auto`
  std::optional<double> gamma;                // nullopt selects `auto`
  double min_peak_prominence = 0.1;           // fraction of the spectral maximum
  std::size_t max_auto_components = 6;

  void validate() const {
    if (num_components) require(*num_components >= 1, ErrorCode::invalid_argument, "num_components must be >= 1");
    if (gamma) require(*gamma > 0.0 && *gamma < 1.0, ErrorCode::invalid_argument, "gamma must lie in (0, 1)");
    require(min_peak_prominence >= 0.0 && min_peak_prominence <= 1.0, ErrorCode::invalid_argument,
            "min_peak_prominence must lie in [0, 1]");
    require(max_auto_components >= 1, ErrorCode::invalid_argument, "max_auto_components must be >= 1");
  }
};

struct SpectralBoundaries {
  std::vector<double> omega_maxima;  // ascending, H_f entries
  std::vector<double> delta;         // H_f - 1 midpoints, then the terminal boundary pi
  double gamma_used = 0.0;

  std::size_t num_components() const { return omega_maxima.size(); }
  friend bool operator==(const SpectralBoundaries&, const SpectralBoundaries&) = default;
};

struct EwtFilterBank {
  std::vector<double> phi1;               // sampled on omega_k = 2 pi k / grid_size, k = 0..grid_size/2
  std::vector<std::vector<double>> psis;  // H_f - 1 wavelet responses on the same grid
  std::size_t grid_size = 0;
};

struct EwtDecomposition {
  std::vector<std::vector<double>> components;  // low-pass first, then band-pass in ascending frequency
  SpectralBoundaries boundaries;
  std::size_t original_length = 0;
};

/// One-sided DFT (bins 0..n/2) of a real series.
inline std::vector<Complex> compute_spectrum(std::span<const double> series) {
  require(series.size() >= 4, ErrorCode::too_short, "spectrum needs at least 4 samples");
  auto full = dft(series);
  full.resize(series.size() / 2 + 1);
  return full;
}

namespace detail {

struct Peak {
  std::size_t bin;
  double height;
  double prominence;
};

inline std::vector<Peak> local_maxima(std::span<const double> mag) {
  const std::size_t m = mag.size();
  double overall = 0.0;
  for (double v : mag) overall = std::max(overall, v);
  const double floor = std::max(1e-10 * overall, 1e-300);

  std::vector<Peak> peaks;
  for (std::size_t k = 1; k < m; ++k) {
    const bool left = mag[k] > mag[k - 1];
    const bool right = k + 1 >= m || mag[k] >= mag[k + 1];
    if (left && right && mag[k] > floor) peaks.push_back({k, mag[k], 0.0});
  }
  // Topographic prominence: height above the higher of the two minima found
  // walking outwards until a taller point (or the spectrum edge).
  for (auto& p : peaks) {
    double left_min = p.height;
    for (std::size_t j = p.bin; j-- > 1;) {  // DC excluded from the walk
      if (mag[j] > p.height) break;
      left_min = std::min(left_min, mag[j]);
    }
    double right_min = p.height;
    for (std::size_t j = p.bin + 1; j < m; ++j) {
      if (mag[j] > p.height) break;
      right_min = std::min(right_min, mag[j]);
    }
    p.prominence = p.height - std::max(left_min, right_min);
    if (p.bin + 1 >= m) p.prominence = p.height - left_min;
    if (p.bin == 1) p.prominence = p.height - right_min;
  }
  return peaks;
}

}  // namespace detail

/// Frequencies (ascending, in (0, pi]) of the dominant maxima of a one-sided
/// spectrum taken from a length-`n` transform. The DC bin never counts.
inline std::vector<double> detect_maxima(std::span<const Complex> spectrum, std::size_t n, const EwtConfig& config) {
  config.validate();
  require(!spectrum.empty(), ErrorCode::invalid_argument, "spectrum is empty");
  std::vector<double> mag(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) mag[k] = std::abs(spectrum[k]);

  auto peaks = detail::local_maxima(mag);
  if (peaks.empty()) fail(ErrorCode::no_peaks, "spectrum has no local maxima away from DC");

  double global = 0.0;
  for (std::size_t k = 1; k < mag.size(); ++k) global = std::max(global, mag[k]);

  std::vector<detail::Peak> chosen;
  if (config.num_components) {
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const detail::Peak& a, const detail::Peak& b) { return a.height > b.height; });
    const std::size_t take = std::min(*config.num_components, peaks.size());
    chosen.assign(peaks.begin(), peaks.begin() + static_cast<std::ptrdiff_t>(take));
  } else {
    for (const auto& p : peaks)
      if (p.prominence >= config.min_peak_prominence * global) chosen.push_back(p);
    if (chosen.empty()) fail(ErrorCode::no_peaks, "no spectral peak reaches the prominence threshold");
    std::stable_sort(chosen.begin(), chosen.end(),
                     [](const detail::Peak& a, const detail::Peak& b) { return a.prominence > b.prominence; });
    if (chosen.size() > config.max_auto_components) chosen.resize(config.max_auto_components);
  }
  std::vector<double> freqs;
  for (const auto& p : chosen) freqs.push_back(bin_frequency(p.bin, n));
  std::sort(freqs.begin(), freqs.end());
  return freqs;
}

/// Largest gamma for which neighbouring transition bands do not overlap.
/// `delta` includes the terminal boundary pi. Returns 1 when there is no pair.
inline double admissible_gamma_bound(std::span<const double> delta) {
  double bound = 1.0;
  for (std::size_t k = 0; k + 1 < delta.size(); ++k)
    bound = std::min(bound, (delta[k + 1] - delta[k]) / (delta[k + 1] + delta[k]));
  return bound;
}

inline SpectralBoundaries compute_boundaries(std::span<const double> maxima, const EwtConfig& config) {
  config.validate();
  require(!maxima.empty(), ErrorCode::invalid_argument, "at least one maximum is required");
  for (std::size_t k = 0; k < maxima.size(); ++k) {
    require(maxima[k] > 0.0 && maxima[k] <= kPi, ErrorCode::invalid_argument, "maxima must lie in (0, pi]");
    if (k > 0) require(maxima[k] > maxima[k - 1], ErrorCode::invalid_argument, "maxima must be strictly ascending");
  }
  SpectralBoundaries b;
  b.omega_maxima.assign(maxima.begin(), maxima.end());
  for (std::size_t k = 0; k + 1 < maxima.size(); ++k) b.delta.push_back(0.5 * (maxima[k] + maxima[k + 1]));
  b.delta.push_back(kPi);
  const double bound = admissible_gamma_bound(b.delta);
  if (config.gamma) {
    if (!(*config.gamma < bound)) {
      fail(ErrorCode::inadmissible_gamma,
           "gamma " + std::to_string(*config.gamma) + " violates the tight-frame bound " + std::to_string(bound));
    }
    b.gamma_used = *config.gamma;
  } else {
    b.gamma_used = 0.9 * bound;
  }
  return b;
}

/// Meyer transition polynomial, 0 below 0 and 1 above 1, with
/// beta(t) + beta(1 - t) = 1 on [0, 1].
inline double meyer_beta(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double t2 = t * t;
  return t2 * t2 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t2 * t);
}

namespace detail {

inline double transition_arg(double w, double gamma, double delta) {
  return (w - (1.0 - gamma) * delta) / (2.0 * gamma * delta);
}

}  // namespace detail

/// Scaling-filter response at |omega|.
inline double scaling_response(const SpectralBoundaries& b, double omega) {
  const double w = std::abs(omega);
  if (b.num_components() <= 1) return 1.0;
  const double g = b.gamma_used;
  const double d1 = b.delta.front();
  if (w < (1.0 - g) * d1) return 1.0;
  if (w <= (1.0 + g) * d1) return std::cos(0.5 * kPi * meyer_beta(detail::transition_arg(w, g, d1)));
  return 0.0;
}

/// Response of band-pass filter `index` (0-based; band between delta[index]
/// and delta[index + 1]) at |omega|. The band ending at pi has no upper edge.
inline double wavelet_response(const SpectralBoundaries& b, std::size_t index, double omega) {
  const double w = std::abs(omega);
  const double g = b.gamma_used;
  const double lo = b.delta[index];
  const double hi = b.delta[index + 1];
  const bool terminal = index + 2 == b.delta.size();
  if (w < (1.0 - g) * lo) return 0.0;
  if (w <= (1.0 + g) * lo) return std::sin(0.5 * kPi * meyer_beta(detail::transition_arg(w, g, lo)));
  if (terminal || w < (1.0 - g) * hi) return 1.0;
  if (w <= (1.0 + g) * hi) return std::cos(0.5 * kPi * meyer_beta(detail::transition_arg(w, g, hi)));
  return 0.0;
}

inline EwtFilterBank build_filter_bank(const SpectralBoundaries& b, std::size_t grid_size) {
  require(grid_size >= 2, ErrorCode::invalid_argument, "grid_size must be >= 2");
  require(b.delta.size() == b.omega_maxima.size() && !b.delta.empty(), ErrorCode::invalid_argument,
          "boundaries are inconsistent with the maxima count");
  require(b.num_components() <= 1 || b.gamma_used < admissible_gamma_bound(b.delta), ErrorCode::inadmissible_gamma,
          "gamma_used violates the tight-frame bound");
  EwtFilterBank fb;
  fb.grid_size = grid_size;
  const std::size_t m = grid_size / 2 + 1;
  fb.phi1.resize(m);
  fb.psis.assign(b.num_components() - 1, std::vector<double>(m));
  for (std::size_t k = 0; k < m; ++k) {
    const double w = bin_frequency(k, grid_size);
    fb.phi1[k] = scaling_response(b, w);
    for (std::size_t j = 0; j + 1 < b.num_components(); ++j) fb.psis[j][k] = wavelet_response(b, j, w);
  }
  return fb;
}

/// Filters `series` through a fixed set of boundaries. Each component is the
/// band's analysis coefficient passed back through the same filter
/// (multiresolution form, spectrum x response^2). The squared responses sum to
/// one, so the components add up to the input.
inline EwtDecomposition decompose_with(std::span<const double> series, const SpectralBoundaries& b) {
  require(series.size() >= 4, ErrorCode::too_short, "decomposition needs at least 4 samples");
  const std::size_t n = series.size();
  const auto bank = build_filter_bank(b, n);
  const auto spectrum = dft(series);

  EwtDecomposition out;
  out.boundaries = b;
  out.original_length = n;
  out.components.reserve(b.num_components());
  std::vector<Complex> filtered(n);
  auto apply = [&](const std::vector<double>& response) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t folded = k <= n / 2 ? k : n - k;
      filtered[k] = spectrum[k] * (response[folded] * response[folded]);
    }
    const auto time = idft(filtered);
    std::vector<double> real(n);
    for (std::size_t t = 0; t < n; ++t) real[t] = time[t].real();
    out.components.push_back(std::move(real));
  };
  apply(bank.phi1);
  for (const auto& psi : bank.psis) apply(psi);
  return out;
}

inline EwtDecomposition decompose(std::span<const double> series, const EwtConfig& config) {
  require(series.size() >= 4, ErrorCode::too_short, "decomposition needs at least 4 samples");
  const auto spectrum = compute_spectrum(series);
  const auto maxima = detect_maxima(spectrum, series.size(), config);
  const auto boundaries = compute_boundaries(maxima, config);
  return decompose_with(series, boundaries);
}

inline std::vector<double> reconstruct(const EwtDecomposition& d) {
  std::vector<double> out(d.original_length, 0.0);
  for (const auto& c : d.components)
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += c[t];
  return out;
}

}  // namespace ewtf::ewt
