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

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "ewtf/core/error.hpp"
#include "ewtf/core/random.hpp"
#include "ewtf/graph/social_graph.hpp"

namespace ewtf::game {

using graph::UndirectedGraph;

/// v(C) counts coalition members with at least `neighbor_threshold`
/// neighbours inside C.
struct CharacteristicFn {
  std::size_t neighbor_threshold = 1;

  void validate() const {
    require(neighbor_threshold >= 1, ErrorCode::invalid_argument, "neighbor threshold must be >= 1");
  }
};

enum class ShapleyMode { exact, monte_carlo };

inline const char* to_string(ShapleyMode m) { return m == ShapleyMode::exact ? "exact" : "monte_carlo"; }

struct ShapleyResult {
  std::vector<double> sp;
  std::vector<double> std_error;  // zeros in exact mode
  ShapleyMode mode = ShapleyMode::exact;
  std::size_t num_samples = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t default_exact_limit = 12;

inline std::size_t characteristic_value(const std::vector<std::size_t>& coalition, const UndirectedGraph& g,
                                        const CharacteristicFn& fn) {
  fn.validate();
  std::vector<char> inside(g.size(), 0);
  for (auto v : coalition) {
    require(v < g.size(), ErrorCode::invalid_argument, "coalition member out of range");
    inside[v] = 1;
  }
  std::size_t value = 0;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!inside[v]) continue;
    std::size_t k = 0;
    for (auto w : g.neighbors(v)) k += inside[w];
    if (k >= fn.neighbor_threshold) ++value;
  }
  return value;
}

namespace detail {

inline std::size_t value_of_mask(std::uint32_t mask, const std::vector<std::uint32_t>& nbr_mask, std::size_t x) {
  std::size_t value = 0;
  for (std::uint32_t rest = mask; rest; rest &= rest - 1) {
    const auto v = static_cast<std::size_t>(std::countr_zero(rest));
    if (static_cast<std::size_t>(std::popcount(nbr_mask[v] & mask)) >= x) ++value;
  }
  return value;
}

}  // namespace detail

/// Exact values by weighting every marginal contribution v(C+i) - v(C)
/// with |C|!(n-|C|-1)!/n!.
inline ShapleyResult shapley_exact(const UndirectedGraph& g, const CharacteristicFn& fn,
                                   std::size_t exact_limit = default_exact_limit) {
  fn.validate();
  const std::size_t n = g.size();
  require(n <= exact_limit && n <= 24, ErrorCode::too_large,
          "exact Shapley limited to " + std::to_string(exact_limit) + " nodes, got " + std::to_string(n));
  ShapleyResult res;
  res.sp.assign(n, 0.0);
  res.std_error.assign(n, 0.0);
  if (n == 0) return res;

  std::vector<std::uint32_t> nbr(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    for (auto w : g.neighbors(v)) nbr[v] |= 1u << w;

  const std::uint32_t full = n == 32 ? ~0u : (1u << n) - 1u;
  std::vector<double> value(std::size_t{1} << n);
  for (std::uint32_t m = 0; m <= full; ++m) {
    value[m] = static_cast<double>(detail::value_of_mask(m, nbr, fn.neighbor_threshold));
    if (m == full) break;
  }

  // weight[s] = s!(n-s-1)!/n!
  std::vector<double> weight(n);
  for (std::size_t s = 0; s < n; ++s)
    weight[s] = std::exp(std::lgamma(s + 1.0) + std::lgamma(static_cast<double>(n - s)) - std::lgamma(n + 1.0));

  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t bit = 1u << i;
    double acc = 0.0;
    for (std::uint32_t m = 0; m <= full; ++m) {
      if (!(m & bit)) acc += weight[static_cast<std::size_t>(std::popcount(m))] * (value[m | bit] - value[m]);
      if (m == full) break;
    }
    res.sp[i] = acc;
  }
  return res;
}

/// Permutation-sampling estimate with per-node standard errors.
inline ShapleyResult shapley_monte_carlo(const UndirectedGraph& g, const CharacteristicFn& fn,
                                         std::size_t num_samples, std::uint64_t seed) {
  fn.validate();
  require(num_samples >= 1, ErrorCode::invalid_argument, "num_samples must be >= 1");
  const std::size_t n = g.size();
  ShapleyResult res;
  res.mode = ShapleyMode::monte_carlo;
  res.num_samples = num_samples;
  res.seed = seed;
  res.sp.assign(n, 0.0);
  res.std_error.assign(n, 0.0);
  if (n == 0) return res;

  Rng rng(seed);
  const std::size_t x = fn.neighbor_threshold;
  std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
  std::vector<std::size_t> perm(n), inside_count(n);
  std::vector<char> inside(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  for (std::size_t s = 0; s < num_samples; ++s) {
    shuffle(perm.begin(), perm.end(), rng);
    std::fill(inside.begin(), inside.end(), 0);
    std::fill(inside_count.begin(), inside_count.end(), 0);
    for (auto v : perm) {
      double gain = inside_count[v] >= x ? 1.0 : 0.0;
      inside[v] = 1;
      for (auto w : g.neighbors(v)) {
        ++inside_count[w];
        if (inside[w] && inside_count[w] == x) gain += 1.0;
      }
      sum[v] += gain;
      sumsq[v] += gain * gain;
    }
  }
  const double ns = static_cast<double>(num_samples);
  for (std::size_t v = 0; v < n; ++v) {
    res.sp[v] = sum[v] / ns;
    if (num_samples > 1) {
      const double var = std::max(0.0, (sumsq[v] - ns * res.sp[v] * res.sp[v]) / (ns - 1.0));
      res.std_error[v] = std::sqrt(var / ns);
    }
  }
  return res;
}

}  // namespace ewtf::game
