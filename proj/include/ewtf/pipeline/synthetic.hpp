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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "ewtf/core/random.hpp"
#include "ewtf/pipeline/bundle.hpp"

namespace ewtf::pipeline {

/// One pure tone A cos(2 pi f n + phi); f in cycles per sample.
struct Tone {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
};

struct SyntheticSpec {
  std::size_t length = 120;
  Period start{2015, 1};
  double level = 100.0;
  double seasonal_amplitude = 10.0;
  double seasonal_period = 12.0;
  double seasonal_phase = 0.0;
  double trend_slope = 0.5;
  double cycle_amplitude = 0.0;
  double cycle_period = 40.0;
  double noise_sd = 1.0;
  std::vector<Tone> tones;

  bool with_social = true;
  std::size_t graph_size = 20;
  std::size_t clusters = 4;
  std::size_t coalition_size = 3;
  std::size_t platforms = 2;
  double leader_signal = 1.0;  // 0 leaves the features uninformative

  void validate() const {
    require(length >= 4, ErrorCode::invalid_argument, "synthetic series needs at least 4 points");
    require(seasonal_amplitude >= 0 && cycle_amplitude >= 0 && noise_sd >= 0 && leader_signal >= 0,
            ErrorCode::invalid_argument, "amplitudes, noise and signal strength must be >= 0");
    require(seasonal_period > 0 && cycle_period > 0, ErrorCode::invalid_argument, "periods must be positive");
    for (const auto& t : tones) require(t.amplitude >= 0, ErrorCode::invalid_argument, "tone amplitudes must be >= 0");
    if (!with_social) return;
    require(clusters >= 2 && graph_size >= 2 * clusters, ErrorCode::invalid_argument,
            "graph needs at least 2 clusters of at least 2 nodes");
    require(coalition_size >= 2 && coalition_size <= graph_size, ErrorCode::invalid_argument,
            "planted coalition must have between 2 and graph_size members");
    require(coalition_size <= graph_size - graph_size / clusters, ErrorCode::invalid_argument,
            "planted coalition does not fit outside the leaderless cluster");
    require(platforms >= 1, ErrorCode::invalid_argument, "at least one platform is required");
  }
};

struct SyntheticBundle {
  Bundle bundle;
  std::vector<double> clean;             // noiseless analytic target
  std::vector<std::string> planted_ids;  // sorted
  std::vector<std::string> signal_columns;
};

/// Deterministic part of the target at step t.
inline double synthetic_signal(const SyntheticSpec& s, std::size_t t) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double n = static_cast<double>(t);
  double v = s.level + s.trend_slope * n + s.seasonal_amplitude * std::sin(two_pi * n / s.seasonal_period + s.seasonal_phase) +
             s.cycle_amplitude * std::sin(two_pi * n / s.cycle_period);
  for (const auto& tone : s.tones) v += tone.amplitude * std::cos(two_pi * tone.frequency * n + tone.phase);
  return v;
}

/// Leader-driven columns on every platform.
inline bool is_signal_feature(const std::string& feature) { return feature == "num_posts" || feature == "avg_sentiment"; }

namespace detail {

inline std::string node_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u%02zu", i);
  return buf;
}

inline long count_between(Rng& rng, long lo, long hi) {
  return lo + static_cast<long>(uniform_index(rng, static_cast<std::size_t>(hi - lo + 1)));
}

}  // namespace detail

/// Target = level + trend + seasonal + cycle + tones + Gaussian noise. With
/// `with_social`, also a clustered interaction graph whose last cluster has
/// no leader and hangs off the rest by one weak tie, a planted coalition of
/// hubs spread over the other clusters, and features in which the
/// `num_posts` / `avg_sentiment` columns (attributed to the coalition) carry
/// the next period's noise term while every other column is AR(1) noise
/// attributed to the leaderless cluster.
inline SyntheticBundle generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  SyntheticBundle out;
  Rng noise_rng(derive_seed(seed, "target_noise"));
  std::vector<double> eps(spec.length + 1);
  for (auto& e : eps) e = standard_normal(noise_rng);
  std::vector<double> y(spec.length);
  out.clean.resize(spec.length);
  for (std::size_t t = 0; t < spec.length; ++t) {
    out.clean[t] = synthetic_signal(spec, t);
    y[t] = spec.noise_sd > 0 ? out.clean[t] + spec.noise_sd * eps[t] : out.clean[t];
  }
  out.bundle.target = TimeSeries("target", spec.start, Frequency::monthly, y);
  if (!spec.with_social) return out;

  // Graph.
  Rng grng(derive_seed(seed, "graph"));
  const std::size_t n = spec.graph_size, c = spec.clusters;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  shuffle(order.begin(), order.end(), grng);
  std::vector<std::vector<std::size_t>> cluster(c);
  for (std::size_t k = 0; k < n; ++k) cluster[k * c / n].push_back(order[k]);
  std::vector<char> is_leader(n, 0);
  std::vector<std::vector<std::size_t>> leaders_in(c);
  for (std::size_t l = 0; l < spec.coalition_size; ++l) {
    const auto cl = l % (c - 1);
    const auto slot = l / (c - 1);
    const auto v = cluster[cl][slot];
    is_leader[v] = 1;
    leaders_in[cl].push_back(v);
  }

  graph::SocialGraph g;
  for (std::size_t i = 0; i < n; ++i) {
    graph::NodeRecord r;
    r.id = detail::node_id(i);
    if (is_leader[i]) {
      r.goodwill = uniform(grng, 0.8, 0.95);
      r.power = uniform(grng, 0.8, 0.95);
      r.uprightness = uniform(grng, 0.8, 0.95);
      r.valence = uniform(grng, 0.5, 1.0);
    } else {
      r.goodwill = uniform(grng, 0.2, 0.7);
      r.power = uniform(grng, 0.2, 0.7);
      r.uprightness = uniform(grng, 0.2, 0.7);
      r.valence = uniform(grng, -0.2, 1.0);
    }
    g.add_node(r);
  }
  std::vector<std::size_t> leaders;
  for (std::size_t i = 0; i < n; ++i)
    if (is_leader[i]) leaders.push_back(i);
  auto arc = [&](std::size_t a, std::size_t b, long lo, long hi) { g.add_arc(a, b, detail::count_between(grng, lo, hi)); };
  for (auto a : leaders)
    for (auto b : leaders)
      if (a != b) arc(a, b, 20, 40);
  for (std::size_t cl = 0; cl + 1 < c; ++cl) {
    const auto& members = cluster[cl];
    for (auto l : leaders_in[cl])
      for (auto m : members)
        if (!is_leader[m]) {
          arc(l, m, 8, 15);
          arc(m, l, 10, 20);
        }
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const auto u = members[a], v = members[b];
        if (is_leader[u] || is_leader[v]) continue;
        if (uniform01(grng) < 0.3) {
          arc(u, v, 1, 3);
          arc(v, u, 1, 3);
        }
      }
  }
  const auto& last = cluster[c - 1];
  for (std::size_t k = 0; k < last.size(); ++k) {
    const auto u = last[k], v = last[(k + 1) % last.size()];
    if (last.size() == 2 && k == 1) break;
    arc(u, v, 4, 8);
    arc(v, u, 4, 8);
  }
  std::size_t bridge = cluster[0][0];
  for (auto m : cluster[0])
    if (!is_leader[m]) {
      bridge = m;
      break;
    }
  g.add_arc(last[0], bridge, 1);
  g.add_arc(bridge, last[0], 1);

  for (auto l : leaders) out.planted_ids.push_back(g.node(l).id);
  std::sort(out.planted_ids.begin(), out.planted_ids.end());

  // Features.
  Rng frng(derive_seed(seed, "features"));
  FeatureTable f;
  f.start = spec.start;
  f.frequency = Frequency::monthly;
  std::vector<std::string> features;
  for (auto* v : kVolumeFeatures) features.emplace_back(v);
  for (auto* v : kValenceFeatures) features.emplace_back(v);
  for (std::size_t p = 0; p < spec.platforms; ++p)
    for (const auto& feat : features) f.columns.push_back("p" + std::to_string(p + 1) + "." + feat);
  f.rows.assign(spec.length, std::vector<double>(f.columns.size()));
  std::vector<std::string> leader_ids, quiet_ids;
  for (auto l : leaders) leader_ids.push_back(g.node(l).id);
  for (auto v : last) quiet_ids.push_back(g.node(v).id);
  std::sort(quiet_ids.begin(), quiet_ids.end());
  for (std::size_t col = 0; col < f.columns.size(); ++col) {
    const auto feat = split_column(f.columns[col]).second;
    const bool signal = is_signal_feature(feat);
    const bool bounded = feat == "avg_sentiment" || feat == "avg_polarity";
    const double base = bounded ? 0.0 : (feat == "avg_comment_length" ? 40.0 : 100.0);
    const double scale = bounded ? 0.5 : 15.0;
    double ar = standard_normal(frng);
    for (std::size_t t = 0; t < spec.length; ++t) {
      ar = 0.8 * ar + 0.6 * standard_normal(frng);
      const double z = signal ? spec.leader_signal * eps[t + 1] + 0.3 * standard_normal(frng) : ar;
      f.rows[t][col] = bounded ? std::tanh(scale * z) : std::max(0.0, base + scale * z);
    }
    if (signal) out.signal_columns.push_back(f.columns[col]);
    out.bundle.attribution.column_nodes[f.columns[col]] = signal ? leader_ids : quiet_ids;
  }
  for (auto& [col, ids] : out.bundle.attribution.column_nodes) std::sort(ids.begin(), ids.end());
  out.bundle.features = std::move(f);
  out.bundle.graph = std::move(g);
  return out;
}

}  // namespace ewtf::pipeline
