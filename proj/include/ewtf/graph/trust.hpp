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
#include <vector>

#include "ewtf/core/error.hpp"
#include "ewtf/graph/social_graph.hpp"

namespace ewtf::graph {

/// Thresholds and combination weights for the three trust modes.
struct TrustModel {
  double k = 0.5;  // direct trust threshold
  double l = 0.5;  // indirect trust threshold
  double s = 0.5;  // recommendation trust threshold
  double w_d = 0.5;
  double w_i = 0.3;
  double w_r = 0.2;

  void validate() const {
    for (double t : {k, l, s})
      require(t >= 0.5 && t < 1.0, ErrorCode::invalid_argument, "trust thresholds must lie in [0.5, 1)");
    require(w_d >= 0 && w_i >= 0 && w_r >= 0, ErrorCode::invalid_argument, "trust weights must be non-negative");
    require(std::abs(w_d + w_i + w_r - 1.0) <= 1e-12, ErrorCode::invalid_argument, "trust weights must sum to 1");
  }
};

using Matrix2 = std::vector<std::vector<double>>;

struct TrustGraph {
  TrustModel model;
  Matrix2 direct;          // DT(x, y)
  Matrix2 indirect;        // IDT(x, y)
  Matrix2 recommendation;  // RT(x, y)
  Matrix2 trust;           // T_xy, symmetric
  std::vector<double> reputation;
  UndirectedGraph adjacency;  // trust edges weighted by T_xy

  std::size_t size() const { return reputation.size(); }
};

/// Direct, indirect and recommendation trust for every ordered pair, the
/// combined degree T_xy, and the undirected trust graph.
///
/// DT(x,y) is x's interaction count toward y relative to x's busiest arc.
/// IDT(x,y) is the best max-min path strength through a single intermediary.
/// RT(x,y) averages DT(z,y) * r_z over recommenders z that x interacts with
/// and that pass the direct threshold, weighted by DT(x,z).
/// A trust edge joins two users who have interacted at least once (either
/// direction) whenever any of the three modes clears its threshold.
inline TrustGraph build_trust_graph(const SocialGraph& g, const TrustModel& model) {
  model.validate();
  require(!g.empty(), ErrorCode::empty_graph, "social graph has no nodes");
  const std::size_t n = g.size();
  const auto counts = g.count_matrix();

  TrustGraph tg;
  tg.model = model;
  tg.direct.assign(n, std::vector<double>(n, 0.0));
  tg.indirect = tg.recommendation = tg.trust = tg.direct;
  tg.reputation.resize(n);
  for (std::size_t v = 0; v < n; ++v) tg.reputation[v] = g.node(v).reputation();

  for (std::size_t x = 0; x < n; ++x) {
    const double busiest = *std::max_element(counts[x].begin(), counts[x].end());
    if (busiest <= 0.0) continue;
    for (std::size_t y = 0; y < n; ++y) tg.direct[x][y] = counts[x][y] / busiest;
  }
  const auto& dt = tg.direct;

  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      double best = 0.0;
      double num = 0.0, den = 0.0;
      for (std::size_t z = 0; z < n; ++z) {
        if (z == x || z == y) continue;
        best = std::max(best, std::min(dt[x][z], dt[z][y]));
        if (dt[x][z] > 0.0 && dt[z][y] >= model.k) {
          num += dt[x][z] * dt[z][y] * tg.reputation[z];
          den += dt[x][z];
        }
      }
      tg.indirect[x][y] = best;
      tg.recommendation[x][y] = den > 0.0 ? num / den : 0.0;
    }
  }

  tg.adjacency = UndirectedGraph(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      tg.trust[x][y] = model.w_d * 0.5 * (dt[x][y] + dt[y][x]) +
                       model.w_i * 0.5 * (tg.indirect[x][y] + tg.indirect[y][x]) +
                       model.w_r * 0.5 * (tg.reputation[x] + tg.reputation[y]);
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const bool interacted = counts[x][y] > 0.0 || counts[y][x] > 0.0;
      if (!interacted) continue;
      auto fires = [&](std::size_t a, std::size_t b) {
        return dt[a][b] >= model.k || tg.indirect[a][b] >= model.l || tg.recommendation[a][b] >= model.s;
      };
      if (fires(x, y) || fires(y, x)) tg.adjacency.add_edge(x, y, tg.trust[x][y]);
    }
  }
  return tg;
}

}  // namespace ewtf::graph
