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
#include <limits>
#include <queue>
#include <stack>
#include <vector>

#include "ewtf/graph/social_graph.hpp"

namespace ewtf::graph {

struct Centralities {
  std::vector<double> degree;
  std::vector<double> closeness;
  std::vector<double> betweenness;
  std::vector<double> eigenvector;
  std::vector<double> clustering;
};

/// Hop distances from one source; -1 marks unreachable nodes.
inline std::vector<long> bfs_hops(const UndirectedGraph& g, const std::vector<std::size_t>& sources) {
  std::vector<long> hops(g.size(), -1);
  std::queue<std::size_t> q;
  for (auto s : sources) {
    if (hops[s] == 0) continue;
    hops[s] = 0;
    q.push(s);
  }
  while (!q.empty()) {
    auto v = q.front();
    q.pop();
    for (auto w : g.neighbors(v)) {
      if (hops[w] < 0) {
        hops[w] = hops[v] + 1;
        q.push(w);
      }
    }
  }
  return hops;
}

inline std::vector<double> degree_centrality(const UndirectedGraph& g) {
  const std::size_t n = g.size();
  std::vector<double> dc(n, 0.0);
  if (n < 2) return dc;
  for (std::size_t v = 0; v < n; ++v) dc[v] = static_cast<double>(g.degree(v)) / static_cast<double>(n - 1);
  return dc;
}

// Component-scaled closeness so that disconnected graphs stay comparable:
// (r-1)/sum(d) * (r-1)/(n-1), r being the size of the reachable set.
inline std::vector<double> closeness_centrality(const UndirectedGraph& g) {
  const std::size_t n = g.size();
  std::vector<double> cc(n, 0.0);
  if (n < 2) return cc;
  for (std::size_t v = 0; v < n; ++v) {
    auto hops = bfs_hops(g, {v});
    double total = 0.0;
    double reach = 0.0;
    for (auto h : hops) {
      if (h > 0) {
        total += static_cast<double>(h);
        reach += 1.0;
      }
    }
    if (total > 0.0) cc[v] = (reach / total) * (reach / static_cast<double>(n - 1));
  }
  return cc;
}

// Brandes accumulation on unweighted shortest paths.
inline std::vector<double> betweenness_centrality(const UndirectedGraph& g) {
  const std::size_t n = g.size();
  std::vector<double> bc(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    std::stack<std::size_t> order;
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<double> sigma(n, 0.0), delta(n, 0.0);
    std::vector<long> dist(n, -1);
    sigma[s] = 1.0;
    dist[s] = 0;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty()) {
      auto v = q.front();
      q.pop();
      order.push(v);
      for (auto w : g.neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    while (!order.empty()) {
      auto w = order.top();
      order.pop();
      for (auto v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  if (n > 2) {
    // Each unordered pair was counted twice.
    const double scale = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
    for (auto& b : bc) b *= scale;
  } else {
    std::fill(bc.begin(), bc.end(), 0.0);
  }
  return bc;
}

/// Principal eigenvector of the weighted adjacency, max-normalized.
/// Power iteration runs on W + I to avoid oscillation on bipartite graphs.
inline std::vector<double> eigenvector_centrality(const UndirectedGraph& g, double tol = 1e-10,
                                                  std::size_t max_iter = 100000) {
  const std::size_t n = g.size();
  std::vector<double> x(n, 1.0), next(n);
  if (g.edge_count() == 0) return std::vector<double>(n, 0.0);
  for (std::size_t it = 0; it < max_iter; ++it) {
    for (std::size_t v = 0; v < n; ++v) {
      double acc = x[v];
      for (auto w : g.neighbors(v)) acc += g.weight(v, w) * x[w];
      next[v] = acc;
    }
    const double top = *std::max_element(next.begin(), next.end());
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] /= top;
      change = std::max(change, std::abs(next[v] - x[v]));
    }
    x.swap(next);
    if (change < tol) break;
  }
  for (std::size_t v = 0; v < n; ++v)
    if (g.degree(v) == 0) x[v] = 0.0;
  return x;
}

inline std::vector<double> clustering_coefficient(const UndirectedGraph& g) {
  const std::size_t n = g.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    const auto& nb = g.neighbors(v);
    const std::size_t k = nb.size();
    if (k < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b)
        if (g.has_edge(nb[a], nb[b])) ++links;
    c[v] = 2.0 * static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1));
  }
  return c;
}

inline Centralities compute_centralities(const UndirectedGraph& g) {
  return {degree_centrality(g), closeness_centrality(g), betweenness_centrality(g), eigenvector_centrality(g),
          clustering_coefficient(g)};
}

}  // namespace ewtf::graph
