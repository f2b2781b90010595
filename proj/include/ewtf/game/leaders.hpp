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
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ewtf/core/error.hpp"
#include "ewtf/game/payoff.hpp"
#include "ewtf/game/shapley.hpp"
#include "ewtf/game/synergy.hpp"
#include "ewtf/graph/centrality.hpp"
#include "ewtf/graph/trust.hpp"

namespace ewtf::game {

struct SearchConfig {
  double ec_percentile = 50.0;
  bool agreement_filter = true;
  std::size_t max_size = 5;
  std::size_t exhaustive_pool_limit = 18;
  std::size_t beam_width = 8;
  std::size_t exact_shapley_limit = default_exact_limit;
  std::size_t mc_samples = 20000;
  std::uint64_t seed = 0;

  void validate() const {
    require(ec_percentile >= 0 && ec_percentile <= 100, ErrorCode::invalid_argument, "percentile must lie in [0, 100]");
    require(max_size >= 2, ErrorCode::invalid_argument, "max coalition size must be >= 2");
    require(beam_width >= 1, ErrorCode::invalid_argument, "beam width must be >= 1");
    require(mc_samples >= 1, ErrorCode::invalid_argument, "mc_samples must be >= 1");
  }
};

struct Coalition {
  std::vector<std::size_t> members;  // ascending node indices
  std::vector<std::string> ids;      // ascending lexicographic
  double phi = 0.0;
  double sp_sum = 0.0;
  std::size_t x_size = 0;
};

struct LeaderDetection {
  Coalition winner;
  graph::TrustGraph trust;
  graph::Centralities centralities;
  ShapleyResult shapley;
  std::vector<std::size_t> pool;  // candidates entering the search
  double distance = 0.0;          // scalar d fed to the S4 game
  bool exhaustive = true;
  std::size_t evaluated = 0;
  std::vector<std::string> warnings;
};

/// Linear-interpolation percentile (the common "type 7" definition).
inline double percentile(std::vector<double> values, double q) {
  require(!values.empty(), ErrorCode::invalid_argument, "percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

/// Strict ordering: higher phi, then higher Shapley sum, then smaller ids.
inline bool ranks_above(const Coalition& a, const Coalition& b) {
  auto differs = [](double u, double v) { return std::abs(u - v) > 1e-12 * std::max(1.0, std::max(std::abs(u), std::abs(v))); };
  if (differs(a.phi, b.phi)) return a.phi > b.phi;
  if (differs(a.sp_sum, b.sp_sum)) return a.sp_sum > b.sp_sum;
  return a.ids < b.ids;
}

inline Coalition make_coalition(std::vector<std::size_t> members, const graph::SocialGraph& g,
                                const graph::Centralities& c, const ShapleyResult& sp, const SynergyParams& p) {
  std::sort(members.begin(), members.end());
  Coalition out;
  out.phi = coalition_synergy(members, c, sp, p);
  for (auto m : members) {
    out.sp_sum += sp.sp[m];
    out.ids.push_back(g.node(m).id);
  }
  std::sort(out.ids.begin(), out.ids.end());
  out.x_size = members.size();
  out.members = std::move(members);
  return out;
}

namespace detail {

inline std::vector<std::size_t> agreement_survivors(const std::vector<std::size_t>& pool, const graph::TrustGraph& tg,
                                                    GameParams params) {
  std::vector<std::size_t> keep;
  for (auto a : pool) {
    bool ever = false;
    for (auto b : pool) {
      if (a == b) continue;
      params.u_a = std::clamp(tg.trust[a][b], 0.01, 0.99);
      params.u_b = std::clamp(tg.trust[b][a], 0.01, 0.99);
      const auto m = payoff_matrices(Solution::s4, params);
      for (std::size_t col = 0; col < 3 && !ever; ++col)
        ever = is_best_response(m.m_a, static_cast<std::size_t>(Action::agreement), col);
      if (ever) break;
    }
    if (ever) keep.push_back(a);
  }
  return keep;
}

template <typename Visit>
void for_each_subset(const std::vector<std::size_t>& pool, std::size_t size, Visit&& visit) {
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t n = pool.size();
  if (size > n) return;
  std::vector<std::size_t> members(size);
  while (true) {
    for (std::size_t k = 0; k < size; ++k) members[k] = pool[idx[k]];
    visit(members);
    std::size_t k = size;
    while (k > 0 && idx[k - 1] == n - size + (k - 1)) --k;
    if (k == 0) return;
    ++idx[k - 1];
    for (std::size_t r = k; r < size; ++r) idx[r] = idx[r - 1] + 1;
  }
}

}  // namespace detail

/// Trust graph, centralities, Shapley values, candidate screening and a
/// synergy-maximizing coalition search.
inline LeaderDetection detect_leaders(const graph::SocialGraph& g, const graph::TrustModel& model,
                                      const CharacteristicFn& fn, const GameParams& game, const SynergyParams& syn,
                                      const SearchConfig& search) {
  search.validate();
  syn.validate();
  game.validate();
  require(!g.empty(), ErrorCode::empty_graph, "social graph has no nodes");
  require(g.size() >= 2, ErrorCode::empty_pool, "a coalition needs at least two users");

  LeaderDetection out;
  out.trust = graph::build_trust_graph(g, model);
  const auto& adj = out.trust.adjacency;
  out.centralities = graph::compute_centralities(adj);
  out.shapley = g.size() <= search.exact_shapley_limit
                    ? shapley_exact(adj, fn, search.exact_shapley_limit)
                    : shapley_monte_carlo(adj, fn, search.mc_samples, search.seed);
  const auto& ec = out.centralities.eigenvector;

  const double cut = percentile(ec, search.ec_percentile);
  std::vector<std::size_t> pool;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (ec[v] >= cut) pool.push_back(v);
  if (pool.size() < 2) {
    out.warnings.push_back("percentile filter left fewer than two candidates; using the top-2 EC nodes");
    std::vector<std::size_t> order(g.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return ec[a] > ec[b]; });
    pool = {order[0], order[1]};
    std::sort(pool.begin(), pool.end());
  }

  double dsum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < pool.size(); ++a)
    for (std::size_t b = a + 1; b < pool.size(); ++b, ++pairs)
      dsum += pair_distance(pool[a], pool[b], out.centralities, game.lambda, game.rho).value;
  out.distance = std::max(1e-6, pairs ? dsum / static_cast<double>(pairs) : 0.0);

  if (search.agreement_filter) {
    GameParams p = game;
    p.d = out.distance;
    auto kept = detail::agreement_survivors(pool, out.trust, p);
    if (kept.size() >= 2) {
      pool = std::move(kept);
    } else {
      out.warnings.push_back("agreement filter left fewer than two candidates; keeping the unfiltered pool");
    }
  }
  out.pool = pool;

  const std::size_t kmax = std::min(search.max_size, pool.size());
  bool have = false;
  auto consider = [&](Coalition c) {
    ++out.evaluated;
    if (!have || ranks_above(c, out.winner)) {
      out.winner = std::move(c);
      have = true;
    }
  };

  if (pool.size() <= search.exhaustive_pool_limit) {
    out.exhaustive = true;
    for (std::size_t size = 2; size <= kmax; ++size)
      detail::for_each_subset(pool, size, [&](const std::vector<std::size_t>& m) {
        consider(make_coalition(m, g, out.centralities, out.shapley, syn));
      });
    return out;
  }

  out.exhaustive = false;
  std::vector<Coalition> beam;
  detail::for_each_subset(pool, 2, [&](const std::vector<std::size_t>& m) {
    beam.push_back(make_coalition(m, g, out.centralities, out.shapley, syn));
  });
  for (std::size_t size = 2;; ++size) {
    std::sort(beam.begin(), beam.end(), ranks_above);
    if (beam.size() > search.beam_width) beam.resize(search.beam_width);
    for (const auto& c : beam) consider(c);
    if (size == kmax) break;
    std::vector<Coalition> grown;
    for (const auto& c : beam) {
      for (auto v : pool) {
        if (std::binary_search(c.members.begin(), c.members.end(), v)) continue;
        auto m = c.members;
        m.push_back(v);
        std::sort(m.begin(), m.end());
        if (std::any_of(grown.begin(), grown.end(), [&](const Coalition& o) { return o.members == m; })) continue;
        grown.push_back(make_coalition(std::move(m), g, out.centralities, out.shapley, syn));
      }
    }
    beam = std::move(grown);
  }
  return out;
}

struct LeaderWeights {
  std::vector<double> weight;
  std::vector<long> hops;  // -1 when unreachable
  std::vector<char> leader;
  double decay_kappa = 0.0;
  std::size_t max_hops = 0;
};

/// Signed influence weights decaying with hop distance from the nearest
/// leader on the trust graph.
inline LeaderWeights assign_weights(const graph::SocialGraph& g, const graph::UndirectedGraph& trust_adjacency,
                                    const Coalition& coalition, double decay_kappa = std::log(2.0),
                                    std::size_t max_hops = 3) {
  require(decay_kappa > 0, ErrorCode::invalid_argument, "decay kappa must be positive");
  require(max_hops >= 1, ErrorCode::invalid_argument, "max_hops must be >= 1");
  require(!coalition.members.empty(), ErrorCode::invalid_argument, "coalition is empty");
  require(trust_adjacency.size() == g.size(), ErrorCode::invalid_argument, "trust graph size mismatch");
  LeaderWeights w;
  w.decay_kappa = decay_kappa;
  w.max_hops = max_hops;
  w.hops = graph::bfs_hops(trust_adjacency, coalition.members);
  w.weight.assign(g.size(), 0.0);
  w.leader.assign(g.size(), 0);
  for (auto m : coalition.members) w.leader[m] = 1;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const long h = w.hops[v];
    if (h < 0 || static_cast<std::size_t>(h) > max_hops) continue;
    const double sign = g.node(v).valence < 0.0 ? -1.0 : 1.0;
    w.weight[v] = sign * std::exp(-decay_kappa * static_cast<double>(h));
  }
  return w;
}

}  // namespace ewtf::game
