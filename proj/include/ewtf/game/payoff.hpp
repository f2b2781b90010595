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

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ewtf/core/error.hpp"
#include "ewtf/graph/centrality.hpp"

namespace ewtf::game {

enum class Solution { s1, s2, s3, s4 };

inline const char* to_string(Solution s) {
  switch (s) {
    case Solution::s1: return "S1";
    case Solution::s2: return "S2";
    case Solution::s3: return "S3";
    case Solution::s4: return "S4";
  }
  return "?";
}

enum class Action { original = 0, altered = 1, agreement = 2 };

struct GameParams {
  double x_pay = 1.0;
  double y_pay = 1.0;
  double i_pay = 0.5;
  std::optional<double> d;
  double u_a = 0.5;
  double u_b = 0.5;
  double lambda = 0.25;
  double rho = 0.25;
  double mu = 0.3;
  double eta = 0.1;

  void validate() const {
    require(x_pay > 0 && y_pay > 0 && i_pay > 0, ErrorCode::invalid_argument, "payoffs x, y, i must be positive");
    require(u_a > 0 && u_a < 1 && u_b > 0 && u_b < 1, ErrorCode::invalid_argument, "u_a, u_b must lie in (0, 1)");
    require(lambda >= 0 && lambda <= 0.5 && rho >= 0 && rho <= 0.5, ErrorCode::invalid_argument,
            "lambda, rho must lie in [0, 0.5]");
    require(mu > 0 && mu < 0.5 && eta > 0 && eta < 0.5, ErrorCode::invalid_argument, "mu, eta must lie in (0, 0.5)");
    if (d) require(*d > 0, ErrorCode::invalid_argument, "distance d must be positive");
  }
};

using PayoffMatrix = std::vector<std::vector<double>>;

struct PayoffMatrices {
  Solution solution = Solution::s1;
  PayoffMatrix m_a;
  PayoffMatrix m_b;
  std::vector<std::string> actions;
};

inline PayoffMatrix transpose(const PayoffMatrix& m) {
  PayoffMatrix t(m.size(), std::vector<double>(m.size()));
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c) t[c][r] = m[r][c];
  return t;
}

/// Player A's and B's payoff tables. Rows index A's action, columns B's.
inline PayoffMatrices payoff_matrices(Solution solution, const GameParams& p) {
  p.validate();
  const double x = p.x_pay, y = p.y_pay, i = p.i_pay;
  PayoffMatrices out;
  out.solution = solution;
  if (solution == Solution::s1) {
    out.actions = {"original", "altered"};
    out.m_a = {{0.0, x + y}, {-x - y, 0.0}};
    out.m_b = {{0.0, -x - y}, {x + y, 0.0}};
    return out;
  }
  out.actions = {"original", "altered", "agreement"};
  if (solution == Solution::s2) {
    out.m_a = {{0.0, x + y, i + y}, {-x - y, 0.0, i - x}, {-i - y, -i + x, 0.0}};
    out.m_b = {{0.0, -x - y, -i - y}, {x + y, 0.0, -i + x}, {i + y, i - x, 0.0}};
    return out;
  }
  require(p.d.has_value(), ErrorCode::missing_distance, std::string(to_string(solution)) + " needs a distance d");
  const double inv = 1.0 / *p.d;
  if (solution == Solution::s3) {
    out.m_a = {{0.0, x + y, i + y + inv}, {-x - y, 0.0, i - x + inv}, {-i - y + inv, -i + x + inv, 2.0 * inv}};
    out.m_b = {{0.0, -x - y, -i - y + inv}, {x + y, 0.0, -i + x + inv}, {i + y + inv, i - x + inv, 2.0 * inv}};
    return out;
  }
  const double ua = p.u_a, ub = p.u_b;
  out.m_a = {{y * ((1 - ub) - (1 - ua)), y * (1 - ub) + x * ua, y * (1 - ub) + i + inv},
             {-x * ub - y * (1 - ua), x * (ua - ub), -x * ub + i + inv},
             {-y * (1 - ua) - i + inv, x * ua - i + inv, 2.0 * inv}};
  out.m_b = {{y * ((1 - ub) - (1 - ua)), -x * ub - y * (1 - ua), -y * (1 - ua) - i + inv},
             {y * (1 - ub) + x * ua, x * (ua - ub), x * ua - i + inv},
             {y * (1 - ub) + i + inv, -x * ub + i + inv, 2.0 * inv}};
  return out;
}

/// True when `row` maximizes the row player's payoff against column `col`.
inline bool is_best_response(const PayoffMatrix& m, std::size_t row, std::size_t col, double tol = 1e-12) {
  for (std::size_t r = 0; r < m.size(); ++r)
    if (m[r][col] > m[row][col] + tol) return false;
  return true;
}

/// One opinion-exchange round between two players with opinions e_a, e_b.
inline std::pair<double, double> opinion_step(double e_a, double e_b, double mu, double eta) {
  require(mu > 0 && mu < 0.5 && eta > 0 && eta < 0.5, ErrorCode::invalid_argument, "mu, eta must lie in (0, 0.5)");
  const double gap = e_b - e_a;
  return {e_a + mu * gap, e_b + eta * gap};
}

enum class DistanceMode { pairwise, literal };

struct DistanceResult {
  double value = 0.0;
  DistanceMode mode = DistanceMode::pairwise;
  std::size_t skipped_terms = 0;  // radicals dropped for zero degree
};

/// Centrality-based distance between users i and j.
inline DistanceResult pair_distance(std::size_t i, std::size_t j, const graph::Centralities& c, double lambda,
                                    double rho, DistanceMode mode = DistanceMode::pairwise) {
  const std::size_t n = c.degree.size();
  require(i < n && j < n, ErrorCode::invalid_argument, "pair_distance: node out of range");
  DistanceResult r;
  r.mode = mode;
  auto radical = [&](std::size_t v) {
    if (c.degree[v] <= 0.0) {
      ++r.skipped_terms;
      return 0.0;
    }
    return std::sqrt(c.betweenness[v] * c.closeness[v] / c.degree[v]);
  };
  if (mode == DistanceMode::pairwise) {
    r.value = radical(i) + radical(j);
  } else {
    for (std::size_t v = 0; v < n; ++v)
      if (v != j) r.value += radical(v);
  }
  r.value += lambda * c.clustering[i] + rho * c.clustering[j];
  return r;
}

}  // namespace ewtf::game
