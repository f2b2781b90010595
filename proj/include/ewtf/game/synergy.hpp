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
#include <vector>

#include "ewtf/core/error.hpp"
#include "ewtf/game/shapley.hpp"
#include "ewtf/graph/centrality.hpp"

namespace ewtf::game {

struct SynergyParams {
  double delta = 1.0;
  double partial = 1.0;
  double c = 1.0;

  void validate() const {
    for (double v : {delta, partial, c})
      require(v >= 0.0 && v <= 1.0, ErrorCode::invalid_argument, "synergy parameters must lie in [0, 1]");
  }
};

/// Omega_ij: mean eigenvector centrality times scaled mean Shapley value.
inline double pair_synergy(std::size_t i, std::size_t j, const graph::Centralities& c, const ShapleyResult& shapley,
                           const SynergyParams& p) {
  p.validate();
  require(i < c.eigenvector.size() && j < c.eigenvector.size() && i < shapley.sp.size() && j < shapley.sp.size(),
          ErrorCode::invalid_argument, "pair_synergy: node out of range");
  return 0.5 * (c.eigenvector[i] + c.eigenvector[j]) * 0.5 * p.partial * (shapley.sp[i] + shapley.sp[j]);
}

/// Phi: sum over unordered member pairs of delta * (Omega_ij / x)^c.
inline double coalition_synergy(const std::vector<std::size_t>& members, const graph::Centralities& c,
                                const ShapleyResult& shapley, const SynergyParams& p) {
  require(members.size() >= 2, ErrorCode::too_small, "coalition synergy needs at least two members");
  const double x = static_cast<double>(members.size());
  double phi = 0.0;
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b)
      phi += p.delta * std::pow(pair_synergy(members[a], members[b], c, shapley, p) / x, p.c);
  return phi;
}

}  // namespace ewtf::game
