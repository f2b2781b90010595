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
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "ewtf/core/error.hpp"
#include "ewtf/core/random.hpp"
#include "ewtf/hpo/gp.hpp"
#include "ewtf/hpo/space.hpp"

namespace ewtf::hpo {

struct AcquisitionConfig {
  double xi = 0.01;
  double exploit_threshold = 0.5;
  double escalation_factor = 2.0;
  std::size_t max_escalations = 5;
  std::size_t candidate_pool = 2000;
  std::size_t refine_passes = 20;

  void validate() const {
    require(xi >= 0 && exploit_threshold >= 0 && escalation_factor > 1 && candidate_pool >= 1, ErrorCode::invalid_argument,
            "acquisition config: xi >= 0, threshold >= 0, escalation factor > 1, pool >= 1");
  }
};

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Closed-form expected improvement below `incumbent` with margin xi.
inline double expected_improvement(double mean, double sd, double incumbent, double xi) {
  const double g = incumbent - mean - xi;
  if (sd <= 0.0) return std::max(g, 0.0);
  const double u = g / sd;
  return std::max(0.0, g * normal_cdf(u) + sd * normal_pdf(u));
}

/// EI of the surrogate at z, all in standardized loss units (xi included).
inline double expected_improvement_plus(const GpSurrogate& gp, const std::vector<double>& z, double incumbent_loss,
                                        const AcquisitionConfig& cfg) {
  auto [m, s] = gp.posterior_standardized(z);
  return expected_improvement(m, s, gp.standardize(incumbent_loss), cfg.xi);
}

/// Radical-inverse Halton point `index` (1-based) in `dims` dimensions.
inline std::vector<double> halton(std::size_t index, std::size_t dims) {
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  require(dims <= std::size(primes), ErrorCode::invalid_argument, "Halton sequence supports up to 20 dimensions");
  std::vector<double> out(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    double f = 1.0, r = 0.0;
    for (std::size_t i = index; i > 0; i /= static_cast<std::size_t>(primes[d])) {
      f /= primes[d];
      r += f * static_cast<double>(i % static_cast<std::size_t>(primes[d]));
    }
    out[d] = r;
  }
  return out;
}

/// Randomly shifted Halton points in [0,1)^dims.
inline std::vector<std::vector<double>> shifted_halton(std::size_t count, std::size_t dims, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> shift(dims);
  for (auto& s : shift) s = uniform01(rng);
  std::vector<std::vector<double>> pts;
  for (std::size_t k = 1; k <= count; ++k) {
    auto p = halton(k, dims);
    for (std::size_t d = 0; d < dims; ++d) p[d] = std::fmod(p[d] + shift[d], 1.0);
    pts.push_back(std::move(p));
  }
  return pts;
}

struct Proposal {
  Point point;
  std::vector<double> encoded;
  double acquisition = 0.0;
  double posterior_sd = 0.0;  // standardized
  std::size_t escalations = 0;
};

namespace detail {

inline std::pair<std::vector<double>, double> maximize_ei(const GpSurrogate& gp, const SearchSpace& space,
                                                          double incumbent, const AcquisitionConfig& cfg,
                                                          std::uint64_t seed) {
  const auto cands = shifted_halton(cfg.candidate_pool, space.dims.size(), seed);
  auto score = [&](const std::vector<double>& u) {
    return expected_improvement_plus(gp, encode(from_unit(u, space), space), incumbent, cfg);
  };
  std::vector<double> best_u = cands[0];
  double best = -1.0;
  for (const auto& u : cands) {
    const double s = score(u);
    if (s > best) {
      best = s;
      best_u = u;
    }
  }
  // Coordinate refinement around the best candidate.
  double step = 0.05;
  for (std::size_t pass = 0; pass < cfg.refine_passes; ++pass) {
    bool improved = false;
    for (std::size_t d = 0; d < space.dims.size(); ++d) {
      std::vector<double> trials;
      if (space.dims[d].kind == DimKind::categorical) {
        const auto k = space.dims[d].categories.size();
        for (std::size_t c = 0; c < k; ++c) trials.push_back((static_cast<double>(c) + 0.5) / static_cast<double>(k));
      } else {
        trials = {std::clamp(best_u[d] - step, 0.0, 1.0), std::clamp(best_u[d] + step, 0.0, 1.0)};
      }
      for (double t : trials) {
        auto u = best_u;
        u[d] = t;
        const double s = score(u);
        if (s > best) {
          best = s;
          best_u = std::move(u);
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {best_u, best};
}

}  // namespace detail

/// Maximizes EI over quasi-random candidates plus local refinement. If the
/// winner sits where the surrogate is already nearly certain (sd below
/// threshold * sqrt(noise)), the kernel output scale is inflated and the
/// search repeated to push the proposal toward unexplored regions.
inline Proposal propose_next(const GpSurrogate& gp, const SearchSpace& space, double incumbent,
                             const AcquisitionConfig& cfg, std::uint64_t seed) {
  space.validate();
  cfg.validate();
  Proposal p;
  GpSurrogate current = gp;
  for (std::size_t round = 0;; ++round) {
    auto [u, ei] = detail::maximize_ei(current, space, incumbent, cfg, derive_seed(seed, round));
    p.point = from_unit(u, space);
    p.encoded = encode(p.point, space);
    p.acquisition = ei;
    p.posterior_sd = current.posterior_standardized(p.encoded).second;
    p.escalations = round;
    if (round >= cfg.max_escalations) break;
    if (p.posterior_sd >= cfg.exploit_threshold * std::sqrt(current.noise_var())) break;
    current = current.with_output_scale(cfg.escalation_factor);
  }
  return p;
}

struct BoHistory {
  std::vector<Point> points;
  std::vector<double> losses;
  std::vector<double> incumbent;  // best loss so far after each evaluation
  std::vector<char> proposed;     // 0 for initial design / random points
  std::vector<std::string> notes;
  std::size_t best_index = 0;
  std::uint64_t seed = 0;

  const Point& best_point() const { return points[best_index]; }
  double best_loss() const { return losses[best_index]; }
};

using Objective = std::function<double(const Point&)>;

namespace detail {

inline void record(BoHistory& h, const Point& p, const Objective& f, bool proposed) {
  double loss;
  try {
    loss = f(p);
    if (!std::isfinite(loss)) throw Error(ErrorCode::diverged_loss, "objective returned a non-finite loss");
  } catch (const Error& e) {
    double worst = 0.0;
    for (double l : h.losses) worst = std::max(worst, std::abs(l));
    loss = (worst > 0 ? worst : 1.0) * 10.0;
    h.notes.push_back("evaluation " + std::to_string(h.losses.size()) + " failed (" + e.what() +
                      "); recorded loss " + std::to_string(loss));
  }
  h.points.push_back(p);
  h.losses.push_back(loss);
  h.proposed.push_back(proposed ? 1 : 0);
  if (h.losses.size() == 1 || loss < h.losses[h.best_index]) h.best_index = h.losses.size() - 1;
  h.incumbent.push_back(h.losses[h.best_index]);
}

}  // namespace detail

inline std::size_t default_init_design(std::size_t budget) { return std::max<std::size_t>(5, budget / 4); }

/// Initial quasi-random design, then fit / propose / evaluate until the
/// budget is spent.
inline BoHistory run_bo(const Objective& objective, const SearchSpace& space, std::size_t budget,
                        std::size_t init_design, std::uint64_t seed, const AcquisitionConfig& cfg = {},
                        const GpFitOptions& gp_opt = {}) {
  space.validate();
  require(init_design >= 2 && budget >= init_design, ErrorCode::invalid_argument,
          "need budget >= init_design_size >= 2");
  BoHistory h;
  h.seed = seed;
  for (const auto& u : shifted_halton(init_design, space.dims.size(), derive_seed(seed, "init_design")))
    detail::record(h, from_unit(u, space), objective, false);
  const auto groups = space.coordinate_groups();
  for (std::size_t it = init_design; it < budget; ++it) {
    std::vector<std::vector<double>> z;
    for (const auto& p : h.points) z.push_back(encode(p, space));
    GpFitOptions opt = gp_opt;
    opt.seed = derive_seed(seed, it);
    const auto gp = gp_fit(z, h.losses, groups, opt);
    const auto prop = propose_next(gp, space, h.best_loss(), cfg, derive_seed(seed, "propose" + std::to_string(it)));
    detail::record(h, prop.point, objective, true);
  }
  return h;
}

/// Budget-matched baseline: independent uniform draws.
inline BoHistory random_search(const Objective& objective, const SearchSpace& space, std::size_t budget,
                               std::uint64_t seed) {
  space.validate();
  require(budget >= 1, ErrorCode::invalid_argument, "budget must be >= 1");
  BoHistory h;
  h.seed = seed;
  Rng rng(derive_seed(seed, "random_search"));
  for (std::size_t it = 0; it < budget; ++it) {
    std::vector<double> u(space.dims.size());
    for (auto& v : u) v = uniform01(rng);
    detail::record(h, from_unit(u, space), objective, false);
  }
  return h;
}

}  // namespace ewtf::hpo
