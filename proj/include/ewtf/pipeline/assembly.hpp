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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ewtf/core/series.hpp"
#include "ewtf/ewt/ewt.hpp"
#include "ewtf/game/leaders.hpp"
#include "ewtf/nn/network.hpp"
#include "ewtf/pipeline/config.hpp"
#include "ewtf/pipeline/features.hpp"

namespace ewtf::pipeline {

/// Per-column min-max scaling fitted on the first `fit_rows` rows; a column
/// constant over that range maps to 0.
struct FeatureScaling {
  std::vector<double> lo, hi;

  static FeatureScaling fit(const FeatureTable& f, std::size_t fit_rows) {
    require(fit_rows >= 1 && fit_rows <= f.periods(), ErrorCode::invalid_argument, "feature scaling range out of bounds");
    FeatureScaling s;
    s.lo.assign(f.width(), 0.0);
    s.hi.assign(f.width(), 0.0);
    for (std::size_t c = 0; c < f.width(); ++c) {
      s.lo[c] = s.hi[c] = f.rows[0][c];
      for (std::size_t t = 1; t < fit_rows; ++t) {
        s.lo[c] = std::min(s.lo[c], f.rows[t][c]);
        s.hi[c] = std::max(s.hi[c], f.rows[t][c]);
      }
    }
    return s;
  }

  FeatureTable apply(const FeatureTable& f) const {
    FeatureTable out = f;
    for (auto& row : out.rows)
      for (std::size_t c = 0; c < row.size(); ++c) row[c] = hi[c] > lo[c] ? (row[c] - lo[c]) / (hi[c] - lo[c]) : 0.0;
    return out;
  }
};

struct WeightingResult {
  FeatureTable features;
  std::size_t cells_scaled = 0;
  std::vector<std::string> warnings;
};

/// Scales each cell by the mean signed weight of its contributing nodes.
/// Cells without contributors are left unchanged; unknown node ids are
/// skipped with a warning.
inline WeightingResult apply_leader_weights(const FeatureTable& features, const Attribution& attribution,
                                            const graph::SocialGraph& g, const std::vector<double>& node_weight) {
  require(node_weight.size() == g.size(), ErrorCode::shape_mismatch, "one weight per graph node required");
  WeightingResult out{features, 0, {}};
  if (attribution.empty()) {
    out.warnings.push_back("no feature-to-node attribution supplied; leader weighting is a no-op");
    return out;
  }
  std::vector<std::string> unknown;
  for (std::size_t t = 0; t < features.periods(); ++t) {
    for (std::size_t c = 0; c < features.width(); ++c) {
      const auto* nodes = attribution.contributors(features.columns[c], features.period_at(t), features.frequency);
      if (nodes == nullptr) continue;
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& id : *nodes) {
        if (!g.contains(id)) {
          if (std::find(unknown.begin(), unknown.end(), id) == unknown.end()) unknown.push_back(id);
          continue;
        }
        sum += node_weight[g.index_of(id)];
        ++count;
      }
      if (count == 0) continue;
      out.features.rows[t][c] *= sum / static_cast<double>(count);
      ++out.cells_scaled;
    }
  }
  for (const auto& id : unknown) out.warnings.push_back("attribution names unknown node '" + id + "'; ignored");
  return out;
}

/// Boundaries (from the training prefix) used to split every causal prefix.
struct ChannelPlan {
  bool use_ewt = false;
  ewt::SpectralBoundaries boundaries;
  TargetMode target_mode = TargetMode::delta;
  std::size_t window = 12;
  std::size_t feature_width = 0;

  std::size_t components() const { return use_ewt ? boundaries.num_components() : 1; }
};

/// Components of x[0..end] filtered with fixed boundaries. The prefix is
/// mirrored before filtering so the circular transform sees no jump at the
/// newest sample; only the first `end + 1` samples are kept. Without EWT the
/// single "component" is the prefix itself.
inline std::vector<std::vector<double>> causal_components(std::span<const double> x, std::size_t end,
                                                          const ChannelPlan& plan) {
  require(end < x.size(), ErrorCode::invalid_argument, "prefix end outside the series");
  const std::size_t m = end + 1;
  if (!plan.use_ewt) return {std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(m))};
  std::vector<double> mirrored(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    mirrored[i] = x[i];
    mirrored[2 * m - 1 - i] = x[i];
  }
  auto d = ewt::decompose_with(mirrored, plan.boundaries);
  for (auto& c : d.components) c.resize(m);
  return std::move(d.components);
}

/// Which component a window set models: nullopt for the component-augmented
/// layout, k for the k-th decompose-ensemble member.
using ComponentSelector = std::optional<std::size_t>;

inline std::size_t input_width(const ChannelPlan& plan, ComponentSelector member) {
  return (member ? 1 : plan.components()) + plan.feature_width;
}

/// Input window ending at `end` built from the prefix's components. Level
/// channels (the raw target, or the low-pass component) are expressed
/// relative to their newest value in delta mode.
inline nn::Mat make_window(const std::vector<std::vector<double>>& comps, const std::vector<std::vector<double>>& feature_rows,
                           std::size_t end, const ChannelPlan& plan, ComponentSelector member) {
  const std::size_t w = plan.window;
  require(end + 1 >= w, ErrorCode::too_short, "not enough history for one window");
  nn::Mat m(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(input_width(plan, member)));
  Eigen::Index col = 0;
  auto put = [&](const std::vector<double>& series, bool anchor) {
    const double ref = anchor ? series[end] : 0.0;
    for (std::size_t r = 0; r < w; ++r) m(static_cast<Eigen::Index>(r), col) = series[end + 1 - w + r] - ref;
    ++col;
  };
  const bool delta = plan.target_mode == TargetMode::delta;
  if (member) {
    put(comps[*member], delta && *member == 0);
  } else {
    for (std::size_t k = 0; k < comps.size(); ++k) put(comps[k], delta && k == 0);
  }
  for (std::size_t c = 0; c < plan.feature_width; ++c)
    for (std::size_t r = 0; r < w; ++r) m(static_cast<Eigen::Index>(r), col + static_cast<Eigen::Index>(c)) = feature_rows[end + 1 - w + r][c];
  return m;
}

struct WindowSet {
  std::vector<nn::Mat> windows;
  std::vector<double> targets;
  std::vector<std::size_t> ends;  // index of each window's newest sample
};

/// Windows whose target index lies in [first_target, last_target]. The
/// target is the next value of the series (or of the selected component),
/// or its change from the newest input in delta mode.
inline std::vector<WindowSet> assemble_windows(std::span<const double> x, const std::vector<std::vector<double>>& feature_rows,
                                               const ChannelPlan& plan, std::size_t first_target, std::size_t last_target,
                                               bool ensemble) {
  require(plan.feature_width == 0 || feature_rows.size() >= x.size(), ErrorCode::length_mismatch,
          "feature rows do not cover the series");
  require(last_target < x.size(), ErrorCode::invalid_argument, "window target outside the series");
  first_target = std::max(first_target, plan.window);
  require(first_target <= last_target, ErrorCode::too_short,
          "series too short for window length " + std::to_string(plan.window));
  const std::size_t members = ensemble ? plan.components() : 1;
  std::vector<WindowSet> sets(members);
  const bool delta = plan.target_mode == TargetMode::delta;
  std::vector<std::vector<double>> prev = causal_components(x, first_target - 1, plan);
  for (std::size_t target = first_target; target <= last_target; ++target) {
    const auto end = target - 1;
    auto next = causal_components(x, target, plan);
    for (std::size_t k = 0; k < members; ++k) {
      const ComponentSelector member = ensemble ? ComponentSelector(k) : std::nullopt;
      sets[k].windows.push_back(make_window(prev, feature_rows, end, plan, member));
      double y;
      if (ensemble)
        y = delta ? next[k][target] - prev[k][end] : next[k][target];
      else
        y = delta ? x[target] - x[end] : x[target];
      sets[k].targets.push_back(y);
      sets[k].ends.push_back(end);
    }
    prev = std::move(next);
  }
  return sets;
}

/// One-step-ahead value from trained networks given the history up to `end`.
/// Ensemble members' outputs (converted to component values) are summed.
inline double forecast_next(std::span<const double> x, const std::vector<std::vector<double>>& feature_rows, std::size_t end,
                            const ChannelPlan& plan, const std::vector<nn::Network>& nets, bool ensemble,
                            std::vector<double>* member_values = nullptr) {
  const auto comps = causal_components(x, end, plan);
  const bool delta = plan.target_mode == TargetMode::delta;
  if (!ensemble) {
    const double p = nn::predict_one(nets.at(0), make_window(comps, feature_rows, end, plan, std::nullopt));
    return delta ? x[end] + p : p;
  }
  require(nets.size() == comps.size(), ErrorCode::shape_mismatch, "one network per component required");
  double sum = 0.0;
  if (member_values) member_values->clear();
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const double p = nn::predict_one(nets[k], make_window(comps, feature_rows, end, plan, k));
    const double v = delta ? comps[k][end] + p : p;
    if (member_values) member_values->push_back(v);
    sum += v;
  }
  return sum;
}

/// Recursive forecast h steps past `end`: predictions are appended to the
/// history and feature rows repeat their newest observation.
inline std::vector<double> forecast_recursive(std::span<const double> x, const std::vector<std::vector<double>>& feature_rows,
                                              std::size_t end, std::size_t horizon, const ChannelPlan& plan,
                                              const std::vector<nn::Network>& nets, bool ensemble) {
  std::vector<double> hist(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(end + 1));
  std::vector<std::vector<double>> rows;
  if (plan.feature_width > 0) rows.assign(feature_rows.begin(), feature_rows.begin() + static_cast<std::ptrdiff_t>(end + 1));
  std::vector<double> out;
  for (std::size_t step = 0; step < horizon; ++step) {
    const double v = forecast_next(hist, rows, hist.size() - 1, plan, nets, ensemble);
    out.push_back(v);
    hist.push_back(v);
    if (plan.feature_width > 0) rows.push_back(rows.back());
  }
  return out;
}

}  // namespace ewtf::pipeline
