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
#include <span>
#include <string>
#include <vector>

#include "ewtf/core/error.hpp"

namespace ewtf {

struct ForecastEvaluation {
  std::vector<double> observed;
  std::vector<double> predicted;
  std::size_t n = 0;
  double mape = 0.0;   // percent
  double rmse = 0.0;   // series units
  double rmsre = 0.0;  // plain ratio
};

/// MAPE (percent), RMSE and RMSRE of a forecast against observations.
inline ForecastEvaluation evaluate(std::span<const double> observed, std::span<const double> predicted) {
  if (observed.size() != predicted.size()) {
    fail(ErrorCode::length_mismatch, "observed has " + std::to_string(observed.size()) + " values, predicted has " +
                                         std::to_string(predicted.size()));
  }
  require(!observed.empty(), ErrorCode::length_mismatch, "evaluation needs at least one test sample");
  ForecastEvaluation ev;
  ev.observed.assign(observed.begin(), observed.end());
  ev.predicted.assign(predicted.begin(), predicted.end());
  ev.n = observed.size();
  double abs_pct = 0.0, sq = 0.0, sq_rel = 0.0;
  for (std::size_t i = 0; i < ev.n; ++i) {
    const double y = observed[i];
    if (y == 0.0) fail(ErrorCode::zero_observed, "observed value at index " + std::to_string(i) + " is zero");
    const double e = y - predicted[i];
    abs_pct += std::abs(e / y);
    sq += e * e;
    sq_rel += (e / y) * (e / y);
  }
  const auto n = static_cast<double>(ev.n);
  ev.mape = abs_pct / n * 100.0;
  ev.rmse = std::sqrt(sq / n);
  ev.rmsre = std::sqrt(sq_rel / n);
  return ev;
}

/// Relative improvement of metric A over baseline metric B, in percent.
inline double improvement_pct(double metric_b, double metric_a) {
  if (!(metric_b > 0.0)) fail(ErrorCode::non_positive_baseline, "baseline metric must be positive");
  return (metric_b - metric_a) / metric_b * 100.0;
}

}  // namespace ewtf
