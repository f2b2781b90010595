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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ewtf/core/error.hpp"

namespace ewtf {

enum class Frequency { monthly, weekly };

/// Calendar period. For monthly data `sub` is the month (1..12); for weekly
/// data it is the ISO-style week number (1..53, treated as 52 per year for
/// indexing).
struct Period {
  int year = 2000;
  int sub = 1;

  friend bool operator==(const Period&, const Period&) = default;
  friend auto operator<=>(const Period&, const Period&) = default;
};

inline int periods_per_year(Frequency f) { return f == Frequency::monthly ? 12 : 52; }

inline std::int64_t period_index(Period p, Frequency f) {
  return static_cast<std::int64_t>(p.year) * periods_per_year(f) + (p.sub - 1);
}

inline Period period_from_index(std::int64_t idx, Frequency f) {
  const int per = periods_per_year(f);
  auto year = static_cast<int>(idx / per);
  auto sub = static_cast<int>(idx % per) + 1;
  if (sub <= 0) {
    sub += per;
    --year;
  }
  return {year, sub};
}

inline Period advance(Period p, Frequency f, std::int64_t steps) {
  return period_from_index(period_index(p, f) + steps, f);
}

/// Uniformly sampled real series with finite values.
class TimeSeries {
 public:
  TimeSeries() = default;

  TimeSeries(std::string name, Period start, Frequency frequency, std::vector<double> values)
      : TimeSeries(std::move(name), start, frequency, std::move(values), 2) {}

  const std::string& name() const { return name_; }
  Period start() const { return start_; }
  Frequency frequency() const { return frequency_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  Period period_at(std::size_t i) const { return advance(start_, frequency_, static_cast<std::int64_t>(i)); }

  /// Same metadata, new values starting `offset` periods after this start.
  TimeSeries with_values(std::vector<double> values, std::size_t offset = 0) const {
    return TimeSeries(name_, period_at(offset), frequency_, std::move(values), 1);
  }

  /// Contiguous sub-range. Derived series (slices, transformed copies) may hold
  /// a single value since a one-point test segment is legal; series built from
  /// scratch need two.
  TimeSeries slice(std::size_t offset, std::size_t length) const {
    require(offset + length <= values_.size(), ErrorCode::invalid_argument, "slice out of range");
    return TimeSeries(name_, period_at(offset), frequency_,
                      std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(offset),
                                          values_.begin() + static_cast<std::ptrdiff_t>(offset + length)),
                      1);
  }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  TimeSeries(std::string name, Period start, Frequency frequency, std::vector<double> values, std::size_t min_length)
      : name_(std::move(name)), start_(start), frequency_(frequency), values_(std::move(values)) {
    require(values_.size() >= min_length, ErrorCode::too_short,
            "time series '" + name_ + "' needs at least " + std::to_string(min_length) + " values");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      require(std::isfinite(values_[i]), ErrorCode::invalid_argument,
              "time series '" + name_ + "' has a non-finite value at index " + std::to_string(i));
    }
  }

  std::string name_;
  Period start_{};
  Frequency frequency_ = Frequency::monthly;
  std::vector<double> values_;
};

struct NormalizationParams {
  double x_min = 0.0;
  double x_max = 1.0;
  double x_low = 0.0;
  double x_high = 1.0;

  double apply(double x) const { return (x - x_min) / (x_max - x_min) * (x_high - x_low) + x_low; }
  double invert(double v) const { return (v - x_low) / (x_high - x_low) * (x_max - x_min) + x_min; }

  friend bool operator==(const NormalizationParams&, const NormalizationParams&) = default;
};

/// Min-max statistics of `values` mapped onto [target_low, target_high].
inline NormalizationParams fit_normalization(std::span<const double> values, double target_low = 0.0,
                                             double target_high = 1.0) {
  require(!values.empty(), ErrorCode::too_short, "cannot normalize an empty sequence");
  require(target_low < target_high, ErrorCode::invalid_argument, "normalization target requires low < high");
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(*lo < *hi)) fail(ErrorCode::degenerate_series, "x_max == x_min; min-max scaling is undefined");
  return {*lo, *hi, target_low, target_high};
}

inline std::vector<double> apply_normalization(std::span<const double> values, const NormalizationParams& p) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = p.apply(values[i]);
    // Pin the extremes so min/max land exactly on the target bounds.
    if (values[i] == p.x_min) out[i] = p.x_low;
    if (values[i] == p.x_max) out[i] = p.x_high;
  }
  return out;
}

inline std::pair<TimeSeries, NormalizationParams> normalize(const TimeSeries& series, double target_low = 0.0,
                                                            double target_high = 1.0) {
  auto params = fit_normalization(series.values(), target_low, target_high);
  return {series.with_values(apply_normalization(series.values(), params)), params};
}

inline std::vector<double> denormalize_values(std::span<const double> values, const NormalizationParams& p) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = p.invert(values[i]);
    if (values[i] == p.x_low) out[i] = p.x_min;
    if (values[i] == p.x_high) out[i] = p.x_max;
  }
  return out;
}

inline TimeSeries denormalize(const TimeSeries& series, const NormalizationParams& params) {
  return series.with_values(denormalize_values(series.values(), params));
}

struct SplitSpec {
  std::size_t test_length = 1;

  /// Trailing 20% (rounded up).
  static SplitSpec default_for(std::size_t n) {
    return {static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(n)))};
  }
};

inline std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, SplitSpec spec) {
  const std::size_t n = series.size();
  if (spec.test_length < 1 || n < 3 || spec.test_length > n - 2) {
    fail(ErrorCode::invalid_split, "test_length " + std::to_string(spec.test_length) +
                                       " outside [1, n-2] for n = " + std::to_string(n));
  }
  const std::size_t train_len = n - spec.test_length;
  return {series.slice(0, train_len), series.slice(train_len, spec.test_length)};
}

}  // namespace ewtf
