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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ewtf/core/csv.hpp"
#include "ewtf/core/metrics.hpp"
#include "ewtf/core/random.hpp"
#include "ewtf/core/series.hpp"

using Catch::Approx;
using namespace ewtf;

namespace {

TimeSeries make_series(std::vector<double> v) { return TimeSeries("t", {2012, 8}, Frequency::monthly, std::move(v)); }

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ewtf::Error");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("normalize maps extremes onto the target interval") {
  auto [norm, params] = normalize(make_series({0, 5, 10}), 0.0, 1.0);
  CHECK(norm.data() == std::vector<double>{0.0, 0.5, 1.0});

  auto [n2, p2] = normalize(make_series({2, 4, 7}), 0.1, 0.9);
  CHECK(n2[0] == 0.1);
  CHECK(n2[1] == Approx(0.42).epsilon(1e-14));
  CHECK(n2[2] == 0.9);

  auto back = denormalize_values(std::vector<double>{0.42}, p2);
  CHECK(back[0] == Approx(4.0).epsilon(1e-14));
  CHECK(denormalize_values(std::vector<double>{0.1}, p2)[0] == 2.0);
}

TEST_CASE("normalize rejects a constant series") {
  CHECK(error_of([] { normalize(make_series({3, 3, 3})); }) == ErrorCode::degenerate_series);
}

TEST_CASE("normalization round trip holds for random series") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 60);
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(rng, -1e3, 1e3);
    const double lo = uniform(rng, -2, 0), hi = lo + uniform(rng, 0.1, 3);
    auto s = make_series(v);
    auto [norm, params] = normalize(s, lo, hi);
    auto mn = *std::min_element(norm.data().begin(), norm.data().end());
    auto mx = *std::max_element(norm.data().begin(), norm.data().end());
    CHECK(mn == lo);
    CHECK(mx == hi);
    auto back = denormalize(norm, params);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(back[i] - v[i]) <= 1e-12 * std::max(1.0, std::abs(v[i])));
  }
}

TEST_CASE("evaluate computes the three error metrics") {
  std::vector<double> y{100, 200, 400}, yhat{110, 180, 400};
  auto ev = evaluate(y, yhat);
  CHECK(ev.mape == Approx(20.0 / 3.0).epsilon(1e-12));
  CHECK(ev.n == 3);

  std::vector<double> y2{100, 200}, p2{110, 180};
  auto ev2 = evaluate(y2, p2);
  CHECK(ev2.rmse == Approx(std::sqrt(250.0)).epsilon(1e-14));
  CHECK(ev2.rmsre == Approx(std::sqrt((0.01 + 0.01) / 2.0)).epsilon(1e-14));

  auto perfect = evaluate(y, y);
  CHECK(perfect.mape == 0.0);
  CHECK(perfect.rmse == 0.0);
  CHECK(perfect.rmsre == 0.0);
}

TEST_CASE("evaluate error paths") {
  std::vector<double> a{1, 0, 2}, b{1, 1, 2}, c{1, 2};
  CHECK(error_of([&] { evaluate(a, b); }) == ErrorCode::zero_observed);
  CHECK(error_of([&] { evaluate(b, c); }) == ErrorCode::length_mismatch);
}

TEST_CASE("metric scaling properties") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 20);
    std::vector<double> y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = uniform(rng, 1, 100) * (uniform01(rng) < 0.5 ? -1 : 1);
      p[i] = y[i] + uniform(rng, -5, 5);
    }
    const double alpha = uniform(rng, 0.1, 10) * (uniform01(rng) < 0.5 ? -1 : 1);
    std::vector<double> ys(n), ps(n);
    for (std::size_t i = 0; i < n; ++i) {
      ys[i] = alpha * y[i];
      ps[i] = alpha * p[i];
    }
    auto base = evaluate(y, p);
    auto scaled = evaluate(ys, ps);
    CHECK(scaled.rmse == Approx(std::abs(alpha) * base.rmse).epsilon(1e-12));
    CHECK(scaled.rmsre == Approx(base.rmsre).epsilon(1e-12));
    CHECK(base.mape >= 0.0);
    CHECK((base.mape == 0.0) == (y == p));
  }
}

TEST_CASE("improvement percentage") {
  CHECK(csv::format_fixed(improvement_pct(0.0048, 0.0044), 2) == "8.33");
  CHECK(csv::format_fixed(improvement_pct(0.0052, 0.0047), 2) == "9.62");
  CHECK(improvement_pct(0.3, 0.3) == 0.0);
  CHECK(improvement_pct(2.0, 1.0) > 0.0);
  CHECK(improvement_pct(2.0, 3.0) < 0.0);
  CHECK(error_of([] { improvement_pct(0.0, 1.0); }) == ErrorCode::non_positive_baseline);
}

TEST_CASE("split keeps temporal order") {
  std::vector<double> v(10);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  auto s = make_series(v);
  auto [train, test] = split(s, {2});
  CHECK(train.size() == 8);
  CHECK(test.size() == 2);
  CHECK(test.start() == Period{2013, 4});
  std::vector<double> joined = train.data();
  joined.insert(joined.end(), test.data().begin(), test.data().end());
  CHECK(joined == v);
  CHECK(error_of([&] { split(s, {0}); }) == ErrorCode::invalid_split);
  CHECK(error_of([&] { split(s, {9}); }) == ErrorCode::invalid_split);
  CHECK(SplitSpec::default_for(120).test_length == 24);
  CHECK(SplitSpec::default_for(11).test_length == 3);
}

TEST_CASE("series CSV parsing") {
  std::istringstream ok("period,value\n2019-11,1.5\n2019-12,2\n2020-01,3\n");
  auto s = csv::read_series(ok, "arrivals");
  CHECK(s.size() == 3);
  CHECK(s.start() == Period{2019, 11});
  CHECK(s.period_at(2) == Period{2020, 1});

  std::ostringstream out;
  csv::write_series(out, s);
  std::istringstream again(out.str());
  CHECK(csv::read_series(again, "arrivals") == s);

  std::istringstream gap("period,value\n2019-11,1\n2020-01,3\n");
  CHECK(error_of([&] { csv::read_series(gap, "x"); }) == ErrorCode::parse_error);
  std::istringstream dup("period,value\n2019-11,1\n2019-11,3\n");
  CHECK(error_of([&] { csv::read_series(dup, "x"); }) == ErrorCode::parse_error);
  std::istringstream nan("period,value\n2019-11,1\n2019-12,nan\n");
  CHECK_THROWS_AS(csv::read_series(nan, "x"), Error);
}
