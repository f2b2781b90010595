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

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ewtf/core/csv.hpp"
#include "ewtf/core/series.hpp"
#include "ewtf/graph/social_graph.hpp"
#include "ewtf/pipeline/features.hpp"

namespace ewtf::pipeline {

/// Target series plus optional features, attribution and interaction graph.
/// On disk a bundle is a directory holding target.csv and, when present,
/// features.csv, attribution.csv, nodes.csv and edges.csv.
struct Bundle {
  TimeSeries target;
  std::optional<FeatureTable> features;
  Attribution attribution;
  std::optional<graph::SocialGraph> graph;
  std::vector<std::string> warnings;

  friend bool operator==(const Bundle& a, const Bundle& b) {
    return a.target == b.target && a.features == b.features && a.attribution == b.attribution && a.graph == b.graph;
  }
};

/// Checks that `features` covers exactly the target's periods, naming the
/// first offending period.
inline void check_alignment(const TimeSeries& target, const FeatureTable& f) {
  require(f.frequency == target.frequency(), ErrorCode::alignment_error, "feature and target frequencies differ");
  const auto freq = target.frequency();
  const auto t0 = period_index(target.start(), freq), f0 = period_index(f.start, freq);
  const auto t1 = t0 + static_cast<std::int64_t>(target.size()), f1 = f0 + static_cast<std::int64_t>(f.periods());
  auto name = [&](std::int64_t idx) { return csv::format_period(period_from_index(idx, freq), freq); };
  if (f0 > t0) fail(ErrorCode::alignment_error, "features missing period " + name(t0));
  if (f0 < t0) fail(ErrorCode::alignment_error, "features have period " + name(f0) + " before the target starts");
  if (f1 < t1) fail(ErrorCode::alignment_error, "features missing period " + name(f1));
  if (f1 > t1) fail(ErrorCode::alignment_error, "features have period " + name(t1) + " after the target ends");
}

namespace detail {

inline std::string path_in(const std::string& dir, const char* file) { return (std::filesystem::path(dir) / file).string(); }

inline bool exists(const std::string& p) { return std::filesystem::exists(p); }

}  // namespace detail

inline Bundle load_bundle(const std::string& dir) {
  using detail::path_in;
  Bundle b;
  b.target = csv::read_series_file(path_in(dir, "target.csv"), "target");
  if (detail::exists(path_in(dir, "features.csv"))) {
    std::ifstream in(path_in(dir, "features.csv"));
    auto f = read_features(in, path_in(dir, "features.csv"));
    const auto native = f.frequency;
    if (f.frequency == Frequency::weekly && b.target.frequency() == Frequency::monthly) {
      f = resample_to_monthly(f);
      b.warnings.push_back("weekly features resampled to monthly means");
    }
    check_alignment(b.target, f);
    b.features = std::move(f);
    if (detail::exists(path_in(dir, "attribution.csv"))) {
      std::ifstream ain(path_in(dir, "attribution.csv"));
      b.attribution = read_attribution(ain, native, path_in(dir, "attribution.csv"));
      if (native != b.target.frequency() && !b.attribution.cell_nodes.empty()) {
        b.attribution.cell_nodes.clear();
        b.warnings.push_back("per-period attribution dropped after resampling; column-level links kept");
      }
    }
  }
  const bool has_nodes = detail::exists(path_in(dir, "nodes.csv")), has_edges = detail::exists(path_in(dir, "edges.csv"));
  require(has_nodes == has_edges, ErrorCode::io_error, dir + ": nodes.csv and edges.csv must be supplied together");
  if (has_nodes) b.graph = graph::read_graph(path_in(dir, "nodes.csv"), path_in(dir, "edges.csv"));
  return b;
}

inline void save_bundle(const std::string& dir, const Bundle& b) {
  using detail::path_in;
  std::filesystem::create_directories(dir);
  std::ostringstream t;
  csv::write_series(t, b.target);
  csv::write_text_file(path_in(dir, "target.csv"), t.str());
  if (b.features) {
    std::ostringstream f;
    write_features(f, *b.features);
    csv::write_text_file(path_in(dir, "features.csv"), f.str());
    if (!b.attribution.empty()) {
      std::ostringstream a;
      write_attribution(a, b.attribution, b.features->frequency);
      csv::write_text_file(path_in(dir, "attribution.csv"), a.str());
    }
  }
  if (b.graph) {
    csv::write_text_file(path_in(dir, "nodes.csv"), graph::nodes_csv(*b.graph));
    csv::write_text_file(path_in(dir, "edges.csv"), graph::edges_csv(*b.graph));
  }
}

}  // namespace ewtf::pipeline
