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
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ewtf/core/csv.hpp"
#include "ewtf/core/series.hpp"

namespace ewtf::pipeline {

enum class FeatureFamily { volume, valence };

inline constexpr std::array<const char*, 4> kVolumeFeatures{"num_comments", "num_posts", "num_likes", "num_shares"};
inline constexpr std::array<const char*, 3> kValenceFeatures{"avg_comment_length", "avg_sentiment", "avg_polarity"};

/// Family of a bare feature name; throws for names outside the taxonomy.
inline FeatureFamily feature_family(const std::string& feature) {
  for (auto* f : kVolumeFeatures)
    if (feature == f) return FeatureFamily::volume;
  for (auto* f : kValenceFeatures)
    if (feature == f) return FeatureFamily::valence;
  fail(ErrorCode::parse_error, "unknown feature '" + feature + "'");
}

/// Splits `platform.feature`.
inline std::pair<std::string, std::string> split_column(const std::string& column) {
  const auto dot = column.find('.');
  require(dot != std::string::npos && dot > 0 && dot + 1 < column.size(), ErrorCode::parse_error,
          "feature column '" + column + "' must be named <platform>.<feature>");
  return {column.substr(0, dot), column.substr(dot + 1)};
}

inline void check_cell(const std::string& column, double v, const std::string& where) {
  const auto feature = split_column(column).second;
  require(std::isfinite(v), ErrorCode::parse_error, where + ": non-finite value in '" + column + "'");
  if (feature == "avg_sentiment" || feature == "avg_polarity")
    require(v >= -1.0 && v <= 1.0, ErrorCode::parse_error,
            where + ": " + column + " = " + csv::format_double(v) + " outside [-1, 1]");
  else
    require(v >= 0.0, ErrorCode::parse_error, where + ": " + column + " = " + csv::format_double(v) + " is negative");
}

/// Per-period social features. Column names are `<platform>.<feature>`.
struct FeatureTable {
  Period start{};
  Frequency frequency = Frequency::monthly;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // rows[t][c]

  std::size_t periods() const { return rows.size(); }
  std::size_t width() const { return columns.size(); }
  Period period_at(std::size_t t) const { return advance(start, frequency, static_cast<std::int64_t>(t)); }

  std::size_t column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    require(it != columns.end(), ErrorCode::invalid_argument, "no feature column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) out[t] = rows[t][c];
    return out;
  }

  /// Keeps the listed columns in their current order.
  FeatureTable select(const std::vector<std::size_t>& keep) const {
    FeatureTable out{start, frequency, {}, std::vector<std::vector<double>>(rows.size())};
    for (auto c : keep) {
      out.columns.push_back(columns[c]);
      for (std::size_t t = 0; t < rows.size(); ++t) out.rows[t].push_back(rows[t][c]);
    }
    return out;
  }

  /// Contiguous period range.
  FeatureTable slice(std::size_t offset, std::size_t length) const {
    require(offset + length <= rows.size(), ErrorCode::invalid_argument, "feature slice out of range");
    return {period_at(offset), frequency, columns,
            {rows.begin() + static_cast<std::ptrdiff_t>(offset), rows.begin() + static_cast<std::ptrdiff_t>(offset + length)}};
  }

  void validate() const {
    std::set<std::string> seen;
    for (const auto& c : columns) {
      feature_family(split_column(c).second);
      require(seen.insert(c).second, ErrorCode::parse_error, "duplicate feature column '" + c + "'");
    }
    for (std::size_t t = 0; t < rows.size(); ++t) {
      require(rows[t].size() == columns.size(), ErrorCode::parse_error, "feature row has the wrong width");
      for (std::size_t c = 0; c < columns.size(); ++c) check_cell(columns[c], rows[t][c], csv::format_period(period_at(t), frequency));
    }
  }

  friend bool operator==(const FeatureTable&, const FeatureTable&) = default;
};

enum class FeatureMode { full, attention_only, endorsement_only, none };

inline FeatureMode parse_feature_mode(const std::string& s) {
  if (s == "full") return FeatureMode::full;
  if (s == "attention_only") return FeatureMode::attention_only;
  if (s == "endorsement_only") return FeatureMode::endorsement_only;
  if (s == "none") return FeatureMode::none;
  fail(ErrorCode::invalid_argument, "unknown feature_mode '" + s + "'");
}

inline const char* to_string(FeatureMode m) {
  switch (m) {
    case FeatureMode::full: return "full";
    case FeatureMode::attention_only: return "attention_only";
    case FeatureMode::endorsement_only: return "endorsement_only";
    case FeatureMode::none: return "none";
  }
  return "?";
}

/// Column indices retained by an ablation mode.
inline std::vector<std::size_t> columns_for_mode(const FeatureTable& t, FeatureMode mode) {
  std::vector<std::size_t> keep;
  if (mode == FeatureMode::none) return keep;
  for (std::size_t c = 0; c < t.width(); ++c) {
    const auto fam = feature_family(split_column(t.columns[c]).second);
    if (mode == FeatureMode::full || (mode == FeatureMode::attention_only && fam == FeatureFamily::volume) ||
        (mode == FeatureMode::endorsement_only && fam == FeatureFamily::valence))
      keep.push_back(c);
  }
  return keep;
}

/// Reads `period,<platform>.<feature>,...`. Weekly tables are returned as-is;
/// alignment to a monthly target happens in `resample_to_monthly`.
inline FeatureTable read_features(std::istream& in, const std::string& source = "<features>") {
  const auto t = csv::parse(in, source);
  require(!t.header.empty() && t.header[0] == "period", ErrorCode::parse_error, source + ": first column must be 'period'");
  require(!t.rows.empty(), ErrorCode::parse_error, source + ": no data rows");
  FeatureTable out;
  out.columns.assign(t.header.begin() + 1, t.header.end());
  std::int64_t prev = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto where = source + ":" + std::to_string(t.line_numbers[r]);
    require(t.rows[r].size() == t.header.size(), ErrorCode::parse_error, where + ": wrong number of fields");
    auto [p, f] = csv::parse_period(t.rows[r][0], where);
    const auto idx = period_index(p, f);
    if (r == 0) {
      out.start = p;
      out.frequency = f;
    } else {
      require(f == out.frequency, ErrorCode::parse_error, where + ": mixed period frequencies");
      if (idx <= prev) fail(ErrorCode::parse_error, where + ": period " + t.rows[r][0] + " duplicated or out of order");
      if (idx != prev + 1)
        fail(ErrorCode::alignment_error,
             where + ": missing period " + csv::format_period(period_from_index(prev + 1, f), f));
    }
    prev = idx;
    std::vector<double> row;
    for (std::size_t c = 1; c < t.header.size(); ++c) {
      const double v = csv::parse_double(t.rows[r][c], where);
      check_cell(t.header[c], v, where);
      row.push_back(v);
    }
    out.rows.push_back(std::move(row));
  }
  out.validate();
  return out;
}

inline void write_features(std::ostream& out, const FeatureTable& t) {
  out << "period";
  for (const auto& c : t.columns) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < t.periods(); ++r) {
    out << csv::format_period(t.period_at(r), t.frequency);
    for (double v : t.rows[r]) out << ',' << csv::format_double(v);
    out << '\n';
  }
}

/// Month containing ISO-style week `w` (1..52), approximated by the week's
/// mid-point day.
inline int month_of_week(int week) {
  static constexpr int cumulative[] = {31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334, 365};
  const int day = (week - 1) * 7 + 4;
  for (int m = 0; m < 12; ++m)
    if (day <= cumulative[m]) return m + 1;
  return 12;
}

/// Weekly-to-monthly bridge: each month receives the mean of the weeks
/// mapped into it. Months with no week are an alignment error.
inline FeatureTable resample_to_monthly(const FeatureTable& weekly) {
  require(weekly.frequency == Frequency::weekly, ErrorCode::invalid_argument, "table is not weekly");
  std::map<std::int64_t, std::pair<std::vector<double>, std::size_t>> acc;
  for (std::size_t t = 0; t < weekly.periods(); ++t) {
    const auto p = weekly.period_at(t);
    const auto key = period_index({p.year, month_of_week(p.sub)}, Frequency::monthly);
    auto& [sum, count] = acc[key];
    if (sum.empty()) sum.assign(weekly.width(), 0.0);
    for (std::size_t c = 0; c < weekly.width(); ++c) sum[c] += weekly.rows[t][c];
    ++count;
  }
  FeatureTable out;
  out.frequency = Frequency::monthly;
  out.columns = weekly.columns;
  out.start = period_from_index(acc.begin()->first, Frequency::monthly);
  std::int64_t expect = acc.begin()->first;
  for (auto& [key, v] : acc) {
    require(key == expect, ErrorCode::alignment_error,
            "weekly features leave month " + csv::format_period(period_from_index(expect, Frequency::monthly), Frequency::monthly) +
                " empty");
    for (double& s : v.first) s /= static_cast<double>(v.second);
    out.rows.push_back(std::move(v.first));
    ++expect;
  }
  return out;
}

/// Feature-to-node links. A `*` period applies to every period of a column;
/// a specific period overrides it for that cell.
struct Attribution {
  std::map<std::string, std::vector<std::string>> column_nodes;
  std::map<std::pair<std::string, std::int64_t>, std::vector<std::string>> cell_nodes;  // (column, period index)

  bool empty() const { return column_nodes.empty() && cell_nodes.empty(); }

  const std::vector<std::string>* contributors(const std::string& column, Period p, Frequency f) const {
    if (auto it = cell_nodes.find({column, period_index(p, f)}); it != cell_nodes.end()) return &it->second;
    if (auto it = column_nodes.find(column); it != column_nodes.end()) return &it->second;
    return nullptr;
  }

  friend bool operator==(const Attribution&, const Attribution&) = default;
};

/// `column,period,nodes` with nodes separated by ';'.
inline Attribution read_attribution(std::istream& in, Frequency freq, const std::string& source = "<attribution>") {
  const auto t = csv::parse(in, source);
  const auto cc = t.column("column"), pc = t.column("period"), nc = t.column("nodes");
  Attribution a;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto where = source + ":" + std::to_string(t.line_numbers[r]);
    split_column(t.rows[r][cc]);
    std::vector<std::string> nodes;
    for (auto& n : csv::split_fields(t.rows[r][nc], ';'))
      if (!n.empty()) nodes.push_back(csv::trim(n));
    require(!nodes.empty(), ErrorCode::parse_error, where + ": attribution row lists no nodes");
    if (t.rows[r][pc] == "*") {
      a.column_nodes[t.rows[r][cc]] = std::move(nodes);
    } else {
      auto [p, f] = csv::parse_period(t.rows[r][pc], where);
      require(f == freq, ErrorCode::parse_error, where + ": attribution period frequency differs from the features");
      a.cell_nodes[{t.rows[r][cc], period_index(p, f)}] = std::move(nodes);
    }
  }
  return a;
}

inline void write_attribution(std::ostream& out, const Attribution& a, Frequency freq) {
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + v[i];
    return s;
  };
  out << "column,period,nodes\n";
  for (const auto& [c, nodes] : a.column_nodes) out << c << ",*," << join(nodes) << '\n';
  for (const auto& [key, nodes] : a.cell_nodes)
    out << key.first << ',' << csv::format_period(period_from_index(key.second, freq), freq) << ',' << join(nodes) << '\n';
}

}  // namespace ewtf::pipeline
