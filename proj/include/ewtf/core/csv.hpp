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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ewtf/core/error.hpp"
#include "ewtf/core/series.hpp"

namespace ewtf::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    fail(ErrorCode::parse_error, "missing column '" + std::string(name) + "'");
  }
};

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline Table parse(std::istream& in, const std::string& source = "<stream>") {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    auto fields = split_fields(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      fail(ErrorCode::parse_error, source + ":" + std::to_string(lineno) + ": expected " +
                                       std::to_string(t.header.size()) + " fields, got " +
                                       std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(lineno);
  }
  require(!t.header.empty(), ErrorCode::parse_error, source + ": empty file");
  return t;
}

inline Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open '" + path + "'");
  return parse(in, path);
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::parse_error, where + ": '" + s + "' is not a number");
  }
  return v;
}

inline long long parse_int(const std::string& s, const std::string& where) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::parse_error, where + ": '" + s + "' is not an integer");
  }
  return v;
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

/// `YYYY-MM` for monthly data, `YYYY-Www` for weekly data.
inline std::string format_period(Period p, Frequency f) {
  char buf[16];
  if (f == Frequency::monthly)
    std::snprintf(buf, sizeof(buf), "%04d-%02d", p.year, p.sub);
  else
    std::snprintf(buf, sizeof(buf), "%04d-W%02d", p.year, p.sub);
  return buf;
}

inline std::pair<Period, Frequency> parse_period(const std::string& s, const std::string& where) {
  auto bad = [&] { fail(ErrorCode::parse_error, where + ": bad period '" + s + "' (expected YYYY-MM)"); };
  if (s.size() < 7 || s[4] != '-') bad();
  const auto year = static_cast<int>(parse_int(s.substr(0, 4), where));
  if (s[5] == 'W') {
    const auto week = static_cast<int>(parse_int(s.substr(6), where));
    if (week < 1 || week > 52) bad();
    return {{year, week}, Frequency::weekly};
  }
  if (s.size() != 7) bad();
  const auto month = static_cast<int>(parse_int(s.substr(5, 2), where));
  if (month < 1 || month > 12) bad();
  return {{year, month}, Frequency::monthly};
}

/// Reads a `period,value` series. Periods must be strictly increasing with
/// no gaps and a single frequency.
inline TimeSeries read_series(std::istream& in, const std::string& name, const std::string& source = "<stream>") {
  auto t = parse(in, source);
  const auto pc = t.column("period");
  const auto vc = t.column("value");
  require(!t.rows.empty(), ErrorCode::parse_error, source + ": no data rows");
  std::vector<double> values;
  Period start{};
  Frequency freq = Frequency::monthly;
  std::int64_t prev = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto where = source + ":" + std::to_string(t.line_numbers[r]);
    auto [p, f] = parse_period(t.rows[r][pc], where);
    const auto idx = period_index(p, f);
    if (r == 0) {
      start = p;
      freq = f;
    } else {
      if (f != freq) fail(ErrorCode::parse_error, where + ": mixed period frequencies");
      if (idx == prev) fail(ErrorCode::parse_error, where + ": duplicate period " + t.rows[r][pc]);
      if (idx < prev) fail(ErrorCode::parse_error, where + ": period " + t.rows[r][pc] + " out of order");
      if (idx != prev + 1) fail(ErrorCode::parse_error, where + ": gap before period " + t.rows[r][pc]);
    }
    prev = idx;
    values.push_back(parse_double(t.rows[r][vc], where));
  }
  return TimeSeries(name, start, freq, std::move(values));
}

inline TimeSeries read_series_file(const std::string& path, const std::string& name = "target") {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open '" + path + "'");
  return read_series(in, name, path);
}

inline void write_series(std::ostream& out, const TimeSeries& s) {
  out << "period,value\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out << format_period(s.period_at(i), s.frequency()) << ',' << format_double(s[i]) << '\n';
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorCode::io_error, "write failed for '" + path + "'");
}

}  // namespace ewtf::csv
