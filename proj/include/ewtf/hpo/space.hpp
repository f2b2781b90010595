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
#include <string>
#include <variant>
#include <vector>

#include "ewtf/core/error.hpp"

namespace ewtf::hpo {

enum class DimKind { integer_linear, real_log, real_linear, categorical };

inline const char* to_string(DimKind k) {
  switch (k) {
    case DimKind::integer_linear: return "integer_linear";
    case DimKind::real_log: return "real_log";
    case DimKind::real_linear: return "real_linear";
    case DimKind::categorical: return "categorical";
  }
  return "?";
}

struct Dimension {
  std::string name;
  DimKind kind = DimKind::real_linear;
  double lower = 0.0;
  double upper = 1.0;
  std::vector<std::string> categories;

  std::size_t width() const { return kind == DimKind::categorical ? categories.size() : 1; }

  void validate() const {
    if (kind == DimKind::categorical) {
      require(!categories.empty(), ErrorCode::invalid_argument, "dimension '" + name + "' has no categories");
      return;
    }
    require(std::isfinite(lower) && std::isfinite(upper) && lower < upper, ErrorCode::invalid_argument,
            "dimension '" + name + "' needs finite bounds with lower < upper");
    if (kind == DimKind::real_log) require(lower > 0, ErrorCode::invalid_argument, "log dimension '" + name + "' needs lower > 0");
    if (kind == DimKind::integer_linear)
      require(lower == std::floor(lower) && upper == std::floor(upper), ErrorCode::invalid_argument,
              "integer dimension '" + name + "' needs integral bounds");
  }
};

using Value = std::variant<std::int64_t, double, std::string>;
using Point = std::vector<Value>;

struct SearchSpace {
  std::vector<Dimension> dims;

  /// The default box: units, layers, learning rate, L2, dropout, mode.
  static SearchSpace lstm_default() {
    return {{{"units", DimKind::integer_linear, 60, 250, {}},
             {"layers", DimKind::integer_linear, 1, 8, {}},
             {"learning_rate", DimKind::real_log, 1e-2, 1.0, {}},
             {"l2", DimKind::real_log, 1e-10, 1e-2, {}},
             {"dropout", DimKind::real_linear, 0.1, 0.9, {}},
             {"mode", DimKind::categorical, 0, 0, {"bilstm", "lstm"}}}};
  }

  void validate() const {
    require(!dims.empty(), ErrorCode::invalid_argument, "search space has no dimensions");
    for (std::size_t a = 0; a < dims.size(); ++a) {
      dims[a].validate();
      for (std::size_t b = a + 1; b < dims.size(); ++b)
        require(dims[a].name != dims[b].name, ErrorCode::invalid_argument, "duplicate dimension '" + dims[a].name + "'");
    }
  }

  std::size_t encoded_size() const {
    std::size_t n = 0;
    for (const auto& d : dims) n += d.width();
    return n;
  }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t k = 0; k < dims.size(); ++k)
      if (dims[k].name == name) return k;
    fail(ErrorCode::invalid_argument, "no dimension named '" + name + "'");
  }

  /// Length-scale group of every encoded coordinate (one group per dimension).
  std::vector<std::size_t> coordinate_groups() const {
    std::vector<std::size_t> g;
    for (std::size_t k = 0; k < dims.size(); ++k)
      for (std::size_t w = 0; w < dims[k].width(); ++w) g.push_back(k);
    return g;
  }
};

inline double as_number(const Value& v) {
  if (auto p = std::get_if<std::int64_t>(&v)) return static_cast<double>(*p);
  if (auto p = std::get_if<double>(&v)) return *p;
  fail(ErrorCode::invalid_argument, "expected a numeric hyperparameter value");
}

inline std::string format_value(const Value& v) {
  if (auto p = std::get_if<std::int64_t>(&v)) return std::to_string(*p);
  if (auto p = std::get_if<std::string>(&v)) return *p;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v));
  return buf;
}

inline std::vector<double> encode(const Point& p, const SearchSpace& space) {
  require(p.size() == space.dims.size(), ErrorCode::shape_mismatch, "point has the wrong number of values");
  std::vector<double> z;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto& d = space.dims[k];
    if (d.kind == DimKind::categorical) {
      const auto* s = std::get_if<std::string>(&p[k]);
      require(s != nullptr, ErrorCode::out_of_bounds, "dimension '" + d.name + "' expects a category");
      auto it = std::find(d.categories.begin(), d.categories.end(), *s);
      require(it != d.categories.end(), ErrorCode::out_of_bounds, "'" + *s + "' is not a category of '" + d.name + "'");
      for (std::size_t c = 0; c < d.categories.size(); ++c) z.push_back(d.categories[c] == *s ? 1.0 : 0.0);
      continue;
    }
    if (d.kind == DimKind::integer_linear)
      require(std::holds_alternative<std::int64_t>(p[k]), ErrorCode::out_of_bounds, "dimension '" + d.name + "' expects an integer");
    const double v = as_number(p[k]);
    require(v >= d.lower && v <= d.upper, ErrorCode::out_of_bounds,
            "value " + format_value(p[k]) + " outside the bounds of '" + d.name + "'");
    if (d.kind == DimKind::real_log)
      z.push_back((std::log(v) - std::log(d.lower)) / (std::log(d.upper) - std::log(d.lower)));
    else
      z.push_back((v - d.lower) / (d.upper - d.lower));
  }
  return z;
}

/// Inverse of `encode`; coordinates are clamped to [0, 1], integers rounded
/// and categories chosen by the largest one-hot entry.
inline Point decode(const std::vector<double>& z, const SearchSpace& space) {
  require(z.size() == space.encoded_size(), ErrorCode::shape_mismatch, "encoded vector has the wrong length");
  Point p;
  std::size_t at = 0;
  for (const auto& d : space.dims) {
    if (d.kind == DimKind::categorical) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < d.categories.size(); ++c)
        if (z[at + c] > z[at + best]) best = c;
      p.emplace_back(d.categories[best]);
      at += d.categories.size();
      continue;
    }
    const double u = std::clamp(z[at++], 0.0, 1.0);
    switch (d.kind) {
      case DimKind::integer_linear:
        p.emplace_back(static_cast<std::int64_t>(std::llround(d.lower + u * (d.upper - d.lower))));
        break;
      case DimKind::real_log: {
        const double v = std::exp(std::log(d.lower) + u * (std::log(d.upper) - std::log(d.lower)));
        p.emplace_back(std::clamp(v, d.lower, d.upper));
        break;
      }
      default:
        p.emplace_back(d.lower + u * (d.upper - d.lower));
    }
  }
  return p;
}

/// Maps one coordinate per dimension in [0, 1) onto a valid point; a
/// categorical coordinate selects category floor(u * k).
inline Point from_unit(const std::vector<double>& u, const SearchSpace& space) {
  require(u.size() == space.dims.size(), ErrorCode::shape_mismatch, "unit vector has the wrong length");
  std::vector<double> z;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const auto& d = space.dims[k];
    if (d.kind == DimKind::categorical) {
      const auto n = d.categories.size();
      const auto pick = std::min(n - 1, static_cast<std::size_t>(std::clamp(u[k], 0.0, 1.0) * static_cast<double>(n)));
      for (std::size_t c = 0; c < n; ++c) z.push_back(c == pick ? 1.0 : 0.0);
    } else {
      z.push_back(u[k]);
    }
  }
  return decode(z, space);
}

}  // namespace ewtf::hpo
