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

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "ewtf/core/csv.hpp"
#include "ewtf/nn/network.hpp"

namespace ewtf::nn {

/// Text checkpoint. Every double is written as a C99 hexadecimal float so a
/// save/load round trip is bit-exact. Layout:
///
///   ewtf-checkpoint 1
///   spec <mode> <num_layers> <units> <dropout> <input_dim> <window_length>
///   seed <uint64>
///   meta <key> <value>            (zero or more, value runs to end of line)
///   tensor <name> <rows> <cols>   (one per slot, in layout order)
///   <rows*cols values, row-major, one per line>
///   end
struct Checkpoint {
  Network net;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> meta;
};

inline std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

inline double parse_hexfloat(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) fail(ErrorCode::parse_error, where + ": bad number '" + s + "'");
  return v;
}

inline void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  const auto& s = ck.net.spec;
  out << "ewtf-checkpoint 1\n";
  out << "spec " << to_string(s.mode) << ' ' << s.num_layers << ' ' << s.units << ' ' << hexfloat(s.dropout) << ' '
      << s.input_dim << ' ' << s.window_length << '\n';
  out << "seed " << ck.seed << '\n';
  for (const auto& [k, v] : ck.meta) {
    require(k.find_first_of(" \t\n") == std::string::npos && v.find('\n') == std::string::npos,
            ErrorCode::invalid_argument, "checkpoint meta keys cannot contain spaces or newlines");
    out << "meta " << k << ' ' << v << '\n';
  }
  for (const auto& slot : parameter_layout(s)) {
    out << "tensor " << slot.name << ' ' << slot.rows << ' ' << slot.cols << '\n';
    for (std::size_t k = 0; k < slot.size(); ++k) out << hexfloat(ck.net.params[slot.offset + k]) << '\n';
  }
  out << "end\n";
}

inline Checkpoint read_checkpoint(std::istream& in, const std::string& source = "checkpoint") {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> std::string {
    if (!std::getline(in, line)) fail(ErrorCode::parse_error, source + ": unexpected end of file");
    ++lineno;
    return line;
  };
  auto where = [&] { return source + ":" + std::to_string(lineno); };

  if (next() != "ewtf-checkpoint 1") fail(ErrorCode::parse_error, where() + ": not a version-1 checkpoint");
  Checkpoint ck;
  {
    std::istringstream ss(next());
    std::string tag, mode, dropout;
    NetworkSpec spec;
    if (!(ss >> tag >> mode >> spec.num_layers >> spec.units >> dropout >> spec.input_dim >> spec.window_length) ||
        tag != "spec")
      fail(ErrorCode::parse_error, where() + ": malformed spec line");
    spec.mode = parse_mode(mode);
    spec.dropout = parse_hexfloat(dropout, where());
    spec.validate();
    ck.net.spec = spec;
  }
  {
    std::istringstream ss(next());
    std::string tag;
    if (!(ss >> tag >> ck.seed) || tag != "seed") fail(ErrorCode::parse_error, where() + ": malformed seed line");
  }
  ck.net.params.assign(parameter_count(ck.net.spec), 0.0);
  const auto slots = parameter_layout(ck.net.spec);
  std::size_t slot = 0;
  while (true) {
    const auto l = next();
    if (l == "end") break;
    if (l.rfind("meta ", 0) == 0) {
      const auto rest = l.substr(5);
      const auto sp = rest.find(' ');
      if (sp == std::string::npos) fail(ErrorCode::parse_error, where() + ": malformed meta line");
      ck.meta[rest.substr(0, sp)] = rest.substr(sp + 1);
      continue;
    }
    std::istringstream ss(l);
    std::string tag, name;
    std::size_t rows = 0, cols = 0;
    if (!(ss >> tag >> name >> rows >> cols) || tag != "tensor")
      fail(ErrorCode::parse_error, where() + ": expected a tensor header");
    require(slot < slots.size() && slots[slot].name == name && slots[slot].rows == rows && slots[slot].cols == cols,
            ErrorCode::parse_error, where() + ": tensor '" + name + "' does not match the declared spec");
    for (std::size_t k = 0; k < rows * cols; ++k) ck.net.params[slots[slot].offset + k] = parse_hexfloat(next(), where());
    ++slot;
  }
  require(slot == slots.size(), ErrorCode::parse_error, source + ": missing tensors");
  return ck;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ostringstream out;
  write_checkpoint(out, ck);
  csv::write_text_file(path, out.str());
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open checkpoint '" + path + "'");
  return read_checkpoint(in, path);
}

}  // namespace ewtf::nn
