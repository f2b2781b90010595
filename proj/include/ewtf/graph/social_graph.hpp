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
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ewtf/core/csv.hpp"
#include "ewtf/core/error.hpp"

namespace ewtf::graph {

struct NodeRecord {
  std::string id;
  double goodwill = 0.5;
  double power = 0.5;
  double uprightness = 0.5;
  double valence = 0.0;

  double reputation() const { return (goodwill + power + uprightness) / 3.0; }
  friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

struct Arc {
  std::size_t source = 0;
  std::size_t target = 0;
  std::uint64_t interaction_count = 0;
  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Directed interaction graph between social-media users.
class SocialGraph {
 public:
  std::size_t add_node(NodeRecord node) {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    require(!node.id.empty(), ErrorCode::invalid_argument, "node id must be nonempty");
    require(!index_.contains(node.id), ErrorCode::invalid_argument, "duplicate node id '" + node.id + "'");
    require(in01(node.goodwill) && in01(node.power) && in01(node.uprightness), ErrorCode::invalid_argument,
            "node '" + node.id + "': goodwill/power/uprightness must lie in [0, 1]");
    require(node.valence >= -1.0 && node.valence <= 1.0, ErrorCode::invalid_argument,
            "node '" + node.id + "': valence must lie in [-1, 1]");
    index_[node.id] = nodes_.size();
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
  }

  void add_arc(std::size_t source, std::size_t target, std::uint64_t count) {
    require(source < nodes_.size() && target < nodes_.size(), ErrorCode::invalid_argument, "arc endpoint out of range");
    require(source != target, ErrorCode::invalid_argument, "self-loop on '" + nodes_[source].id + "'");
    for (const auto& a : arcs_) {
      require(!(a.source == source && a.target == target), ErrorCode::invalid_argument,
              "duplicate arc " + nodes_[source].id + " -> " + nodes_[target].id);
    }
    arcs_.push_back({source, target, count});
  }

  void add_arc(const std::string& source, const std::string& target, std::uint64_t count) {
    add_arc(index_of(source), index_of(target), count);
  }

  std::size_t index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) fail(ErrorCode::invalid_argument, "unknown node id '" + id + "'");
    return it->second;
  }

  bool contains(const std::string& id) const { return index_.contains(id); }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  const NodeRecord& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Arc>& arcs() const { return arcs_; }

  /// Dense interaction-count matrix, row = source.
  std::vector<std::vector<double>> count_matrix() const {
    std::vector<std::vector<double>> m(size(), std::vector<double>(size(), 0.0));
    for (const auto& a : arcs_) m[a.source][a.target] = static_cast<double>(a.interaction_count);
    return m;
  }

  friend bool operator==(const SocialGraph& a, const SocialGraph& b) {
    return a.nodes_ == b.nodes_ && a.arcs_ == b.arcs_;
  }

 private:
  std::vector<NodeRecord> nodes_;
  std::vector<Arc> arcs_;
  std::map<std::string, std::size_t> index_;
};

/// Simple undirected graph with optional edge weights (1 by default).
class UndirectedGraph {
 public:
  explicit UndirectedGraph(std::size_t n = 0) : adj_(n), weight_(n, std::vector<double>(n, 0.0)) {}

  void add_edge(std::size_t a, std::size_t b, double weight = 1.0) {
    require(a < size() && b < size() && a != b, ErrorCode::invalid_argument, "bad undirected edge");
    if (weight_[a][b] == 0.0) {
      adj_[a].push_back(b);
      adj_[b].push_back(a);
    }
    weight_[a][b] = weight_[b][a] = weight;
  }

  std::size_t size() const { return adj_.size(); }
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return adj_[v]; }
  std::size_t degree(std::size_t v) const { return adj_[v].size(); }
  bool has_edge(std::size_t a, std::size_t b) const { return weight_[a][b] != 0.0; }
  double weight(std::size_t a, std::size_t b) const { return weight_[a][b]; }

  std::size_t edge_count() const {
    std::size_t e = 0;
    for (const auto& n : adj_) e += n.size();
    return e / 2;
  }

 private:
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::vector<double>> weight_;
};

inline SocialGraph read_graph(const std::string& nodes_path, const std::string& edges_path) {
  SocialGraph g;
  auto nt = csv::read_file(nodes_path);
  const auto id = nt.column("id"), gw = nt.column("goodwill"), pw = nt.column("power"), up = nt.column("uprightness"),
             va = nt.column("valence");
  for (std::size_t r = 0; r < nt.rows.size(); ++r) {
    const auto where = nodes_path + ":" + std::to_string(nt.line_numbers[r]);
    const auto& row = nt.rows[r];
    try {
      g.add_node({row[id], csv::parse_double(row[gw], where), csv::parse_double(row[pw], where),
                  csv::parse_double(row[up], where), csv::parse_double(row[va], where)});
    } catch (const Error& e) {
      if (e.code() == ErrorCode::parse_error) throw;
      fail(ErrorCode::parse_error, where + ": " + e.what());
    }
  }
  auto et = csv::read_file(edges_path);
  const auto src = et.column("source"), dst = et.column("target"), cnt = et.column("interaction_count");
  for (std::size_t r = 0; r < et.rows.size(); ++r) {
    const auto where = edges_path + ":" + std::to_string(et.line_numbers[r]);
    const auto& row = et.rows[r];
    const auto count = csv::parse_int(row[cnt], where);
    if (count < 0) fail(ErrorCode::parse_error, where + ": interaction_count must be non-negative");
    try {
      g.add_arc(row[src], row[dst], static_cast<std::uint64_t>(count));
    } catch (const Error& e) {
      fail(ErrorCode::parse_error, where + ": " + e.what());
    }
  }
  return g;
}

inline std::string nodes_csv(const SocialGraph& g) {
  std::string out = "id,goodwill,power,uprightness,valence\n";
  for (const auto& n : g.nodes()) {
    out += n.id + ',' + csv::format_double(n.goodwill) + ',' + csv::format_double(n.power) + ',' +
           csv::format_double(n.uprightness) + ',' + csv::format_double(n.valence) + '\n';
  }
  return out;
}

inline std::string edges_csv(const SocialGraph& g) {
  std::string out = "source,target,interaction_count\n";
  for (const auto& a : g.arcs())
    out += g.node(a.source).id + ',' + g.node(a.target).id + ',' + std::to_string(a.interaction_count) + '\n';
  return out;
}

}  // namespace ewtf::graph
