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

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ewtf/core/csv.hpp"
#include "ewtf/ewt/ewt.hpp"
#include "ewtf/game/leaders.hpp"
#include "ewtf/nn/train.hpp"
#include "ewtf/pipeline/features.hpp"

namespace ewtf::pipeline {

enum class Assembly { component_augmented, decompose_ensemble };
enum class TargetMode { delta, level };

struct BoSettings {
  std::size_t budget = 0;  // 0 disables tuning; fixed hyperparameters are used
  std::size_t init = 0;    // 0 selects max(5, budget / 4)
  std::size_t folds = 3;
  double xi = 0.01;
};

struct PipelineConfig {
  FeatureMode feature_mode = FeatureMode::full;
  bool use_ewt = true;
  bool use_leaders = true;
  bool scenario_grid = true;
  Assembly assembly = Assembly::component_augmented;
  TargetMode target_mode = TargetMode::delta;
  std::vector<std::size_t> horizons{1, 2, 3};
  std::uint64_t seed = 42;
  std::size_t test_length = 0;  // 0 selects the trailing 20%

  ewt::EwtConfig ewt;
  bool ewt_trend_anchor = true;  // adds a first-bin maximum so the trend gets its own band
  graph::TrustModel trust;
  game::CharacteristicFn characteristic;
  game::GameParams game;
  game::SynergyParams synergy;
  game::SearchConfig search;
  double decay_kappa = std::log(2.0);
  std::size_t max_hops = 3;

  nn::NetworkSpec network;  // input_dim is derived from the channel layout
  nn::TrainingConfig training;
  BoSettings bo;

  void validate() const {
    require(!horizons.empty(), ErrorCode::invalid_argument, "at least one horizon is required");
    for (auto h : horizons) require(h >= 1, ErrorCode::invalid_argument, "horizons must be >= 1");
    ewt.validate();
    trust.validate();
    characteristic.validate();
    game.validate();
    synergy.validate();
    search.validate();
    require(decay_kappa > 0 && max_hops >= 1, ErrorCode::invalid_argument, "weights need kappa > 0 and max_hops >= 1");
    network.validate();
    training.validate();
    require(bo.folds >= 1, ErrorCode::invalid_argument, "bo.folds must be >= 1");
    if (bo.budget > 0)
      require(bo.budget >= std::max<std::size_t>(2, bo.init), ErrorCode::invalid_argument, "bo.budget must cover bo.init");
  }
};

namespace detail {

inline std::string fmt(double v) { return csv::format_double(v); }
inline std::string fmt(bool v) { return v ? "true" : "false"; }
inline std::string fmt(std::size_t v) { return std::to_string(v); }

inline double to_double(const std::string& s, const std::string& key) { return csv::parse_double(s, key); }

inline std::size_t to_size(const std::string& s, const std::string& key) {
  const auto v = csv::parse_int(s, key);
  require(v >= 0, ErrorCode::parse_error, key + ": expected a non-negative integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

inline bool to_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  fail(ErrorCode::parse_error, key + ": expected a boolean, got '" + s + "'");
}

struct Key {
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, const std::string&, const std::string&)> set;
};

#define EWTF_NUM(field, conv) \
  Key{[](const PipelineConfig& c) { return fmt(c.field); }, [](PipelineConfig& c, const std::string& v, const std::string& k) { c.field = conv(v, k); }}

/// Every recognised `section.key`, in echo order.
inline const std::vector<std::pair<std::string, Key>>& registry() {
  static const std::vector<std::pair<std::string, Key>> keys = {
      {"pipeline.feature_mode",
       {[](const PipelineConfig& c) { return std::string(to_string(c.feature_mode)); },
        [](PipelineConfig& c, const std::string& v, const std::string&) { c.feature_mode = parse_feature_mode(v); }}},
      {"pipeline.use_ewt", EWTF_NUM(use_ewt, to_bool)},
      {"pipeline.use_leaders", EWTF_NUM(use_leaders, to_bool)},
      {"pipeline.scenario_grid", EWTF_NUM(scenario_grid, to_bool)},
      {"pipeline.assembly",
       {[](const PipelineConfig& c) {
          return std::string(c.assembly == Assembly::component_augmented ? "component_augmented" : "decompose_ensemble");
        },
        [](PipelineConfig& c, const std::string& v, const std::string& k) {
          if (v == "component_augmented") c.assembly = Assembly::component_augmented;
          else if (v == "decompose_ensemble") c.assembly = Assembly::decompose_ensemble;
          else fail(ErrorCode::parse_error, k + ": unknown assembly '" + v + "'");
        }}},
      {"pipeline.target_mode",
       {[](const PipelineConfig& c) { return std::string(c.target_mode == TargetMode::delta ? "delta" : "level"); },
        [](PipelineConfig& c, const std::string& v, const std::string& k) {
          if (v == "delta") c.target_mode = TargetMode::delta;
          else if (v == "level") c.target_mode = TargetMode::level;
          else fail(ErrorCode::parse_error, k + ": unknown target_mode '" + v + "'");
        }}},
      {"pipeline.horizons",
       {[](const PipelineConfig& c) {
          std::string s;
          for (std::size_t i = 0; i < c.horizons.size(); ++i) s += (i ? "," : "") + std::to_string(c.horizons[i]);
          return s;
        },
        [](PipelineConfig& c, const std::string& v, const std::string& k) {
          c.horizons.clear();
          for (const auto& part : csv::split_fields(v, ',')) c.horizons.push_back(to_size(csv::trim(part), k));
        }}},
      {"pipeline.seed",
       {[](const PipelineConfig& c) { return std::to_string(c.seed); },
        [](PipelineConfig& c, const std::string& v, const std::string& k) {
          std::uint64_t s = 0;
          auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
          require(ec == std::errc() && p == v.data() + v.size(), ErrorCode::parse_error, k + ": bad seed '" + v + "'");
          c.seed = s;
        }}},
      {"pipeline.test_length", EWTF_NUM(test_length, to_size)},
      {"ewt.num_components",
       {[](const PipelineConfig& c) { return c.ewt.num_components ? std::to_string(*c.ewt.num_components) : "auto"; },
        [](PipelineConfig& c, const std::string& v, const std::string& k) {
          if (v == "auto") c.ewt.num_components.reset();
          else c.ewt.num_components = to_size(v, k);
        }}},
      {"ewt.gamma",
       {[](const PipelineConfig& c) { return c.ewt.gamma ? fmt(*c.ewt.gamma) : "auto"; },
        [](PipelineConfig& c, const std::string& v, const std::string& k) {
          if (v == "auto") c.ewt.gamma.reset();
          else c.ewt.gamma = to_double(v, k);
        }}},
      {"ewt.min_peak_prominence", EWTF_NUM(ewt.min_peak_prominence, to_double)},
      {"ewt.max_auto_components", EWTF_NUM(ewt.max_auto_components, to_size)},
      {"ewt.trend_anchor", EWTF_NUM(ewt_trend_anchor, to_bool)},
      {"trust.k", EWTF_NUM(trust.k, to_double)},
      {"trust.l", EWTF_NUM(trust.l, to_double)},
      {"trust.s", EWTF_NUM(trust.s, to_double)},
      {"trust.w_direct", EWTF_NUM(trust.w_d, to_double)},
      {"trust.w_indirect", EWTF_NUM(trust.w_i, to_double)},
      {"trust.w_recommendation", EWTF_NUM(trust.w_r, to_double)},
      {"game.neighbor_threshold", EWTF_NUM(characteristic.neighbor_threshold, to_size)},
      {"game.x_pay", EWTF_NUM(game.x_pay, to_double)},
      {"game.y_pay", EWTF_NUM(game.y_pay, to_double)},
      {"game.i_pay", EWTF_NUM(game.i_pay, to_double)},
      {"game.u_a", EWTF_NUM(game.u_a, to_double)},
      {"game.u_b", EWTF_NUM(game.u_b, to_double)},
      {"game.lambda", EWTF_NUM(game.lambda, to_double)},
      {"game.rho", EWTF_NUM(game.rho, to_double)},
      {"synergy.delta", EWTF_NUM(synergy.delta, to_double)},
      {"synergy.partial", EWTF_NUM(synergy.partial, to_double)},
      {"synergy.c", EWTF_NUM(synergy.c, to_double)},
      {"search.ec_percentile", EWTF_NUM(search.ec_percentile, to_double)},
      {"search.agreement_filter", EWTF_NUM(search.agreement_filter, to_bool)},
      {"search.max_size", EWTF_NUM(search.max_size, to_size)},
      {"search.exhaustive_pool_limit", EWTF_NUM(search.exhaustive_pool_limit, to_size)},
      {"search.beam_width", EWTF_NUM(search.beam_width, to_size)},
      {"search.mc_samples", EWTF_NUM(search.mc_samples, to_size)},
      {"weights.decay_kappa", EWTF_NUM(decay_kappa, to_double)},
      {"weights.max_hops", EWTF_NUM(max_hops, to_size)},
      {"network.layers", EWTF_NUM(network.num_layers, to_size)},
      {"network.units", EWTF_NUM(network.units, to_size)},
      {"network.dropout", EWTF_NUM(network.dropout, to_double)},
      {"network.mode",
       {[](const PipelineConfig& c) { return std::string(nn::to_string(c.network.mode)); },
        [](PipelineConfig& c, const std::string& v, const std::string&) { c.network.mode = nn::parse_mode(v); }}},
      {"network.window_length", EWTF_NUM(network.window_length, to_size)},
      {"training.learning_rate", EWTF_NUM(training.learning_rate, to_double)},
      {"training.l2", EWTF_NUM(training.l2_penalty, to_double)},
      {"training.max_epochs", EWTF_NUM(training.max_epochs, to_size)},
      {"training.patience", EWTF_NUM(training.patience, to_size)},
      {"training.clip", EWTF_NUM(training.grad_clip_norm, to_double)},
      {"training.validation_fraction", EWTF_NUM(training.validation_fraction, to_double)},
      {"bo.budget", EWTF_NUM(bo.budget, to_size)},
      {"bo.init", EWTF_NUM(bo.init, to_size)},
      {"bo.folds", EWTF_NUM(bo.folds, to_size)},
      {"bo.xi", EWTF_NUM(bo.xi, to_double)},
  };
  return keys;
}

#undef EWTF_NUM

}  // namespace detail

/// INI text: `[section]` headers and `key = value` lines; `;` or `#` start
/// comments. Unknown sections or keys are errors.
inline PipelineConfig parse_config(std::istream& in, const std::string& source = "<config>") {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    fail(ErrorCode::parse_error, source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  PipelineConfig c;
  const auto& keys = detail::registry();
  for (const auto& [section, body] : tree) {
    require(body.data().empty(), ErrorCode::parse_error, source + ": key '" + section + "' must sit inside a [section]");
    for (const auto& [key, value] : body) {
      const auto full = section + "." + key;
      auto it = std::find_if(keys.begin(), keys.end(), [&](const auto& kv) { return kv.first == full; });
      require(it != keys.end(), ErrorCode::parse_error, source + ": unknown key '" + full + "'");
      it->second.set(c, csv::trim(value.data()), source + ": " + full);
    }
  }
  c.validate();
  return c;
}

inline PipelineConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io_error, "cannot open config '" + path + "'");
  return parse_config(in, path);
}

/// Full config as INI text; `parse_config(config_to_ini(c))` reproduces `c`.
inline std::string config_to_ini(const PipelineConfig& c) {
  std::string out, current;
  for (const auto& [full, key] : detail::registry()) {
    const auto dot = full.find('.');
    const auto section = full.substr(0, dot);
    if (section != current) {
      out += (out.empty() ? "" : "\n") + std::string("[") + section + "]\n";
      current = section;
    }
    out += full.substr(dot + 1) + " = " + key.get(c) + "\n";
  }
  return out;
}

/// Flat `section.key -> value` view used for report metadata.
inline std::vector<std::pair<std::string, std::string>> config_echo(const PipelineConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [full, key] : detail::registry()) out.emplace_back(full, key.get(c));
  return out;
}

}  // namespace ewtf::pipeline
