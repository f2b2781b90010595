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
#include <optional>
#include <string>
#include <vector>

#include "ewtf/core/metrics.hpp"
#include "ewtf/core/series.hpp"
#include "ewtf/hpo/bo.hpp"
#include "ewtf/pipeline/assembly.hpp"
#include "ewtf/pipeline/bundle.hpp"
#include "ewtf/pipeline/config.hpp"
#include "ewtf/pipeline/cv.hpp"

#ifndef EWTF_VERSION
#define EWTF_VERSION "0.0.0"
#endif

namespace ewtf::pipeline {

struct HorizonMetrics {
  std::size_t horizon = 1;
  std::size_t n = 0;
  double mape = 0.0;
  double rmse = 0.0;
  double rmsre = 0.0;
  std::vector<double> observed;
  std::vector<double> predicted;
};

struct ScenarioResult {
  std::string label;
  bool leaders = false;
  bool ewt = false;
  std::uint64_t seed = 0;
  std::size_t input_width = 0;
  std::size_t components = 1;
  std::vector<std::pair<std::string, std::string>> hyperparameters;
  std::optional<double> cv_loss;  // best rolling-origin loss when tuned
  std::vector<HorizonMetrics> horizons;
  std::vector<nn::Network> models;  // not serialized
  std::vector<std::size_t> best_epochs;

  const HorizonMetrics& at(std::size_t h) const {
    for (const auto& m : horizons)
      if (m.horizon == h) return m;
    fail(ErrorCode::invalid_argument, "scenario " + label + " has no horizon " + std::to_string(h));
  }
};

/// Relative improvement of `candidate` over `baseline` for one metric.
struct Improvement {
  std::string factor;  // "ewt" or "leaders"
  std::string held;    // the other factor's fixed setting, e.g. "leaders=on"
  std::string baseline;
  std::string candidate;
  std::size_t horizon = 1;
  std::string metric;
  double baseline_value = 0.0;
  double candidate_value = 0.0;
  double improvement_pct = 0.0;
};

struct ForecastReport {
  std::string version = EWTF_VERSION;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;
  std::size_t n_total = 0, n_train = 0, n_test = 0;
  std::string first_test_period;
  std::vector<std::string> leader_ids;
  std::vector<std::string> warnings;
  std::vector<ScenarioResult> scenarios;
  std::vector<Improvement> improvements;

  const ScenarioResult& scenario(const std::string& label) const {
    for (const auto& s : scenarios)
      if (s.label == label) return s;
    fail(ErrorCode::invalid_argument, "no scenario '" + label + "'");
  }
};

inline std::string scenario_label(bool leaders, bool ewt) {
  return std::string("leaders=") + (leaders ? "on" : "off") + ",ewt=" + (ewt ? "on" : "off");
}

inline double metric_value(const HorizonMetrics& m, const std::string& metric) {
  if (metric == "mape") return m.mape;
  if (metric == "rmse") return m.rmse;
  if (metric == "rmsre") return m.rmsre;
  fail(ErrorCode::invalid_argument, "unknown metric '" + metric + "'");
}

/// Runs `f`, prefixing any error message with the stage name.
template <typename F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.message());
  }
}

/// Everything a scenario needs that does not depend on the scenario itself.
struct PreparedData {
  std::size_t n_train = 0;
  NormalizationParams norm;
  std::vector<double> x;                         // normalized target, full length
  std::vector<std::vector<double>> features;     // scaled, unweighted
  std::vector<std::vector<double>> weighted;     // scaled, leader-weighted
  std::vector<std::string> feature_columns;
  std::optional<ewt::SpectralBoundaries> boundaries;
  std::optional<game::LeaderDetection> leaders;
  bool leaders_available = false;
  std::vector<std::string> warnings;
};

inline std::size_t test_length_for(const PipelineConfig& cfg, std::size_t n) {
  return cfg.test_length > 0 ? cfg.test_length : SplitSpec::default_for(n).test_length;
}

/// Boundaries detected on `head`. With the trend anchor, a first-bin
/// maximum is added when every detected peak lies above it, so slow drift
/// gets its own low-pass band instead of leaking into the first oscillation.
inline ewt::SpectralBoundaries fit_boundaries(std::span<const double> head, const PipelineConfig& cfg) {
  const auto spectrum = ewt::compute_spectrum(head);
  auto maxima = ewt::detect_maxima(spectrum, head.size(), cfg.ewt);
  const double anchor = ewt::bin_frequency(1, head.size());
  if (cfg.ewt_trend_anchor && !cfg.ewt.num_components && maxima.front() > anchor * (1 + 1e-12))
    maxima.insert(maxima.begin(), anchor);
  return ewt::compute_boundaries(maxima, cfg.ewt);
}

/// Normalization, feature scaling, leader detection and EWT boundary fitting,
/// all from the training range only.
inline PreparedData prepare(const PipelineConfig& cfg, const Bundle& bundle) {
  PreparedData d;
  const auto n = bundle.target.size();
  const auto [train, test] = staged("split", [&] { return split(bundle.target, SplitSpec{test_length_for(cfg, n)}); });
  d.n_train = train.size();
  d.norm = staged("normalize", [&] { return fit_normalization(train.values()); });
  d.x = apply_normalization(bundle.target.values(), d.norm);

  std::optional<FeatureTable> scaled;
  if (bundle.features && cfg.feature_mode != FeatureMode::none) {
    staged("features", [&] {
      check_alignment(bundle.target, *bundle.features);
      const auto selected = bundle.features->select(columns_for_mode(*bundle.features, cfg.feature_mode));
      if (selected.width() == 0) {
        d.warnings.push_back("feature mode " + std::string(to_string(cfg.feature_mode)) + " selects no columns");
        return;
      }
      scaled = FeatureScaling::fit(selected, d.n_train).apply(selected);
      d.feature_columns = scaled->columns;
      d.features = scaled->rows;
      d.weighted = scaled->rows;
    });
  }

  const bool want_leaders = cfg.use_leaders || cfg.scenario_grid;
  if (want_leaders) {
    if (!bundle.graph) {
      d.warnings.push_back("no interaction graph supplied; leader scenarios skipped");
    } else if (!scaled) {
      d.warnings.push_back("no feature columns in use; leader weighting has nothing to scale");
    } else {
      staged("leaders", [&] {
        auto search = cfg.search;
        search.seed = derive_seed(cfg.seed, "leaders");
        d.leaders = game::detect_leaders(*bundle.graph, cfg.trust, cfg.characteristic, cfg.game, cfg.synergy, search);
        for (const auto& w : d.leaders->warnings) d.warnings.push_back("leaders: " + w);
        const auto weights =
            game::assign_weights(*bundle.graph, d.leaders->trust.adjacency, d.leaders->winner, cfg.decay_kappa, cfg.max_hops);
        auto res = apply_leader_weights(*scaled, bundle.attribution, *bundle.graph, weights.weight);
        for (const auto& w : res.warnings) d.warnings.push_back("leaders: " + w);
        d.weighted = std::move(res.features.rows);
        d.leaders_available = res.cells_scaled > 0;
      });
    }
  }

  if (cfg.use_ewt || cfg.scenario_grid) {
    try {
      d.boundaries = fit_boundaries(std::span<const double>(d.x.data(), d.n_train), cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_peaks) throw Error(e.code(), std::string("ewt: ") + e.message());
      d.warnings.push_back("ewt: no spectral peaks in the training range; EWT scenarios run on the raw target");
    }
  }
  return d;
}

inline ChannelPlan plan_for(const PipelineConfig& cfg, const PreparedData& d, bool use_ewt) {
  ChannelPlan plan;
  plan.use_ewt = use_ewt && d.boundaries.has_value();
  if (plan.use_ewt) plan.boundaries = *d.boundaries;
  plan.target_mode = cfg.target_mode;
  plan.window = cfg.network.window_length;
  plan.feature_width = d.feature_columns.size();
  return plan;
}

/// Training windows of one grid cell, one set per ensemble member.
inline std::vector<WindowSet> scenario_windows(const PipelineConfig& cfg, const PreparedData& d, bool leaders, bool use_ewt) {
  const auto plan = plan_for(cfg, d, use_ewt);
  return staged("windows", [&] {
    return assemble_windows(d.x, leaders ? d.weighted : d.features, plan, plan.window, d.n_train - 1,
                            cfg.assembly == Assembly::decompose_ensemble);
  });
}

/// Bayesian search over the default box, scoring each point by the mean
/// rolling-origin loss across ensemble members.
inline hpo::BoHistory tune_scenario(const PipelineConfig& cfg, const std::vector<WindowSet>& sets, std::uint64_t seed) {
  require(cfg.bo.budget > 0, ErrorCode::invalid_argument, "bo.budget must be > 0 to tune");
  return staged("tune", [&] {
    const auto space = hpo::SearchSpace::lstm_default();
    auto objective = [&](const hpo::Point& p) {
      auto s = cfg.network;
      auto t = cfg.training;
      apply_point(p, space, s, t);
      double total = 0.0;
      for (std::size_t k = 0; k < sets.size(); ++k) {
        s.input_dim = static_cast<std::size_t>(sets[k].windows.front().cols());
        t.seed = derive_seed(seed, "cv" + std::to_string(k));
        total += cv_loss(sets[k].windows, sets[k].targets, s, t, cfg.bo.folds);
      }
      return total / static_cast<double>(sets.size());
    };
    hpo::AcquisitionConfig acq;
    acq.xi = cfg.bo.xi;
    const auto init = cfg.bo.init > 0 ? cfg.bo.init : hpo::default_init_design(cfg.bo.budget);
    return hpo::run_bo(objective, space, cfg.bo.budget, std::min(init, cfg.bo.budget), derive_seed(seed, "bo"), acq);
  });
}

/// Tunes if requested, then trains every member of one grid cell.
inline ScenarioResult train_scenario(const PipelineConfig& cfg, const PreparedData& d, bool leaders, bool use_ewt) {
  ScenarioResult r;
  r.label = scenario_label(leaders, use_ewt);
  r.leaders = leaders;
  r.ewt = use_ewt;
  r.seed = derive_seed(cfg.seed, r.label);
  r.components = plan_for(cfg, d, use_ewt).components();
  const auto sets = scenario_windows(cfg, d, leaders, use_ewt);

  nn::NetworkSpec spec = cfg.network;
  nn::TrainingConfig tcfg = cfg.training;
  if (cfg.bo.budget > 0) {
    const auto hist = tune_scenario(cfg, sets, r.seed);
    apply_point(hist.best_point(), hpo::SearchSpace::lstm_default(), spec, tcfg);
    r.cv_loss = hist.best_loss();
  }
  r.hyperparameters = {{"layers", std::to_string(spec.num_layers)},
                       {"units", std::to_string(spec.units)},
                       {"dropout", csv::format_double(spec.dropout)},
                       {"mode", nn::to_string(spec.mode)},
                       {"window_length", std::to_string(spec.window_length)},
                       {"learning_rate", csv::format_double(tcfg.learning_rate)},
                       {"l2", csv::format_double(tcfg.l2_penalty)}};

  staged("train", [&] {
    for (std::size_t k = 0; k < sets.size(); ++k) {
      auto s = spec;
      s.input_dim = static_cast<std::size_t>(sets[k].windows.front().cols());
      auto t = tcfg;
      t.seed = derive_seed(r.seed, "member" + std::to_string(k));
      auto model = nn::train(sets[k].windows, sets[k].targets, s, t);
      r.models.push_back(std::move(model.net));
      r.best_epochs.push_back(model.best_epoch);
    }
  });
  r.input_width = r.models.front().spec.input_dim;
  return r;
}

/// Recursive test-set forecasts for every configured horizon, scored in
/// original units. Forecasts for test index j start from origin j - h.
inline void evaluate_scenario(const PipelineConfig& cfg, const Bundle& bundle, const PreparedData& d, ScenarioResult& r) {
  const auto plan = plan_for(cfg, d, r.ewt);
  const bool ensemble = cfg.assembly == Assembly::decompose_ensemble;
  const auto& rows = r.leaders ? d.weighted : d.features;
  r.horizons.clear();
  staged("evaluate", [&] {
    const auto n = d.x.size();
    for (auto h : cfg.horizons) {
      std::vector<double> obs, pred;
      for (std::size_t j = d.n_train; j < n; ++j) {
        require(j >= h + plan.window - 1, ErrorCode::too_short, "not enough history for horizon " + std::to_string(h));
        const auto path = forecast_recursive(d.x, rows, j - h, h, plan, r.models, ensemble);
        pred.push_back(path.back());
        obs.push_back(bundle.target[j]);
      }
      pred = denormalize_values(pred, d.norm);
      const auto ev = evaluate(obs, pred);
      r.horizons.push_back({h, ev.n, ev.mape, ev.rmse, ev.rmsre, obs, pred});
    }
  });
}

/// Trains, tunes if requested, and evaluates one grid cell.
inline ScenarioResult run_scenario(const PipelineConfig& cfg, const Bundle& bundle, const PreparedData& d, bool leaders,
                                   bool use_ewt) {
  auto r = train_scenario(cfg, d, leaders, use_ewt);
  evaluate_scenario(cfg, bundle, d, r);
  return r;
}

/// Pairwise improvements: EWT on vs off with leaders held fixed, and leaders
/// on vs off with EWT held fixed.
inline std::vector<Improvement> improvements_for(const std::vector<ScenarioResult>& scenarios, std::vector<std::string>& warnings) {
  std::vector<Improvement> out;
  auto find = [&](bool leaders, bool ewt) -> const ScenarioResult* {
    for (const auto& s : scenarios)
      if (s.leaders == leaders && s.ewt == ewt) return &s;
    return nullptr;
  };
  auto add = [&](const std::string& factor, const std::string& held, const ScenarioResult* base, const ScenarioResult* cand) {
    if (!base || !cand) return;
    for (const auto& hm : base->horizons) {
      for (const char* metric : {"mape", "rmse", "rmsre"}) {
        Improvement im{factor, held, base->label, cand->label, hm.horizon, metric,
                       metric_value(hm, metric), metric_value(cand->at(hm.horizon), metric), 0.0};
        if (!(im.baseline_value > 0)) {
          warnings.push_back("improvement " + factor + " h=" + std::to_string(hm.horizon) + " " + metric +
                             " skipped: baseline metric is zero");
          continue;
        }
        im.improvement_pct = improvement_pct(im.baseline_value, im.candidate_value);
        out.push_back(std::move(im));
      }
    }
  };
  for (bool leaders : {true, false}) add("ewt", leaders ? "leaders=on" : "leaders=off", find(leaders, false), find(leaders, true));
  for (bool ewt : {true, false}) add("leaders", ewt ? "ewt=on" : "ewt=off", find(false, ewt), find(true, ewt));
  return out;
}

/// normalize -> leaders -> EWT -> windows -> (tune) -> train -> recursive
/// forecast -> de-normalize -> test-set evaluation -> report. Each grid cell
/// draws its randomness from derive_seed(master, cell label).
inline ForecastReport run_pipeline(const PipelineConfig& cfg, const Bundle& bundle) {
  staged("config", [&] { cfg.validate(); });
  ForecastReport rep;
  rep.seed = cfg.seed;
  rep.config = config_echo(cfg);
  const auto d = prepare(cfg, bundle);
  rep.warnings = bundle.warnings;
  rep.warnings.insert(rep.warnings.end(), d.warnings.begin(), d.warnings.end());
  rep.n_total = bundle.target.size();
  rep.n_train = d.n_train;
  rep.n_test = rep.n_total - rep.n_train;
  rep.first_test_period = csv::format_period(bundle.target.period_at(d.n_train), bundle.target.frequency());
  if (d.leaders) rep.leader_ids = d.leaders->winner.ids;

  std::vector<std::pair<bool, bool>> cells;
  if (cfg.scenario_grid) {
    for (bool leaders : {true, false})
      for (bool ewt : {true, false})
        if (!leaders || d.leaders_available) cells.emplace_back(leaders, ewt);
  } else {
    cells.emplace_back(cfg.use_leaders && d.leaders_available, cfg.use_ewt);
    if (cfg.use_leaders && !d.leaders_available) rep.warnings.push_back("leaders requested but unavailable; running without");
  }
  if (!d.boundaries && (cfg.use_ewt || cfg.scenario_grid))
    rep.warnings.push_back("EWT unavailable; ewt=on cells use the raw target");
  for (const auto& [leaders, ewt] : cells) rep.scenarios.push_back(run_scenario(cfg, bundle, d, leaders, ewt));
  rep.improvements = improvements_for(rep.scenarios, rep.warnings);
  return rep;
}

}  // namespace ewtf::pipeline
