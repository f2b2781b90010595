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

// ewtf: command-line front end for the forecasting pipeline.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ewtf/nn/checkpoint.hpp"
#include "ewtf/pipeline/report.hpp"
#include "ewtf/pipeline/synthetic.hpp"

namespace fs = std::filesystem;
using namespace ewtf;
using namespace ewtf::pipeline;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out = "out";
};

PipelineConfig load_cfg(const Globals& g) {
  auto cfg = g.config.empty() ? PipelineConfig{} : load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  return cfg;
}

std::string out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out);
  return (fs::path(g.out) / name).string();
}

bool on_off(const std::string& s, const char* what) {
  if (s == "on") return true;
  if (s == "off") return false;
  fail(ErrorCode::invalid_argument, std::string(what) + " must be 'on' or 'off'");
}

std::string join(const std::vector<std::string>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + v[i];
  return s;
}

std::string hex_list(const std::vector<double>& v) {
  std::vector<std::string> parts;
  for (double x : v) parts.push_back(nn::hexfloat(x));
  return join(parts, ' ');
}

ReportFormat parse_format(const std::string& s) {
  if (s == "text") return ReportFormat::text;
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  if (s == "all") return ReportFormat::all;
  fail(ErrorCode::invalid_argument, "format must be text, csv, json or all");
}

void print_written(const std::vector<std::string>& files) {
  for (const auto& f : files) std::cout << "wrote " << f << '\n';
}

// Checkpoint directory: config.ini plus member_<k>.ckpt, one per ensemble
// member. Each member carries the data fingerprint it was trained on so a
// forecast against different training data is refused.
struct Trained {
  PipelineConfig cfg;
  ScenarioResult scenario;
  std::size_t n_train = 0;
  std::map<std::string, std::string> meta;
};

std::map<std::string, std::string> fingerprint(const PreparedData& d, const ScenarioResult& r) {
  std::map<std::string, std::string> m;
  m["label"] = r.label;
  m["leaders"] = r.leaders ? "on" : "off";
  m["ewt"] = r.ewt ? "on" : "off";
  m["members"] = std::to_string(r.models.size());
  m["n_train"] = std::to_string(d.n_train);
  m["norm"] = hex_list({d.norm.x_min, d.norm.x_max, d.norm.x_low, d.norm.x_high});
  m["feature_columns"] = join(d.feature_columns, ';');
  if (r.ewt && d.boundaries) {
    m["ewt_maxima"] = hex_list(d.boundaries->omega_maxima);
    m["ewt_delta"] = hex_list(d.boundaries->delta);
    m["ewt_gamma"] = nn::hexfloat(d.boundaries->gamma_used);
  }
  return m;
}

void save_trained(const std::string& dir, const PipelineConfig& cfg, const PreparedData& d, const ScenarioResult& r) {
  fs::create_directories(dir);
  csv::write_text_file((fs::path(dir) / "config.ini").string(), config_to_ini(cfg));
  const auto meta = fingerprint(d, r);
  for (std::size_t k = 0; k < r.models.size(); ++k) {
    nn::Checkpoint ck{r.models[k], derive_seed(r.seed, "member" + std::to_string(k)), meta};
    ck.meta["member"] = std::to_string(k);
    ck.meta["best_epoch"] = std::to_string(r.best_epochs[k]);
    ck.meta["scenario_seed"] = std::to_string(r.seed);
    nn::save_checkpoint((fs::path(dir) / ("member_" + std::to_string(k) + ".ckpt")).string(), ck);
  }
}

Trained load_trained(const std::string& dir) {
  Trained t;
  t.cfg = load_config((fs::path(dir) / "config.ini").string());
  for (std::size_t k = 0;; ++k) {
    const auto p = fs::path(dir) / ("member_" + std::to_string(k) + ".ckpt");
    if (!fs::exists(p)) break;
    auto ck = nn::load_checkpoint(p.string());
    if (k == 0) t.meta = ck.meta;
    t.scenario.models.push_back(std::move(ck.net));
  }
  require(!t.scenario.models.empty(), ErrorCode::io_error, dir + ": no member_0.ckpt found");
  auto get = [&](const char* key) {
    auto it = t.meta.find(key);
    require(it != t.meta.end(), ErrorCode::parse_error, dir + ": checkpoint lacks meta '" + std::string(key) + "'");
    return it->second;
  };
  require(std::to_string(t.scenario.models.size()) == get("members"), ErrorCode::io_error, dir + ": member files missing");
  t.scenario.label = get("label");
  t.scenario.leaders = get("leaders") == "on";
  t.scenario.ewt = get("ewt") == "on";
  t.scenario.seed = std::stoull(get("scenario_seed"));
  t.n_train = static_cast<std::size_t>(csv::parse_int(get("n_train"), dir));
  return t;
}

/// Re-derives the training-range statistics and checks them against the
/// checkpoint fingerprint.
PreparedData prepare_for(Trained& t, const Bundle& b) {
  const auto n = b.target.size();
  require(n > t.n_train, ErrorCode::alignment_error,
          "bundle has " + std::to_string(n) + " periods; the checkpoint trained on the first " + std::to_string(t.n_train));
  t.cfg.test_length = n - t.n_train;
  auto d = prepare(t.cfg, b);
  auto expect = fingerprint(d, t.scenario);
  expect["members"] = t.meta.at("members");
  for (const auto& [k, v] : expect)
    require(t.meta.count(k) && t.meta.at(k) == v, ErrorCode::alignment_error,
            "checkpoint does not match this bundle's training range (" + k + " differs)");
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Social-signal and EWT-augmented LSTM forecasting"};
  app.set_version_flag("--version", std::string(EWTF_VERSION));
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed (overrides the config)");
  app.add_option("--config", g.config, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  // simulate
  SyntheticSpec sim;
  bool no_social = false;
  std::vector<std::string> tones;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic bundle");
  simulate->add_option("--length", sim.length)->capture_default_str();
  simulate->add_option("--level", sim.level)->capture_default_str();
  simulate->add_option("--seasonal-amplitude", sim.seasonal_amplitude)->capture_default_str();
  simulate->add_option("--seasonal-period", sim.seasonal_period)->capture_default_str();
  simulate->add_option("--trend-slope", sim.trend_slope)->capture_default_str();
  simulate->add_option("--cycle-amplitude", sim.cycle_amplitude)->capture_default_str();
  simulate->add_option("--cycle-period", sim.cycle_period)->capture_default_str();
  simulate->add_option("--noise", sim.noise_sd, "Noise standard deviation")->capture_default_str();
  simulate->add_option("--tone", tones, "Extra tone amplitude:frequency:phase (cycles per sample)");
  simulate->add_option("--graph-size", sim.graph_size)->capture_default_str();
  simulate->add_option("--clusters", sim.clusters)->capture_default_str();
  simulate->add_option("--coalition", sim.coalition_size)->capture_default_str();
  simulate->add_option("--platforms", sim.platforms)->capture_default_str();
  simulate->add_option("--leader-signal", sim.leader_signal)->capture_default_str();
  simulate->add_flag("--no-social", no_social, "Target series only");

  // decompose
  std::string series_path;
  auto* decompose = app.add_subcommand("decompose", "EWT components of a target series");
  decompose->add_option("input", series_path, "target.csv or a bundle directory")->required()->check(CLI::ExistingPath);

  // shared bundle-based options
  std::string bundle_dir, ckpt_dir, leaders_flag = "on", ewt_flag = "on", format = "all", report_in;
  std::size_t horizon = 3, budget = 0;
  auto bundle_opt = [&](CLI::App* sc) { sc->add_option("--bundle", bundle_dir, "Bundle directory")->required()->check(CLI::ExistingDirectory); };
  auto cell_opts = [&](CLI::App* sc) {
    sc->add_option("--leaders", leaders_flag, "on|off")->capture_default_str();
    sc->add_option("--ewt", ewt_flag, "on|off")->capture_default_str();
  };

  auto* detect = app.add_subcommand("detect-leaders", "Detect the opinion-leader coalition");
  bundle_opt(detect);

  auto* tune = app.add_subcommand("tune", "Bayesian hyperparameter search for one grid cell");
  bundle_opt(tune);
  cell_opts(tune);
  tune->add_option("--budget", budget, "Evaluations (overrides bo.budget)");

  auto* train = app.add_subcommand("train", "Train one grid cell and save a checkpoint directory");
  bundle_opt(train);
  cell_opts(train);

  auto* forecast = app.add_subcommand("forecast", "Forecast past the end of the bundle");
  bundle_opt(forecast);
  forecast->add_option("--checkpoint", ckpt_dir)->required()->check(CLI::ExistingDirectory);
  forecast->add_option("--horizon", horizon)->capture_default_str()->check(CLI::PositiveNumber);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a checkpoint on the test range");
  bundle_opt(evaluate_cmd);
  evaluate_cmd->add_option("--checkpoint", ckpt_dir)->required()->check(CLI::ExistingDirectory);

  auto* report = app.add_subcommand("report", "Render a saved report.json");
  report->add_option("input", report_in, "report.json")->required()->check(CLI::ExistingFile);
  report->add_option("--format", format, "text|csv|json|all")->capture_default_str();

  auto* run = app.add_subcommand("run", "Full pipeline over the scenario grid");
  bundle_opt(run);
  run->add_option("--format", format, "text|csv|json|all")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      sim.with_social = !no_social;
      for (const auto& t : tones) {
        const auto parts = csv::split_fields(t, ':');
        require(parts.size() == 3, ErrorCode::invalid_argument, "--tone expects amplitude:frequency:phase");
        sim.tones.push_back({csv::parse_double(parts[0], "--tone"), csv::parse_double(parts[1], "--tone"),
                             csv::parse_double(parts[2], "--tone")});
      }
      const auto seed = g.seed.value_or(PipelineConfig{}.seed);
      const auto syn = generate_synthetic(sim, seed);
      save_bundle(g.out, syn.bundle);
      std::ostringstream clean;
      csv::write_series(clean, syn.bundle.target.with_values(syn.clean));
      csv::write_text_file(out_path(g, "clean.csv"), clean.str());
      if (!syn.planted_ids.empty()) csv::write_text_file(out_path(g, "planted.txt"), join(syn.planted_ids, '\n') + "\n");
      std::cout << "synthetic bundle (" << sim.length << " periods, seed " << seed << ") written to " << g.out << '\n';
    } else if (*decompose) {
      const auto cfg = load_cfg(g);
      const auto target = fs::is_directory(series_path) ? load_bundle(series_path).target : csv::read_series_file(series_path);
      const auto b = fit_boundaries(target.values(), cfg);
      const auto d = ewt::decompose_with(target.values(), b);
      std::ostringstream o;
      o << "period";
      for (std::size_t k = 0; k < d.components.size(); ++k) o << ",component_" << k;
      o << '\n';
      for (std::size_t t = 0; t < target.size(); ++t) {
        o << csv::format_period(target.period_at(t), target.frequency());
        for (const auto& c : d.components) o << ',' << csv::format_double(c[t]);
        o << '\n';
      }
      csv::write_text_file(out_path(g, "components.csv"), o.str());
      std::ostringstream bo;
      bo << "kind,value\n";
      for (double w : b.omega_maxima) bo << "maximum," << csv::format_double(w) << '\n';
      for (double w : b.delta) bo << "boundary," << csv::format_double(w) << '\n';
      bo << "gamma," << csv::format_double(b.gamma_used) << '\n';
      csv::write_text_file(out_path(g, "boundaries.csv"), bo.str());
      std::cout << d.components.size() << " components written to " << out_path(g, "components.csv") << '\n';
    } else if (*detect) {
      const auto cfg = load_cfg(g);
      const auto b = load_bundle(bundle_dir);
      require(b.graph.has_value(), ErrorCode::io_error, bundle_dir + ": nodes.csv/edges.csv required");
      auto search = cfg.search;
      search.seed = derive_seed(cfg.seed, "leaders");
      const auto det = game::detect_leaders(*b.graph, cfg.trust, cfg.characteristic, cfg.game, cfg.synergy, search);
      const auto w = game::assign_weights(*b.graph, det.trust.adjacency, det.winner, cfg.decay_kappa, cfg.max_hops);
      std::ostringstream o;
      o << "id,leader,hops,weight\n";
      for (std::size_t i = 0; i < b.graph->size(); ++i)
        o << b.graph->node(i).id << ',' << (w.leader[i] ? 1 : 0) << ',' << w.hops[i] << ',' << csv::format_double(w.weight[i])
          << '\n';
      csv::write_text_file(out_path(g, "leaders.csv"), o.str());
      std::cout << "leaders: " << join(det.winner.ids, ' ') << "  (phi " << csv::format_double(det.winner.phi) << ")\n";
      for (const auto& msg : det.warnings) std::cerr << "warning: " << msg << '\n';
    } else if (*tune) {
      auto cfg = load_cfg(g);
      if (budget > 0) cfg.bo.budget = budget;
      const auto b = load_bundle(bundle_dir);
      const auto d = prepare(cfg, b);
      const bool leaders = on_off(leaders_flag, "--leaders"), use_ewt = on_off(ewt_flag, "--ewt");
      require(!leaders || d.leaders_available, ErrorCode::invalid_argument, "leader weighting unavailable for this bundle");
      const auto label = scenario_label(leaders, use_ewt);
      const auto hist = tune_scenario(cfg, scenario_windows(cfg, d, leaders, use_ewt), derive_seed(cfg.seed, label));
      const auto space = hpo::SearchSpace::lstm_default();
      std::ostringstream o;
      o << "evaluation";
      for (const auto& dim : space.dims) o << ',' << dim.name;
      o << ",loss,incumbent,proposed\n";
      for (std::size_t i = 0; i < hist.points.size(); ++i) {
        o << i + 1;
        for (const auto& v : hist.points[i]) o << ',' << hpo::format_value(v);
        o << ',' << csv::format_double(hist.losses[i]) << ',' << csv::format_double(hist.incumbent[i]) << ','
          << int(hist.proposed[i]) << '\n';
      }
      for (const auto& note : hist.notes) std::cerr << "warning: " << note << '\n';
      csv::write_text_file(out_path(g, "bo_history.csv"), o.str());
      apply_point(hist.best_point(), space, cfg.network, cfg.training);
      cfg.bo.budget = 0;
      cfg.bo.init = 0;
      csv::write_text_file(out_path(g, "tuned.ini"), config_to_ini(cfg));
      std::cout << "best cv loss " << csv::format_double(hist.best_loss()) << " after " << hist.points.size()
                << " evaluations; tuned config in " << out_path(g, "tuned.ini") << '\n';
    } else if (*train) {
      const auto cfg = load_cfg(g);
      const auto b = load_bundle(bundle_dir);
      const auto d = prepare(cfg, b);
      const bool leaders = on_off(leaders_flag, "--leaders"), use_ewt = on_off(ewt_flag, "--ewt");
      require(!leaders || d.leaders_available, ErrorCode::invalid_argument, "leader weighting unavailable for this bundle");
      const auto r = train_scenario(cfg, d, leaders, use_ewt);
      const auto dir = (fs::path(g.out) / "checkpoint").string();
      save_trained(dir, cfg, d, r);
      std::cout << "trained " << r.label << " (" << r.models.size() << " member(s), input width " << r.input_width
                << ") -> " << dir << '\n';
    } else if (*forecast) {
      auto t = load_trained(ckpt_dir);
      const auto b = load_bundle(bundle_dir);
      const auto d = prepare_for(t, b);
      const auto plan = plan_for(t.cfg, d, t.scenario.ewt);
      const auto& rows = t.scenario.leaders ? d.weighted : d.features;
      const auto path = forecast_recursive(d.x, rows, d.x.size() - 1, horizon, plan, t.scenario.models,
                                           t.cfg.assembly == Assembly::decompose_ensemble);
      const auto values = denormalize_values(path, d.norm);
      std::ostringstream o;
      o << "period,horizon,forecast\n";
      for (std::size_t h = 0; h < values.size(); ++h)
        o << csv::format_period(b.target.period_at(b.target.size() + h), b.target.frequency()) << ',' << h + 1 << ','
          << csv::format_double(values[h]) << '\n';
      csv::write_text_file(out_path(g, "forecast.csv"), o.str());
      std::cout << o.str();
    } else if (*evaluate_cmd) {
      auto t = load_trained(ckpt_dir);
      const auto b = load_bundle(bundle_dir);
      const auto d = prepare_for(t, b);
      evaluate_scenario(t.cfg, b, d, t.scenario);
      ForecastReport rep;
      rep.seed = t.cfg.seed;
      rep.config = config_echo(t.cfg);
      rep.n_total = b.target.size();
      rep.n_train = d.n_train;
      rep.n_test = rep.n_total - rep.n_train;
      rep.first_test_period = csv::format_period(b.target.period_at(d.n_train), b.target.frequency());
      rep.scenarios.push_back(std::move(t.scenario));
      print_written(emit_report(rep, g.out));
    } else if (*report) {
      std::ifstream in(report_in);
      nlohmann::ordered_json j;
      try {
        j = nlohmann::ordered_json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::parse_error, report_in + ": " + e.what());
      }
      print_written(emit_report(report_from_json(j), g.out, parse_format(format)));
    } else if (*run) {
      const auto cfg = load_cfg(g);
      const auto b = load_bundle(bundle_dir);
      const auto rep = run_pipeline(cfg, b);
      print_written(emit_report(rep, g.out, parse_format(format)));
      for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "ewtf: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ewtf: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
