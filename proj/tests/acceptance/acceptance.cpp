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

// Acceptance harness: one PASS/FAIL line per criterion, each with its
// runtime and time budget. Exit status is the number of failures.
//
//   acceptance [--only 1,4,9] [--cli <path to ewtf>] [--work <dir>]

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "ewtf/game/leaders.hpp"
#include "ewtf/hpo/bo.hpp"
#include "ewtf/nn/train.hpp"
#include "ewtf/pipeline/report.hpp"
#include "ewtf/pipeline/synthetic.hpp"
#include "support/oracles.hpp"

using namespace ewtf;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fixed(double v, int d = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", d, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::vector<double> tone(std::size_t n, double omega, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = amp * std::cos(omega * static_cast<double>(t) + phase);
  return x;
}

// ---------------------------------------------------------------- 1

Outcome improvement_formula() {
  // Relative improvement (B - A) / B * 100, rounded half-up to 2 decimals.
  const std::vector<std::array<double, 2>> pairs{{0.0048, 0.0044}, {0.0052, 0.0047}, {0.0055, 0.0051}};
  const std::vector<std::string> expected{"8.33", "9.62", "7.27"};
  Outcome o{true, ""};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto cell = pipeline::improvement_cell(pairs[k][0], pairs[k][1]);
    o.pass = o.pass && cell == expected[k];
    o.detail += (k ? ", " : "") + cell;
  }
  o.detail += " (expected 8.33, 9.62, 7.27)";
  return o;
}

// ---------------------------------------------------------------- 2

Outcome ewt_tight_frame() {
  double worst_pou = 0.0;
  Rng rng(derive_seed(2, "boundaries"));
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + uniform_index(rng, 6);
    std::set<double> maxima;
    while (maxima.size() < m) maxima.insert(uniform(rng, 0.02, pi - 0.02));
    const auto b = ewt::compute_boundaries(std::vector<double>(maxima.begin(), maxima.end()), ewt::EwtConfig{});
    for (int i = 0; i < 10000; ++i) {
      const double w = pi * i / 9999.0;
      double sum = std::pow(ewt::scaling_response(b, w), 2);
      for (std::size_t j = 0; j + 1 < b.num_components(); ++j) sum += std::pow(ewt::wavelet_response(b, j, w), 2);
      worst_pou = std::max(worst_pou, std::abs(sum - 1.0));
    }
  }
  double worst_rec = 0.0;
  Rng srng(derive_seed(2, "signals"));
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(512, 0.0);
    const std::size_t tones = 2 + uniform_index(srng, 4);
    for (std::size_t k = 0; k < tones; ++k) {
      const auto t = tone(512, uniform(srng, 0.05, 3.0), uniform(srng, 0.2, 2.0), uniform(srng, 0, 2 * pi));
      for (std::size_t i = 0; i < 512; ++i) x[i] += t[i];
    }
    const auto d = ewt::decompose(x, ewt::EwtConfig{});
    worst_rec = std::max(worst_rec, test_oracles::relative_l2(ewt::reconstruct(d), x));
  }
  return {worst_pou < 1e-10 && worst_rec < 1e-6,
          "max |sum - 1| = " + sci(worst_pou) + " (< 1e-10), max reconstruction error = " + sci(worst_rec) + " (< 1e-6)"};
}

// ---------------------------------------------------------------- 3

Outcome ewt_separation() {
  const auto a = tone(512, 0.2 * pi), b = tone(512, 0.6 * pi);
  std::vector<double> x(512);
  for (std::size_t i = 0; i < 512; ++i) x[i] = a[i] + b[i];
  ewt::EwtConfig cfg;
  cfg.num_components = 2;
  const auto d = ewt::decompose(x, cfg);
  if (d.components.size() != 2) return {false, "expected 2 components"};
  const double ca = test_oracles::correlation(d.components[0], a), cb = test_oracles::correlation(d.components[1], b);
  return {ca > 0.99 && cb > 0.99, "correlations " + fixed(ca, 6) + ", " + fixed(cb, 6) + " (> 0.99)"};
}

// ---------------------------------------------------------------- 4

// v(S): members of S with at least x neighbours inside S, from an adjacency
// matrix.
double coalition_value(const std::vector<std::vector<char>>& adj, const std::vector<char>& in, std::size_t x) {
  double v = 0;
  for (std::size_t i = 0; i < adj.size(); ++i) {
    if (!in[i]) continue;
    std::size_t k = 0;
    for (std::size_t j = 0; j < adj.size(); ++j) k += in[j] && adj[i][j];
    if (k >= x) v += 1;
  }
  return v;
}

std::vector<double> permutation_shapley(const std::vector<std::vector<char>>& adj, std::size_t x) {
  const std::size_t n = adj.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<double> sp(n, 0.0);
  double count = 0;
  do {
    std::vector<char> in(n, 0);
    double before = 0;
    for (auto v : perm) {
      in[v] = 1;
      const double after = coalition_value(adj, in, x);
      sp[v] += after - before;
      before = after;
    }
    count += 1;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (auto& s : sp) s /= count;
  return sp;
}

Outcome shapley_oracle() {
  Rng rng(derive_seed(4, "graphs"));
  double worst = 0.0, worst_eff = 0.0, worst_mc = 0.0;
  auto random_graph = [&](std::size_t n, double p, std::vector<std::vector<char>>& adj) {
    graph::UndirectedGraph g(n);
    adj.assign(n, std::vector<char>(n, 0));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (uniform01(rng) < p) {
          g.add_edge(a, b);
          adj[a][b] = adj[b][a] = 1;
        }
    return g;
  };
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 5);
    std::vector<std::vector<char>> adj;
    const auto g = random_graph(n, uniform(rng, 0.3, 0.8), adj);
    for (std::size_t x : {1u, 2u}) {
      const auto exact = game::shapley_exact(g, game::CharacteristicFn{x});
      const auto brute = permutation_shapley(adj, x);
      double total = 0;
      for (std::size_t v = 0; v < n; ++v) {
        worst = std::max(worst, std::abs(exact.sp[v] - brute[v]));
        total += exact.sp[v];
      }
      worst_eff = std::max(worst_eff, std::abs(total - coalition_value(adj, std::vector<char>(n, 1), x)));
    }
  }
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = 6 + uniform_index(rng, 3);
    std::vector<std::vector<char>> adj;
    const auto g = random_graph(n, 0.5, adj);
    const std::size_t x = 1 + uniform_index(rng, 2);
    const auto exact = game::shapley_exact(g, game::CharacteristicFn{x});
    const auto mc = game::shapley_monte_carlo(g, game::CharacteristicFn{x}, 50000, derive_seed(4, trial));
    for (std::size_t v = 0; v < n; ++v) worst_mc = std::max(worst_mc, std::abs(mc.sp[v] - exact.sp[v]));
  }
  return {worst < 1e-9 && worst_eff < 1e-9 && worst_mc < 0.02,
          "max |subset - permutation| = " + sci(worst) + ", max efficiency gap = " + sci(worst_eff) +
              ", max MC error = " + fixed(worst_mc, 4) + " (< 0.02)"};
}

// ---------------------------------------------------------------- 5

Outcome payoff_properties() {
  Rng rng(derive_seed(5, "draws"));
  std::size_t failures = 0, s3_bit_exact = 0, s3_cells = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    game::GameParams p;
    p.x_pay = uniform(rng, 0.1, 5);
    p.y_pay = uniform(rng, 0.1, 5);
    p.i_pay = uniform(rng, 0.1, 5);
    p.d = uniform(rng, 0.05, 4);
    p.u_a = uniform(rng, 0.01, 0.99);
    p.u_b = uniform(rng, 0.01, 0.99);
    for (auto sol : {game::Solution::s1, game::Solution::s2, game::Solution::s3, game::Solution::s4}) {
      const auto m = game::payoff_matrices(sol, p);
      const std::size_t k = m.m_a.size();
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
          failures += m.m_b[a][b] != m.m_a[b][a];
          const double sum = m.m_a[a][b] + m.m_b[a][b];
          if (sol == game::Solution::s1 || sol == game::Solution::s2) failures += sum != 0.0;
          if (sol == game::Solution::s3) {
            // Each entry is (zero-sum part) + 1/d per agreeing player; the two
            // roundings of that addition are the only permitted slack.
            const double agreements = (a == 2) + (b == 2);
            const double slack = 2 * std::numeric_limits<double>::epsilon() * (std::abs(m.m_a[a][b]) + std::abs(m.m_b[a][b]));
            const double gap = std::abs(sum - 2.0 / *p.d * agreements);
            failures += gap > slack;
            s3_bit_exact += gap == 0.0;
            ++s3_cells;
          }
        }
    }
    auto q = p;
    q.u_b = q.u_a;
    const auto s4 = game::payoff_matrices(game::Solution::s4, q);
    for (std::size_t a = 0; a < 2; ++a) failures += s4.m_a[a][a] != 0.0 || s4.m_b[a][a] != 0.0;
  }
  return {failures == 0, std::to_string(failures) + " property violations over 1000 draws x 4 solutions (S3 sum rule bit-exact in " +
                             std::to_string(s3_bit_exact) + "/" + std::to_string(s3_cells) + " cells, rest within 2 roundings)"};
}

// ---------------------------------------------------------------- 6

Outcome opinion_dynamics() {
  Rng rng(derive_seed(6, "draws"));
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double mu = uniform(rng, 0.01, 0.49), eta = uniform(rng, 0.01, 0.49);
    const auto steps = 1 + static_cast<int>(uniform_index(rng, 50));
    double ea = uniform(rng, -1, 1), eb = uniform(rng, -1, 1);
    const double gap0 = eb - ea;
    for (int t = 0; t < steps; ++t) std::tie(ea, eb) = game::opinion_step(ea, eb, mu, eta);
    const double expect = std::pow(1 + eta - mu, steps) * gap0;
    worst = std::max(worst, std::abs((eb - ea) - expect) / std::max(1.0, std::abs(expect)));
  }
  return {worst < 1e-12, "max scaled deviation = " + sci(worst) + " (< 1e-12)"};
}

// ---------------------------------------------------------------- 7

double gradient_error(const nn::NetworkSpec& spec, std::uint64_t seed, bool with_masks) {
  Rng rng(seed);
  auto net = nn::init_network(spec, seed);
  for (auto& p : net.params) p += uniform(rng, -0.3, 0.3);
  std::vector<nn::Mat> windows(6, nn::Mat(static_cast<Eigen::Index>(spec.window_length), static_cast<Eigen::Index>(spec.input_dim)));
  for (auto& w : windows)
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = uniform(rng, -1, 1);
  std::vector<double> y(windows.size());
  for (auto& v : y) v = uniform(rng, -1, 1);
  const auto x = nn::to_sequence(windows);
  nn::DropoutMasks masks;
  if (with_masks) masks = nn::sample_masks(spec, spec.window_length, windows.size(), rng);
  const double l2 = 1e-3;
  const auto analytic = nn::loss_and_gradient(net, x, y, l2, &masks);
  double worst = 0.0;
  const double eps = 1e-5;
  for (std::size_t k = 0; k < net.params.size(); ++k) {
    auto plus = net, minus = net;
    plus.params[k] += eps;
    minus.params[k] -= eps;
    const double numeric =
        (nn::loss_and_gradient(plus, x, y, l2, &masks).loss - nn::loss_and_gradient(minus, x, y, l2, &masks).loss) / (2 * eps);
    const double denom = std::max({std::abs(numeric), std::abs(analytic.gradient[k]), 1e-4});
    worst = std::max(worst, std::abs(numeric - analytic.gradient[k]) / denom);
  }
  return worst;
}

Outcome gradient_check() {
  double worst = 0.0;
  std::string detail;
  for (auto mode : {nn::LstmMode::bilstm, nn::LstmMode::lstm}) {
    nn::NetworkSpec spec;
    spec.mode = mode;
    spec.units = 3;
    spec.num_layers = 2;
    spec.window_length = 4;
    spec.input_dim = 2;
    spec.dropout = 0.2;
    const double e = std::max(gradient_error(spec, 71, false), gradient_error(spec, 72, true));
    worst = std::max(worst, e);
    detail += std::string(detail.empty() ? "" : ", ") + nn::to_string(mode) + " " + sci(e);
  }
  return {worst < 1e-5, "max relative error " + detail + " (< 1e-5)"};
}

// ---------------------------------------------------------------- 8

Outcome learnability() {
  pipeline::SyntheticSpec s;
  s.with_social = false;
  s.length = 120;
  s.level = 100;
  s.seasonal_amplitude = 10;
  s.seasonal_period = 12;
  s.trend_slope = 0.5;
  s.noise_sd = 1.0;  // 1% of the level
  const auto syn = pipeline::generate_synthetic(s, 8);
  pipeline::PipelineConfig cfg;
  cfg.scenario_grid = false;
  cfg.use_ewt = true;
  cfg.test_length = 12;
  const auto rep = pipeline::run_pipeline(cfg, syn.bundle);
  const auto& sc = rep.scenarios.at(0);
  bool pass = sc.ewt && sc.components >= 2;
  std::string detail = sc.label + ", " + std::to_string(sc.components) + " components, 12-point MAPE";
  for (const auto& h : sc.horizons) {
    pass = pass && h.n == 12 && h.mape < 3.0;
    detail += " h" + std::to_string(h.horizon) + "=" + fixed(h.mape, 2) + "%";
  }
  return {pass, detail + " (all < 3%)"};
}

// ---------------------------------------------------------------- 9

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Ridge autoregression on a seasonal series: the loss is the mean
// rolling-origin validation MSE as a function of (penalty, number of lags).
struct RidgeArTask {
  std::vector<double> y;
  static constexpr std::size_t max_lags = 24;

  explicit RidgeArTask(std::uint64_t seed) {
    pipeline::SyntheticSpec s;
    s.with_social = false;
    s.length = 180;
    s.cycle_amplitude = 4;
    s.noise_sd = 1.5;
    const auto syn = pipeline::generate_synthetic(s, seed);
    y.assign(syn.bundle.target.values().begin(), syn.bundle.target.values().end());
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double a = *lo, b = *hi;
    for (auto& v : y) v = (v - a) / (b - a);
  }

  double loss(double alpha, std::size_t lags) const {
    const std::size_t n = y.size() - max_lags;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(lags + 1));
    Eigen::VectorXd t(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t at = i + max_lags;
      X(static_cast<Eigen::Index>(i), 0) = 1.0;
      for (std::size_t l = 1; l <= lags; ++l) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = y[at - l];
      t(static_cast<Eigen::Index>(i)) = y[at];
    }
    double total = 0.0;
    const auto folds = pipeline::rolling_origin_folds(n, 3, n / 2);
    for (const auto& f : folds) {
      const auto tr = static_cast<Eigen::Index>(f.train_end), va = static_cast<Eigen::Index>(f.val_end - f.train_end);
      const auto Xt = X.topRows(tr);
      Eigen::MatrixXd A = Xt.transpose() * Xt;
      A.diagonal().array() += alpha;
      const Eigen::VectorXd beta = A.ldlt().solve(Xt.transpose() * t.head(tr));
      const Eigen::VectorXd r = X.middleRows(tr, va) * beta - t.segment(tr, va);
      total += r.squaredNorm() / static_cast<double>(va);
    }
    return total / static_cast<double>(folds.size());
  }
};

Outcome bo_sanity_and_superiority() {
  hpo::SearchSpace line{{{"x", hpo::DimKind::real_linear, 0.0, 1.0, {}}}};
  auto quad = [](const hpo::Point& p) { return std::pow(hpo::as_number(p[0]) - 0.37, 2); };
  const auto h = hpo::run_bo(quad, line, 20, hpo::default_init_design(20), 9);
  const double err = std::abs(hpo::as_number(h.best_point()[0]) - 0.37);

  hpo::SearchSpace box{{{"alpha", hpo::DimKind::real_log, 1e-6, 1e2, {}}, {"lags", hpo::DimKind::integer_linear, 1, 24, {}}}};
  std::vector<double> bo_best, rs_best;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RidgeArTask task(seed);
    auto objective = [&](const hpo::Point& p) {
      return task.loss(hpo::as_number(p[0]), static_cast<std::size_t>(std::get<std::int64_t>(p[1])));
    };
    bo_best.push_back(hpo::run_bo(objective, box, 30, hpo::default_init_design(30), derive_seed(seed, "bo")).best_loss());
    rs_best.push_back(hpo::random_search(objective, box, 30, derive_seed(seed, "random")).best_loss());
  }
  std::size_t ties_or_wins = 0;
  for (std::size_t k = 0; k < bo_best.size(); ++k) ties_or_wins += bo_best[k] <= rs_best[k];
  const double mb = median(bo_best), mr = median(rs_best);
  return {err < 1e-2 && mb <= mr, "quadratic |x* - 0.37| = " + sci(err) + " in 20 evaluations; ridge-AR median best CV loss BO " +
                                      sci(mb) + " vs random " + sci(mr) + " (BO <= random on " +
                                      std::to_string(ties_or_wins) + "/10 seeds)"};
}

// ---------------------------------------------------------------- 10

Outcome planted_leaders() {
  int rmse_wins = 0, recovered = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto syn = pipeline::generate_synthetic(pipeline::SyntheticSpec{}, seed);
    pipeline::PipelineConfig cfg;
    cfg.seed = seed;
    cfg.horizons = {1};
    const auto rep = pipeline::run_pipeline(cfg, syn.bundle);
    bool win = true;
    for (bool ewt : {true, false}) {
      const double on = rep.scenario(pipeline::scenario_label(true, ewt)).at(1).rmse;
      const double off = rep.scenario(pipeline::scenario_label(false, ewt)).at(1).rmse;
      win = win && on < off;
    }
    rmse_wins += win;
    std::size_t hits = 0;
    for (const auto& id : syn.planted_ids) hits += std::count(rep.leader_ids.begin(), rep.leader_ids.end(), id);
    recovered += hits >= 2;
    detail += (seed > 1 ? " " : "") + std::to_string(hits) + "/3";
  }
  return {rmse_wins >= 8 && recovered >= 8, "leaders-on lower RMSE (EWT on and off) in " + std::to_string(rmse_wins) +
                                                "/10 seeds; >= 2/3 planted recovered in " + std::to_string(recovered) +
                                                "/10 seeds [" + detail + "]"};
}

// ---------------------------------------------------------------- 11

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const std::string& cli, const fs::path& work) {
  std::string detail;
  bool pass = true;
  if (!cli.empty()) {
    fs::remove_all(work);
    fs::create_directories(work);
    const auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };
    const auto sh = [&](const std::string& args) { return std::system((q(cli) + " " + args + " > /dev/null 2>&1").c_str()); };
    int rc = sh("--seed 11 --out " + q(work / "bundle") + " simulate");
    rc |= sh("--out " + q(work / "run1") + " run --bundle " + q(work / "bundle"));
    rc |= sh("--out " + q(work / "run2") + " run --bundle " + q(work / "bundle"));
    bool same = rc == 0;
    for (const char* f : {"report.json", "report.txt", "metrics.csv", "improvements.csv", "forecasts.csv"}) {
      const auto a = slurp(work / "run1" / f);
      same = same && !a.empty() && a == slurp(work / "run2" / f);
    }
    pass = pass && same;
    detail += std::string("two CLI runs ") + (same ? "byte-identical" : "DIFFER");
  } else {
    detail += "CLI not supplied; library runs only";
  }

  const auto syn = pipeline::generate_synthetic(pipeline::SyntheticSpec{}, 11);
  const pipeline::PipelineConfig cfg;
  const auto a = pipeline::run_pipeline(cfg, syn.bundle);
  const auto b = pipeline::run_pipeline(cfg, syn.bundle);
  const bool lib_same = pipeline::report_json(a).dump(2) == pipeline::report_json(b).dump(2) &&
                        pipeline::report_text(a) == pipeline::report_text(b);
  pass = pass && lib_same;
  detail += std::string("; library reports ") + (lib_same ? "identical" : "DIFFER");

  // Poison every test-period target value and feature cell.
  auto poisoned = syn.bundle;
  std::vector<double> y(poisoned.target.values().begin(), poisoned.target.values().end());
  for (std::size_t t = a.n_train; t < y.size(); ++t) y[t] = 1e9;
  poisoned.target = poisoned.target.with_values(y);
  for (std::size_t t = a.n_train; t < y.size(); ++t)
    for (std::size_t c = 0; c < poisoned.features->width(); ++c) {
      const auto feat = pipeline::split_column(poisoned.features->columns[c]).second;
      poisoned.features->rows[t][c] = (feat == "avg_sentiment" || feat == "avg_polarity") ? 1.0 : 1e9;
    }
  const auto p = pipeline::run_pipeline(cfg, poisoned);
  bool params_same = p.scenarios.size() == a.scenarios.size() && p.leader_ids == a.leader_ids;
  std::size_t models = 0;
  for (std::size_t s = 0; params_same && s < a.scenarios.size(); ++s) {
    params_same = params_same && p.scenarios[s].models.size() == a.scenarios[s].models.size();
    for (std::size_t k = 0; params_same && k < a.scenarios[s].models.size(); ++k, ++models)
      params_same = p.scenarios[s].models[k].params == a.scenarios[s].models[k].params;
  }
  pass = pass && params_same;
  detail += "; poisoned test range " + std::string(params_same ? "leaves all " + std::to_string(models) + " trained models unchanged"
                                                               : "CHANGED trained parameters");
  return {pass, detail};
}

// ---------------------------------------------------------------- extra

Outcome ewt_direction() {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    pipeline::SyntheticSpec s;
    s.with_social = false;
    s.tones = {{6.0, 0.25, 0.3}, {4.0, 1.0 / 6.0, 1.1}};
    const auto syn = pipeline::generate_synthetic(s, seed);
    pipeline::PipelineConfig cfg;
    cfg.seed = seed;
    cfg.horizons = {1};
    const auto rep = pipeline::run_pipeline(cfg, syn.bundle);
    wins += rep.scenario(pipeline::scenario_label(false, true)).at(1).rmse <
            rep.scenario(pipeline::scenario_label(false, false)).at(1).rmse;
  }
  return {wins >= 8, "EWT-on lower test RMSE on multi-tone seasonal series in " + std::to_string(wins) + "/10 seeds (>= 8)"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  std::string cli;
  fs::path work = fs::temp_directory_path() / "ewtf_acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
    } else if (arg == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else if (arg == "--work" && i + 1 < argc) {
      work = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--only 1,2,...] [--cli <ewtf>] [--work <dir>]\n";
      return 64;
    }
  }

  struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "relative improvement formula", 1, improvement_formula},
      {2, "EWT tight frame and reconstruction", 10, ewt_tight_frame},
      {3, "EWT two-tone separation", 1, ewt_separation},
      {4, "Shapley oracle equivalence", 60, shapley_oracle},
      {5, "payoff matrix properties", 5, payoff_properties},
      {6, "opinion dynamics gap", 1, opinion_dynamics},
      {7, "BiLSTM gradient check", 30, gradient_check},
      {8, "learnability", 300, learnability},
      {9, "BO sanity and superiority", 900, bo_sanity_and_superiority},
      {10, "planted-leader direction", 1200, planted_leaders},
      {11, "determinism and test-set purity", 600, [&] { return determinism(cli, work); }},
      {12, "EWT direction invariant", 1200, ewt_direction},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s %2d %-36s %8.2f s / %6.0f s  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.title, secs, c.budget_s,
                o.detail.c_str(), in_time ? "" : " [over time budget]");
    std::fflush(stdout);
  }
  return failures;
}
