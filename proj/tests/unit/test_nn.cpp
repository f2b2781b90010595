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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ewtf/nn/checkpoint.hpp"
#include "ewtf/nn/train.hpp"

using Catch::Approx;
using namespace ewtf;
using namespace ewtf::nn;

namespace {

// Element-by-element LSTM cell written with plain loops.
void reference_cell(const DirWeights& w, const std::vector<double>& x, std::vector<double>& h, std::vector<double>& c) {
  const std::size_t H = static_cast<std::size_t>(w.w_recurrent.cols());
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  std::vector<double> z(4 * H);
  for (std::size_t r = 0; r < 4 * H; ++r) {
    double acc = w.bias(static_cast<Eigen::Index>(r));
    for (std::size_t k = 0; k < x.size(); ++k) acc += w.w_input(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) * x[k];
    for (std::size_t k = 0; k < H; ++k) acc += w.w_recurrent(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) * h[k];
    z[r] = acc;
  }
  for (std::size_t u = 0; u < H; ++u) {
    const double i = sig(z[u]), f = sig(z[H + u]), g = std::tanh(z[2 * H + u]), o = sig(z[3 * H + u]);
    c[u] = f * c[u] + i * g;
    h[u] = o * std::tanh(c[u]);
  }
}

DirWeights random_dir(Rng& rng, std::size_t in, std::size_t h, double scale = 0.8) {
  DirWeights w{Mat(4 * h, in), Mat(4 * h, h), Vec(4 * h)};
  for (Eigen::Index k = 0; k < w.w_input.size(); ++k) w.w_input.data()[k] = uniform(rng, -scale, scale);
  for (Eigen::Index k = 0; k < w.w_recurrent.size(); ++k) w.w_recurrent.data()[k] = uniform(rng, -scale, scale);
  for (Eigen::Index k = 0; k < w.bias.size(); ++k) w.bias(k) = uniform(rng, -scale, scale);
  return w;
}

std::vector<Mat> random_windows(Rng& rng, std::size_t count, std::size_t steps, std::size_t dim) {
  std::vector<Mat> out(count, Mat(steps, dim));
  for (auto& w : out)
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = uniform(rng, -1, 1);
  return out;
}

// Windows over a series: each window of `len` values predicts the next one.
void make_windows(const std::vector<double>& s, std::size_t len, std::vector<Mat>& x, std::vector<double>& y) {
  for (std::size_t t = len; t < s.size(); ++t) {
    Mat w(len, 1);
    for (std::size_t k = 0; k < len; ++k) w(k, 0) = s[t - len + k];
    x.push_back(w);
    y.push_back(s[t]);
  }
}

double grad_check(const NetworkSpec& spec, std::uint64_t seed, bool with_masks) {
  Rng rng(seed);
  Network net = init_network(spec, seed);
  for (auto& p : net.params) p += uniform(rng, -0.3, 0.3);  // move biases off their init values
  const auto windows = random_windows(rng, 5, spec.window_length, spec.input_dim);
  std::vector<double> y(5);
  for (auto& v : y) v = uniform(rng, -1, 1);
  const auto x = to_sequence(windows);
  DropoutMasks masks;
  if (with_masks) masks = sample_masks(spec, spec.window_length, 5, rng);
  const double l2 = 1e-3;
  const auto analytic = loss_and_gradient(net, x, y, l2, &masks);

  double worst = 0.0;
  const double eps = 1e-5;
  for (std::size_t k = 0; k < net.params.size(); ++k) {
    Network plus = net, minus = net;
    plus.params[k] += eps;
    minus.params[k] -= eps;
    const double fp = loss_and_gradient(plus, x, y, l2, &masks).loss;
    const double fm = loss_and_gradient(minus, x, y, l2, &masks).loss;
    const double numeric = (fp - fm) / (2 * eps);
    const double denom = std::max({std::abs(numeric), std::abs(analytic.gradient[k]), 1e-4});
    worst = std::max(worst, std::abs(numeric - analytic.gradient[k]) / denom);
  }
  return worst;
}

}  // namespace

TEST_CASE("LSTM cell") {
  SECTION("zero parameters give zero hidden state") {
    DirWeights w{Mat::Zero(12, 2), Mat::Zero(12, 3), Vec::Zero(12)};
    Mat x(2, 1);
    x << 3.0, -7.0;
    auto s = forward_cell(w, x, Mat::Zero(3, 1), Mat::Zero(3, 1));
    CHECK(s.h.cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("saturated forget gate carries the cell") {
    DirWeights w{Mat::Zero(8, 1), Mat::Zero(8, 2), Vec::Zero(8)};
    w.bias.segment(2, 2).setConstant(50.0);
    Mat c(2, 1);
    c << 0.7, -1.3;
    auto s = forward_cell(w, Mat::Ones(1, 1), Mat::Zero(2, 1), c);
    CHECK((s.c - c).cwiseAbs().maxCoeff() < 1e-9);
  }
  SECTION("matches the loop reference") {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t in = 1 + uniform_index(rng, 4), H = 1 + uniform_index(rng, 5);
      auto w = random_dir(rng, in, H);
      std::vector<double> x(in), h(H), c(H);
      for (auto& v : x) v = uniform(rng, -2, 2);
      for (auto& v : h) v = uniform(rng, -1, 1);
      for (auto& v : c) v = uniform(rng, -1, 1);
      Mat xm = Eigen::Map<Vec>(x.data(), static_cast<Eigen::Index>(in));
      Mat hm = Eigen::Map<Vec>(h.data(), static_cast<Eigen::Index>(H));
      Mat cm = Eigen::Map<Vec>(c.data(), static_cast<Eigen::Index>(H));
      auto s = forward_cell(w, xm, hm, cm);
      reference_cell(w, x, h, c);
      for (std::size_t u = 0; u < H; ++u) {
        CHECK(std::abs(s.h(static_cast<Eigen::Index>(u), 0) - h[u]) < 1e-12);
        CHECK(std::abs(s.c(static_cast<Eigen::Index>(u), 0) - c[u]) < 1e-12);
      }
    }
  }
  DirWeights w{Mat::Zero(8, 1), Mat::Zero(8, 2), Vec::Zero(8)};
  CHECK_THROWS_AS(forward_cell(w, Mat::Zero(3, 1), Mat::Zero(2, 1), Mat::Zero(2, 1)), Error);
}

TEST_CASE("bidirectional layer") {
  Rng rng(31);
  const std::size_t in = 3, H = 4, T = 6;
  std::vector<DirWeights> bi{random_dir(rng, in, H), random_dir(rng, in, H)};
  auto seq = to_sequence(random_windows(rng, 2, T, in));
  LayerCache cache;
  auto out = forward_bilayer(bi, seq, &cache);
  REQUIRE(out.size() == T);
  CHECK(out[0].rows() == 2 * H);
  auto uni = forward_bilayer({bi[0]}, seq);
  CHECK(uni[0].rows() == H);

  // Backward direction equals a forward pass over the reversed sequence.
  Sequence reversed(seq.rbegin(), seq.rend());
  DirCache fwd_on_reversed;
  run_direction(bi[1], reversed, false, fwd_on_reversed);
  for (std::size_t t = 0; t < T; ++t) CHECK(out[t].bottomRows(H) == fwd_on_reversed.steps[T - 1 - t].h);
  for (std::size_t t = 0; t < T; ++t) CHECK(out[t].topRows(H) == uni[t]);

  Sequence single{seq[0]};
  auto one = forward_bilayer({bi[0], bi[0]}, single);
  CHECK(one[0].topRows(H) == one[0].bottomRows(H));
}

TEST_CASE("stacked network") {
  Rng rng(5);
  NetworkSpec spec;
  spec.num_layers = 1;
  spec.units = 4;
  spec.input_dim = 2;
  spec.window_length = 5;
  auto net = init_network(spec, 3);
  auto windows = random_windows(rng, 4, 5, 2);
  auto seq = to_sequence(windows);
  auto p = forward_stacked(net, seq);
  auto u = unpack(net);
  auto layer = forward_bilayer(u.layers[0], seq);
  Eigen::RowVectorXd manual = (u.head_weight * layer.back()).array() + u.head_bias;
  CHECK((p - manual).cwiseAbs().maxCoeff() == 0.0);
  CHECK(parameter_layout(spec).back().name == "head.bias");
  CHECK(unpack(net).head_weight.size() == 8);
  spec.mode = LstmMode::lstm;
  CHECK(unpack(init_network(spec, 3)).head_weight.size() == 4);

  SECTION("zero dropout makes training and inference agree") {
    NetworkSpec s2 = spec;
    s2.num_layers = 3;
    s2.dropout = 0.0;
    auto n2 = init_network(s2, 8);
    auto masks = sample_masks(s2, 5, 4, rng);
    CHECK(masks.empty());
    CHECK(forward_stacked(n2, seq, &masks) == forward_stacked(n2, seq));
  }
  SECTION("inverted dropout is unbiased on average") {
    NetworkSpec s3;
    s3.num_layers = 2;
    s3.units = 8;
    s3.dropout = 0.1;
    s3.input_dim = 2;
    s3.window_length = 5;
    auto n3 = init_network(s3, 4);
    n3.params.back() = 0.5;  // head bias at a typical normalized level
    const auto det = forward_stacked(n3, seq);
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(det.size());
    Rng mrng(99);
    const int draws = 10000;
    for (int k = 0; k < draws; ++k) {
      auto masks = sample_masks(s3, 5, 4, mrng);
      mean += forward_stacked(n3, seq, &masks);
    }
    mean /= draws;
    for (Eigen::Index b = 0; b < det.size(); ++b) CHECK(std::abs(mean(b) - det(b)) <= 0.02 * std::abs(det(b)));
  }
}

TEST_CASE("loss function") {
  NetworkSpec spec;
  spec.units = 2;
  spec.num_layers = 1;
  auto net = init_network(spec, 1);
  std::vector<double> y{1.0, -1.0}, zero{0.0, 0.0};
  CHECK(loss(y, y, 0.0, net) == 0.0);
  CHECK(loss(zero, y, 0.0, net) == 1.0);
  double sq = 0.0;
  for (const auto& s : parameter_layout(spec))
    if (s.name.find("bias") == std::string::npos)
      for (std::size_t k = 0; k < s.size(); ++k) sq += net.params[s.offset + k] * net.params[s.offset + k];
  CHECK(loss(y, y, 0.3, net) == Approx(0.3 * sq).epsilon(1e-15));
  auto other = net;
  for (const auto& s : parameter_layout(spec))
    if (!s.penalized)
      for (std::size_t k = 0; k < s.size(); ++k) other.params[s.offset + k] += 5.0;
  CHECK(l2_term(other, 0.3) == l2_term(net, 0.3));
  std::vector<double> short_y{1.0};
  CHECK_THROWS_AS(loss(short_y, y, 0.0, net), Error);
}

TEST_CASE("analytic gradients match finite differences") {
  for (auto mode : {LstmMode::bilstm, LstmMode::lstm}) {
    for (std::size_t layers : {1u, 2u, 3u}) {
      NetworkSpec spec;
      spec.mode = mode;
      spec.num_layers = layers;
      spec.units = 3;
      spec.window_length = 4;
      spec.input_dim = 2;
      spec.dropout = 0.2;
      CHECK(grad_check(spec, 40 + layers, false) < 1e-5);
      CHECK(grad_check(spec, 50 + layers, true) < 1e-5);
    }
  }
}

TEST_CASE("training") {
  NetworkSpec spec;
  spec.num_layers = 1;
  spec.units = 4;
  spec.window_length = 6;
  spec.dropout = 0.0;
  TrainingConfig cfg;
  cfg.seed = 7;

  SECTION("constant target is learned quickly") {
    std::vector<double> s(80, 0.6);
    std::vector<Mat> x;
    std::vector<double> y;
    make_windows(s, spec.window_length, x, y);
    cfg.max_epochs = 50;
    auto m = train(x, y, spec, cfg);
    CHECK(m.val_loss[m.best_epoch - 1] < 1e-4);
  }
  SECTION("noiseless sine: loss decreases and runs are bitwise reproducible") {
    std::vector<double> s(120);
    for (std::size_t t = 0; t < s.size(); ++t) s[t] = 0.5 + 0.4 * std::sin(2 * std::numbers::pi * t / 12.0);
    NetworkSpec sp = spec;
    sp.window_length = 12;
    std::vector<Mat> x;
    std::vector<double> y;
    make_windows(s, sp.window_length, x, y);
    cfg.max_epochs = 60;
    cfg.learning_rate = 0.005;
    auto m = train(x, y, sp, cfg);
    REQUIRE(m.train_loss.size() >= 21);
    for (std::size_t e = 1; e <= 20; ++e) CHECK(m.train_loss[e] < m.train_loss[e - 1]);
    auto again = train(x, y, sp, cfg);
    CHECK(again.train_loss == m.train_loss);
    CHECK(again.net.params == m.net.params);
    CHECK(m.best_epoch <= m.train_loss.size());

    NetworkSpec drop = sp;
    drop.num_layers = 2;
    drop.dropout = 0.3;
    cfg.max_epochs = 10;
    cfg.patience = 5;
    auto d1 = train(x, y, drop, cfg);
    auto d2 = train(x, y, drop, cfg);
    CHECK(d1.train_loss == d2.train_loss);
  }
  SECTION("errors") {
    std::vector<Mat> x(10, Mat::Zero(6, 1));
    std::vector<double> y(10, 0.0);
    CHECK_THROWS_AS(train(x, y, spec, cfg), Error);
    try {
      train(x, y, spec, cfg);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::too_few_samples);
    }
    std::vector<double> s(100);
    for (std::size_t t = 0; t < s.size(); ++t) s[t] = std::sin(0.3 * t) * 1e200;
    std::vector<Mat> bx;
    std::vector<double> by;
    make_windows(s, spec.window_length, bx, by);
    try {
      train(bx, by, spec, cfg);
      FAIL("expected divergence");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::diverged_loss);
    }
  }
}

TEST_CASE("recursive multi-step prediction") {
  Rng rng(2);
  NetworkSpec spec;
  spec.units = 3;
  spec.input_dim = 2;
  spec.window_length = 5;
  auto net = init_network(spec, 9);
  auto w = random_windows(rng, 1, 5, 2)[0];
  auto p5 = predict_multi_step(net, w, 5);
  REQUIRE(p5.size() == 5);
  CHECK(p5[0] == predict_one(net, w));
  for (std::size_t k = 1; k < 5; ++k) {
    auto pk = predict_multi_step(net, w, k);
    CHECK(std::equal(pk.begin(), pk.end(), p5.begin()));
  }
  // A network that ignores its input is a fixed point of the recursion.
  auto flat = net;
  std::fill(flat.params.begin(), flat.params.end(), 0.0);
  flat.params.back() = 0.42;
  auto carry = predict_multi_step(flat, w, 3);
  CHECK(carry == std::vector<double>(3, 0.42));

  std::size_t calls = 0;
  predict_multi_step(net, w, 3, [&](Mat& win, double p, std::size_t) {
    ++calls;
    CHECK(win(4, 0) == p);
    CHECK(win(4, 1) == w(4, 1));
  });
  CHECK(calls == 2);
  CHECK_THROWS_AS(predict_multi_step(net, w, 0), Error);
}

TEST_CASE("checkpoint round trip is bit-exact") {
  NetworkSpec spec;
  spec.num_layers = 2;
  spec.units = 5;
  spec.input_dim = 3;
  spec.dropout = 0.137;
  Checkpoint ck{init_network(spec, 77), 77, {{"target.x_min", "12.5"}, {"note", "two words"}}};
  ck.net.params[3] = 1e-310;  // subnormal
  ck.net.params[4] = -0.0;
  std::ostringstream out;
  write_checkpoint(out, ck);
  std::istringstream in(out.str());
  auto back = read_checkpoint(in);
  CHECK(back.net.spec == spec);
  CHECK(back.seed == 77);
  CHECK(back.meta == ck.meta);
  REQUIRE(back.net.params.size() == ck.net.params.size());
  CHECK(std::memcmp(back.net.params.data(), ck.net.params.data(), ck.net.params.size() * sizeof(double)) == 0);

  std::ostringstream again;
  write_checkpoint(again, back);
  CHECK(again.str() == out.str());

  auto text = out.str();
  text.replace(text.find("l0.fwd.w_input"), 14, "l0.fwd.w_bogus");
  std::istringstream bad(text);
  CHECK_THROWS_AS(read_checkpoint(bad), Error);
  std::istringstream truncated(out.str().substr(0, out.str().size() / 2));
  CHECK_THROWS_AS(read_checkpoint(truncated), Error);
}
