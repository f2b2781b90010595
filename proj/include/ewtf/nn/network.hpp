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

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ewtf/core/error.hpp"
#include "ewtf/core/random.hpp"

namespace ewtf::nn {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class LstmMode { bilstm, lstm };

inline const char* to_string(LstmMode m) { return m == LstmMode::bilstm ? "bilstm" : "lstm"; }

inline LstmMode parse_mode(const std::string& s) {
  if (s == "bilstm") return LstmMode::bilstm;
  if (s == "lstm") return LstmMode::lstm;
  fail(ErrorCode::invalid_argument, "unknown network mode '" + s + "' (expected bilstm or lstm)");
}

struct NetworkSpec {
  std::size_t num_layers = 2;
  std::size_t units = 16;
  double dropout = 0.1;  // removal probability
  LstmMode mode = LstmMode::bilstm;
  std::size_t input_dim = 1;
  std::size_t window_length = 12;

  std::size_t directions() const { return mode == LstmMode::bilstm ? 2 : 1; }
  std::size_t output_width() const { return directions() * units; }

  void validate() const {
    require(num_layers >= 1 && units >= 1 && input_dim >= 1 && window_length >= 1, ErrorCode::invalid_argument,
            "network layers, units, input_dim and window_length must be >= 1");
    require(dropout >= 0.0 && dropout < 1.0, ErrorCode::invalid_argument, "dropout must lie in [0, 1)");
  }

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// A named tensor inside the flat parameter vector (row-major).
struct ParamSlot {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool penalized = true;  // weights yes, biases no

  std::size_t size() const { return rows * cols; }
};

inline std::vector<ParamSlot> parameter_layout(const NetworkSpec& spec) {
  spec.validate();
  std::vector<ParamSlot> slots;
  std::size_t offset = 0;
  auto add = [&](std::string name, std::size_t r, std::size_t c, bool pen) {
    slots.push_back({std::move(name), offset, r, c, pen});
    offset += r * c;
  };
  const std::size_t h = spec.units;
  for (std::size_t l = 0; l < spec.num_layers; ++l) {
    const std::size_t in = l == 0 ? spec.input_dim : spec.output_width();
    for (std::size_t d = 0; d < spec.directions(); ++d) {
      const std::string p = "l" + std::to_string(l) + (d == 0 ? ".fwd." : ".bwd.");
      add(p + "w_input", 4 * h, in, true);
      add(p + "w_recurrent", 4 * h, h, true);
      add(p + "bias", 4 * h, 1, false);
    }
  }
  add("head.weight", 1, spec.output_width(), true);
  add("head.bias", 1, 1, false);
  return slots;
}

inline std::size_t parameter_count(const NetworkSpec& spec) {
  const auto slots = parameter_layout(spec);
  return slots.back().offset + slots.back().size();
}

struct Network {
  NetworkSpec spec;
  std::vector<double> params;
};

/// Glorot-uniform weights, zero biases except forget gates at 1.
inline Network init_network(const NetworkSpec& spec, std::uint64_t seed) {
  Network net{spec, std::vector<double>(parameter_count(spec), 0.0)};
  Rng rng(derive_seed(seed, "init"));
  for (const auto& s : parameter_layout(spec)) {
    if (s.penalized) {
      const double limit = std::sqrt(6.0 / static_cast<double>(s.rows + s.cols));
      for (std::size_t k = 0; k < s.size(); ++k) net.params[s.offset + k] = uniform(rng, -limit, limit);
    } else if (s.rows == 4 * spec.units) {
      for (std::size_t k = spec.units; k < 2 * spec.units; ++k) net.params[s.offset + k] = 1.0;
    }
  }
  return net;
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct DirWeights {
  Mat w_input;      // 4H x in
  Mat w_recurrent;  // 4H x H
  Vec bias;         // 4H
};

struct Unpacked {
  std::vector<std::vector<DirWeights>> layers;  // [layer][direction]
  Eigen::RowVectorXd head_weight;
  double head_bias = 0.0;
};

inline Unpacked unpack(const Network& net) {
  const auto slots = parameter_layout(net.spec);
  require(net.params.size() == parameter_count(net.spec), ErrorCode::shape_mismatch, "parameter vector size mismatch");
  auto view = [&](const ParamSlot& s) {
    return Eigen::Map<const RowMat>(net.params.data() + s.offset, static_cast<Eigen::Index>(s.rows),
                                    static_cast<Eigen::Index>(s.cols));
  };
  Unpacked u;
  std::size_t k = 0;
  u.layers.resize(net.spec.num_layers);
  for (auto& layer : u.layers) {
    layer.resize(net.spec.directions());
    for (auto& d : layer) {
      d.w_input = view(slots[k++]);
      d.w_recurrent = view(slots[k++]);
      d.bias = view(slots[k++]);
    }
  }
  u.head_weight = view(slots[k++]);
  u.head_bias = net.params[slots[k].offset];
  return u;
}

/// One LSTM step for a batch (columns). Gate order: input, forget,
/// candidate, output.
struct CellState {
  Mat h;
  Mat c;
};

struct CellTrace {
  Mat i, f, g, o, c, tc, h;
};

inline CellTrace cell_step(const DirWeights& w, const Mat& x, const Mat& h_prev, const Mat& c_prev) {
  const Eigen::Index h = w.w_recurrent.cols();
  require(x.rows() == w.w_input.cols() && h_prev.rows() == h && c_prev.rows() == h && x.cols() == h_prev.cols(),
          ErrorCode::shape_mismatch, "LSTM cell input shapes do not match its weights");
  Mat z = w.w_input * x + w.w_recurrent * h_prev;
  z.colwise() += w.bias;
  CellTrace t;
  t.i = z.topRows(h).unaryExpr([](double v) { return sigmoid(v); });
  t.f = z.middleRows(h, h).unaryExpr([](double v) { return sigmoid(v); });
  t.g = z.middleRows(2 * h, h).array().tanh();
  t.o = z.bottomRows(h).unaryExpr([](double v) { return sigmoid(v); });
  t.c = t.f.cwiseProduct(c_prev) + t.i.cwiseProduct(t.g);
  t.tc = t.c.array().tanh();
  t.h = t.o.cwiseProduct(t.tc);
  return t;
}

inline CellState forward_cell(const DirWeights& w, const Mat& x, const Mat& h_prev, const Mat& c_prev) {
  auto t = cell_step(w, x, h_prev, c_prev);
  return {std::move(t.h), std::move(t.c)};
}

/// A batch of sequences: one (features x batch) matrix per time step.
using Sequence = std::vector<Mat>;

/// Turns windows (each steps x features) into a time-major batch.
inline Sequence to_sequence(const std::vector<Mat>& windows) {
  require(!windows.empty(), ErrorCode::invalid_argument, "empty window batch");
  const auto steps = windows[0].rows(), dim = windows[0].cols();
  Sequence seq(static_cast<std::size_t>(steps), Mat(dim, static_cast<Eigen::Index>(windows.size())));
  for (std::size_t b = 0; b < windows.size(); ++b) {
    require(windows[b].rows() == steps && windows[b].cols() == dim, ErrorCode::shape_mismatch,
            "windows must share one shape");
    for (Eigen::Index t = 0; t < steps; ++t) seq[static_cast<std::size_t>(t)].col(static_cast<Eigen::Index>(b)) =
        windows[b].row(t).transpose();
  }
  return seq;
}

struct DirCache {
  std::vector<CellTrace> steps;  // indexed by time position
  std::vector<Mat> h_prev, c_prev;
};

struct LayerCache {
  Sequence input;  // after dropout
  std::vector<DirCache> dirs;
  Sequence output;  // [h_fwd; h_bwd] per time step
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Mat features;  // head input
  Eigen::RowVectorXd prediction;
};

/// Inverted-dropout masks for the inputs of layers 1..L-1: [layer-1][t].
using DropoutMasks = std::vector<std::vector<Mat>>;

inline DropoutMasks sample_masks(const NetworkSpec& spec, std::size_t steps, std::size_t batch, Rng& rng) {
  DropoutMasks masks;
  if (spec.dropout <= 0.0) return masks;
  const double keep = 1.0 - spec.dropout;
  masks.resize(spec.num_layers - 1);
  for (auto& layer : masks) {
    layer.resize(steps);
    for (auto& m : layer) {
      m.resize(static_cast<Eigen::Index>(spec.output_width()), static_cast<Eigen::Index>(batch));
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = uniform01(rng) < keep ? 1.0 / keep : 0.0;
    }
  }
  return masks;
}

inline void run_direction(const DirWeights& w, const Sequence& x, bool reverse, DirCache& cache) {
  const std::size_t steps = x.size();
  const auto h = w.w_recurrent.cols(), batch = x[0].cols();
  cache.steps.assign(steps, {});
  cache.h_prev.assign(steps, {});
  cache.c_prev.assign(steps, {});
  Mat hs = Mat::Zero(h, batch), cs = Mat::Zero(h, batch);
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    cache.h_prev[t] = hs;
    cache.c_prev[t] = cs;
    cache.steps[t] = cell_step(w, x[t], hs, cs);
    hs = cache.steps[t].h;
    cs = cache.steps[t].c;
  }
}

/// One (bi)directional layer over a whole sequence.
inline Sequence forward_bilayer(const std::vector<DirWeights>& dirs, const Sequence& x, LayerCache* cache = nullptr) {
  require(!x.empty(), ErrorCode::invalid_argument, "empty input sequence");
  LayerCache local;
  LayerCache& lc = cache ? *cache : local;
  lc.dirs.assign(dirs.size(), {});
  for (std::size_t d = 0; d < dirs.size(); ++d) run_direction(dirs[d], x, d == 1, lc.dirs[d]);
  const auto h = dirs[0].w_recurrent.cols();
  Sequence out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    out[t].resize(h * static_cast<Eigen::Index>(dirs.size()), x[t].cols());
    for (std::size_t d = 0; d < dirs.size(); ++d) out[t].middleRows(h * static_cast<Eigen::Index>(d), h) = lc.dirs[d].steps[t].h;
  }
  return out;
}

inline Eigen::RowVectorXd forward_stacked(const Network& net, const Sequence& x, const DropoutMasks* masks = nullptr,
                                         ForwardCache* cache = nullptr) {
  const auto& spec = net.spec;
  require(!x.empty() && x[0].rows() == static_cast<Eigen::Index>(spec.input_dim), ErrorCode::shape_mismatch,
          "input width does not match the network");
  const auto w = unpack(net);
  ForwardCache local;
  ForwardCache& fc = cache ? *cache : local;
  fc.layers.assign(spec.num_layers, {});
  Sequence current = x;
  for (std::size_t l = 0; l < spec.num_layers; ++l) {
    if (l > 0 && masks && !masks->empty()) {
      for (std::size_t t = 0; t < current.size(); ++t) current[t] = current[t].cwiseProduct((*masks)[l - 1][t]);
    }
    fc.layers[l].input = current;
    current = forward_bilayer(w.layers[l], current, &fc.layers[l]);
    fc.layers[l].output = current;
  }
  fc.features = current.back();
  fc.prediction = (w.head_weight * fc.features).array() + w.head_bias;
  return fc.prediction;
}

/// Mean squared error plus l2 times the sum of squared weights.
inline double l2_term(const Network& net, double l2) {
  double sum = 0.0;
  for (const auto& s : parameter_layout(net.spec)) {
    if (!s.penalized) continue;
    for (std::size_t k = 0; k < s.size(); ++k) sum += net.params[s.offset + k] * net.params[s.offset + k];
  }
  return l2 * sum;
}

inline double loss(std::span<const double> predictions, std::span<const double> targets, double l2,
                   const Network& net) {
  require(predictions.size() == targets.size(), ErrorCode::length_mismatch, "predictions and targets differ in length");
  require(!targets.empty(), ErrorCode::invalid_argument, "empty target set");
  double mse = 0.0;
  for (std::size_t k = 0; k < targets.size(); ++k) mse += (predictions[k] - targets[k]) * (predictions[k] - targets[k]);
  return mse / static_cast<double>(targets.size()) + l2_term(net, l2);
}

struct LossAndGradient {
  double loss = 0.0;
  double mse = 0.0;
  std::vector<double> gradient;
};

namespace detail {

inline void backward_direction(const DirWeights& w, const Sequence& x, bool reverse, const DirCache& cache,
                               const std::vector<Mat>& dh_out, DirWeights& grad, Sequence& dx) {
  const std::size_t steps = x.size();
  const auto h = w.w_recurrent.cols(), batch = x[0].cols();
  Mat dh_next = Mat::Zero(h, batch), dc_next = Mat::Zero(h, batch);
  Mat dz(4 * h, batch);
  for (std::size_t s = steps; s-- > 0;) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    const auto& c = cache.steps[t];
    const Mat dh = dh_out[t] + dh_next;
    const Mat dc = (dh.array() * c.o.array() * (1.0 - c.tc.array().square())).matrix() + dc_next;
    dz.topRows(h) = (dc.array() * c.g.array() * c.i.array() * (1.0 - c.i.array())).matrix();
    dz.middleRows(h, h) = (dc.array() * cache.c_prev[t].array() * c.f.array() * (1.0 - c.f.array())).matrix();
    dz.middleRows(2 * h, h) = (dc.array() * c.i.array() * (1.0 - c.g.array().square())).matrix();
    dz.bottomRows(h) = (dh.array() * c.tc.array() * c.o.array() * (1.0 - c.o.array())).matrix();
    dc_next = dc.cwiseProduct(c.f);
    grad.w_input.noalias() += dz * x[t].transpose();
    grad.w_recurrent.noalias() += dz * cache.h_prev[t].transpose();
    grad.bias += dz.rowwise().sum();
    dx[t].noalias() += w.w_input.transpose() * dz;
    dh_next.noalias() = w.w_recurrent.transpose() * dz;
  }
}

}  // namespace detail

/// Full-batch loss and its gradient by backpropagation through time.
inline LossAndGradient loss_and_gradient(const Network& net, const Sequence& x, std::span<const double> targets,
                                         double l2, const DropoutMasks* masks = nullptr) {
  const auto& spec = net.spec;
  const auto batch = x.empty() ? 0 : static_cast<std::size_t>(x[0].cols());
  require(targets.size() == batch, ErrorCode::length_mismatch, "one target per window required");
  ForwardCache fc;
  forward_stacked(net, x, masks, &fc);
  const auto w = unpack(net);

  LossAndGradient out;
  Eigen::RowVectorXd dpred(static_cast<Eigen::Index>(batch));
  for (std::size_t b = 0; b < batch; ++b) {
    const double e = fc.prediction(static_cast<Eigen::Index>(b)) - targets[b];
    out.mse += e * e;
    dpred(static_cast<Eigen::Index>(b)) = 2.0 * e / static_cast<double>(batch);
  }
  out.mse /= static_cast<double>(batch);
  out.loss = out.mse + l2_term(net, l2);

  Unpacked g;
  g.layers.resize(spec.num_layers);
  for (std::size_t l = 0; l < spec.num_layers; ++l) {
    g.layers[l].resize(spec.directions());
    for (std::size_t d = 0; d < spec.directions(); ++d) {
      const auto& src = w.layers[l][d];
      g.layers[l][d] = {Mat::Zero(src.w_input.rows(), src.w_input.cols()),
                        Mat::Zero(src.w_recurrent.rows(), src.w_recurrent.cols()), Vec::Zero(src.bias.size())};
    }
  }
  g.head_weight = dpred * fc.features.transpose();
  g.head_bias = dpred.sum();

  const std::size_t steps = x.size();
  const auto h = static_cast<Eigen::Index>(spec.units);
  Sequence dy(steps);
  for (std::size_t t = 0; t < steps; ++t) dy[t] = Mat::Zero(static_cast<Eigen::Index>(spec.output_width()), static_cast<Eigen::Index>(batch));
  dy.back() = w.head_weight.transpose() * dpred;

  for (std::size_t l = spec.num_layers; l-- > 0;) {
    const auto& lc = fc.layers[l];
    Sequence dx(steps);
    for (std::size_t t = 0; t < steps; ++t) dx[t] = Mat::Zero(lc.input[t].rows(), static_cast<Eigen::Index>(batch));
    for (std::size_t d = 0; d < spec.directions(); ++d) {
      std::vector<Mat> dh(steps);
      for (std::size_t t = 0; t < steps; ++t) dh[t] = dy[t].middleRows(h * static_cast<Eigen::Index>(d), h);
      detail::backward_direction(w.layers[l][d], lc.input, d == 1, lc.dirs[d], dh, g.layers[l][d], dx);
    }
    if (l > 0) {
      if (masks && !masks->empty())
        for (std::size_t t = 0; t < steps; ++t) dx[t] = dx[t].cwiseProduct((*masks)[l - 1][t]);
      dy = std::move(dx);
    }
  }

  out.gradient.assign(net.params.size(), 0.0);
  const auto slots = parameter_layout(spec);
  auto put = [&](const ParamSlot& s, const Mat& m) {
    Eigen::Map<RowMat>(out.gradient.data() + s.offset, static_cast<Eigen::Index>(s.rows),
                       static_cast<Eigen::Index>(s.cols)) = m;
  };
  std::size_t k = 0;
  for (const auto& layer : g.layers) {
    for (const auto& d : layer) {
      put(slots[k++], d.w_input);
      put(slots[k++], d.w_recurrent);
      put(slots[k++], d.bias);
    }
  }
  put(slots[k++], g.head_weight);
  out.gradient[slots[k].offset] = g.head_bias;

  for (const auto& s : slots) {
    if (!s.penalized) continue;
    for (std::size_t j = 0; j < s.size(); ++j) out.gradient[s.offset + j] += 2.0 * l2 * net.params[s.offset + j];
  }
  return out;
}

inline std::vector<double> predict(const Network& net, const std::vector<Mat>& windows) {
  const auto p = forward_stacked(net, to_sequence(windows));
  return {p.data(), p.data() + p.size()};
}

inline double predict_one(const Network& net, const Mat& window) { return predict(net, {window})[0]; }

}  // namespace ewtf::nn
