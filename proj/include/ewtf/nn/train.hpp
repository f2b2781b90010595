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
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ewtf/nn/network.hpp"

namespace ewtf::nn {

struct TrainingConfig {
  double learning_rate = 0.01;
  double l2_penalty = 1e-6;
  std::size_t max_epochs = 500;
  std::size_t patience = 25;
  double grad_clip_norm = 5.0;
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;

  void validate() const {
    require(learning_rate > 0 && l2_penalty >= 0 && grad_clip_norm > 0, ErrorCode::invalid_argument,
            "learning rate and clip norm must be positive, l2 non-negative");
    require(max_epochs >= 1 && patience >= 1 && patience <= max_epochs, ErrorCode::invalid_argument,
            "need 1 <= patience <= max_epochs");
    require(validation_fraction > 0 && validation_fraction < 1, ErrorCode::invalid_argument,
            "validation fraction must lie in (0, 1)");
  }
};

struct TrainedModel {
  Network net;
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::size_t best_epoch = 0;  // 1-based; 0 means the initial parameters
  std::uint64_t seed = 0;
};

/// Adam moments for a flat parameter vector.
class Adam {
 public:
  explicit Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : m_(n, 0.0), v_(n, 0.0), lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      m_[k] = b1_ * m_[k] + (1.0 - b1_) * grad[k];
      v_[k] = b2_ * v_[k] + (1.0 - b2_) * grad[k] * grad[k];
      params[k] -= lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + eps_);
    }
  }

 private:
  std::vector<double> m_, v_;
  double lr_, b1_, b2_, eps_;
  std::size_t t_ = 0;
};

inline void clip_global_norm(std::vector<double>& grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& g : grad) g *= scale;
  }
}

inline double mse_of(const Network& net, const Sequence& x, std::span<const double> y) {
  const auto p = forward_stacked(net, x);
  double s = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) s += (p(static_cast<Eigen::Index>(k)) - y[k]) * (p(static_cast<Eigen::Index>(k)) - y[k]);
  return s / static_cast<double>(y.size());
}

/// Minimum number of windows `train` accepts for a given spec and config.
inline std::size_t min_training_windows(const NetworkSpec& spec, const TrainingConfig& cfg) {
  return std::max<std::size_t>(spec.window_length + cfg.patience, 5);
}

/// Full-batch Adam with early stopping on the trailing validation windows.
/// Returns the parameters of the best validation epoch.
inline TrainedModel train(const std::vector<Mat>& windows, const std::vector<double>& targets, const NetworkSpec& spec,
                          const TrainingConfig& cfg) {
  spec.validate();
  cfg.validate();
  require(windows.size() == targets.size(), ErrorCode::length_mismatch, "one target per window required");
  require(windows.size() >= min_training_windows(spec, cfg), ErrorCode::too_few_samples,
          "need at least " + std::to_string(min_training_windows(spec, cfg)) + " windows, got " +
              std::to_string(windows.size()));
  for (const auto& w : windows)
    require(w.rows() == static_cast<Eigen::Index>(spec.window_length) &&
                w.cols() == static_cast<Eigen::Index>(spec.input_dim),
            ErrorCode::shape_mismatch, "window shape does not match the network spec");

  const std::size_t n_val = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(cfg.validation_fraction * static_cast<double>(windows.size()))));
  const std::size_t n_train = windows.size() - n_val;
  const std::vector<Mat> tw(windows.begin(), windows.begin() + static_cast<std::ptrdiff_t>(n_train));
  const std::vector<Mat> vw(windows.begin() + static_cast<std::ptrdiff_t>(n_train), windows.end());
  const std::vector<double> ty(targets.begin(), targets.begin() + static_cast<std::ptrdiff_t>(n_train));
  const std::vector<double> vy(targets.begin() + static_cast<std::ptrdiff_t>(n_train), targets.end());
  const auto tx = to_sequence(tw), vx = to_sequence(vw);

  TrainedModel out;
  out.seed = cfg.seed;
  Network net = init_network(spec, cfg.seed);
  Rng mask_rng(derive_seed(cfg.seed, "dropout"));
  Adam adam(net.params.size(), cfg.learning_rate);

  double best = mse_of(net, vx, vy);
  out.net = net;
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto masks = sample_masks(spec, spec.window_length, n_train, mask_rng);
    auto lg = loss_and_gradient(net, tx, ty, cfg.l2_penalty, &masks);
    if (!std::isfinite(lg.loss))
      fail(ErrorCode::diverged_loss, "training loss became non-finite at epoch " + std::to_string(epoch) +
                                         " (learning rate " + std::to_string(cfg.learning_rate) + ")");
    out.train_loss.push_back(lg.loss);
    clip_global_norm(lg.gradient, cfg.grad_clip_norm);
    adam.step(net.params, lg.gradient);

    const double val = mse_of(net, vx, vy);
    if (!std::isfinite(val))
      fail(ErrorCode::diverged_loss, "validation loss became non-finite at epoch " + std::to_string(epoch));
    out.val_loss.push_back(val);
    if (val < best) {
      best = val;
      out.net = net;
      out.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return out;
}

/// Hook to rewrite a window after a predicted value is appended; receives
/// the shifted window (last row already holds the prediction in channel 0)
/// and the step index.
using WindowUpdater = std::function<void(Mat& window, double prediction, std::size_t step)>;

/// Recursive forecast: each prediction is appended as the newest target
/// value, other channels repeat their last observation unless `update`
/// rewrites them.
inline std::vector<double> predict_multi_step(const Network& net, const Mat& last_window, std::size_t horizon,
                                              const WindowUpdater& update = {}, std::size_t target_channel = 0) {
  require(horizon >= 1, ErrorCode::invalid_argument, "horizon must be >= 1");
  require(target_channel < static_cast<std::size_t>(last_window.cols()), ErrorCode::shape_mismatch,
          "target channel outside the window");
  std::vector<double> out;
  Mat window = last_window;
  for (std::size_t step = 0; step < horizon; ++step) {
    const double p = predict_one(net, window);
    out.push_back(p);
    if (step + 1 == horizon) break;
    const auto rows = window.rows();
    Mat next(rows, window.cols());
    next.topRows(rows - 1) = window.bottomRows(rows - 1);
    next.row(rows - 1) = window.row(rows - 1);
    next(rows - 1, static_cast<Eigen::Index>(target_channel)) = p;
    if (update) update(next, p, step);
    window = std::move(next);
  }
  return out;
}

}  // namespace ewtf::nn
