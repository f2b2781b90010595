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

#include <string>
#include <vector>

#include "ewtf/core/error.hpp"
#include "ewtf/hpo/bo.hpp"
#include "ewtf/nn/train.hpp"

namespace ewtf::pipeline {

/// One rolling-origin fold over time-ordered samples: fit on [0, train_end),
/// score on [train_end, val_end).
struct Fold {
  std::size_t train_end = 0;
  std::size_t val_end = 0;
};

/// `folds` forward-chained folds. The first trains on `min_train` samples;
/// the remaining samples are cut into equal validation blocks (the last one
/// absorbs the remainder).
inline std::vector<Fold> rolling_origin_folds(std::size_t n, std::size_t folds, std::size_t min_train) {
  require(folds >= 1 && min_train >= 1, ErrorCode::invalid_argument, "need folds >= 1 and min_train >= 1");
  require(n >= min_train + folds, ErrorCode::too_few_samples,
          "rolling-origin CV needs " + std::to_string(min_train + folds) + " samples, got " + std::to_string(n));
  const std::size_t block = (n - min_train) / folds;
  std::vector<Fold> out;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t start = min_train + f * block;
    out.push_back({start, f + 1 == folds ? n : start + block});
  }
  return out;
}

/// Network and optimizer settings carried by a point of the default box.
inline void apply_point(const hpo::Point& p, const hpo::SearchSpace& space, nn::NetworkSpec& spec, nn::TrainingConfig& cfg) {
  for (std::size_t k = 0; k < space.dims.size(); ++k) {
    const auto& name = space.dims[k].name;
    if (name == "units") spec.units = static_cast<std::size_t>(std::get<std::int64_t>(p[k]));
    else if (name == "layers") spec.num_layers = static_cast<std::size_t>(std::get<std::int64_t>(p[k]));
    else if (name == "learning_rate") cfg.learning_rate = hpo::as_number(p[k]);
    else if (name == "l2") cfg.l2_penalty = hpo::as_number(p[k]);
    else if (name == "dropout") spec.dropout = hpo::as_number(p[k]);
    else if (name == "mode") spec.mode = nn::parse_mode(std::get<std::string>(p[k]));
    else fail(ErrorCode::invalid_argument, "unsupported hyperparameter '" + name + "'");
  }
}

/// Mean validation MSE over rolling-origin folds of one window set.
inline double cv_loss(const std::vector<nn::Mat>& windows, const std::vector<double>& targets, const nn::NetworkSpec& spec,
                      const nn::TrainingConfig& cfg, std::size_t folds) {
  const auto split = rolling_origin_folds(windows.size(), folds, nn::min_training_windows(spec, cfg));
  double total = 0.0;
  for (std::size_t f = 0; f < split.size(); ++f) {
    const auto& fold = split[f];
    auto tcfg = cfg;
    tcfg.seed = derive_seed(cfg.seed, f);
    const std::vector<nn::Mat> tw(windows.begin(), windows.begin() + static_cast<std::ptrdiff_t>(fold.train_end));
    const std::vector<double> ty(targets.begin(), targets.begin() + static_cast<std::ptrdiff_t>(fold.train_end));
    const auto model = nn::train(tw, ty, spec, tcfg);
    const std::vector<nn::Mat> vw(windows.begin() + static_cast<std::ptrdiff_t>(fold.train_end),
                                  windows.begin() + static_cast<std::ptrdiff_t>(fold.val_end));
    const auto pred = nn::predict(model.net, vw);
    double mse = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) mse += (pred[i] - targets[fold.train_end + i]) * (pred[i] - targets[fold.train_end + i]);
    total += mse / static_cast<double>(pred.size());
  }
  return total / static_cast<double>(split.size());
}

}  // namespace ewtf::pipeline
