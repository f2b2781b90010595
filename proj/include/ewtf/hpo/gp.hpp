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
#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "ewtf/core/error.hpp"
#include "ewtf/core/random.hpp"

namespace ewtf::hpo {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Kernel hyperparameters in log space. Length scales are per group; the
/// coordinate-to-group map lets one-hot blocks share a scale.
struct GpHyper {
  double log_output_var = 0.0;
  std::vector<double> log_length;
  double log_noise = std::log(1e-3);
};

struct GpFitOptions {
  std::optional<double> fixed_noise;  // variance in standardized units
  double min_noise = 1e-10;
  double max_noise = 1.0;
  double min_length = 1e-2;
  double max_length = 10.0;
  double min_output_var = 1e-2;
  double max_output_var = 20.0;
  std::size_t starts = 5;
  std::size_t steps = 50;
  std::uint64_t seed = 0;
};

class GpSurrogate {
 public:
  /// Matérn-5/2 covariance between two encoded points.
  double kernel(const double* a, const double* b) const {
    double r2 = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double d = (a[k] - b[k]) / length_[groups_[k]];
      r2 += d * d;
    }
    const double r = std::sqrt(5.0 * r2);
    return output_var_ * (1.0 + r + r * r / 3.0) * std::exp(-r);
  }

  /// Posterior mean and standard deviation in standardized loss units.
  std::pair<double, double> posterior_standardized(const std::vector<double>& z) const {
    require(z.size() == dim_, ErrorCode::shape_mismatch, "query point has the wrong dimension");
    const auto n = z_.rows();
    Eigen::VectorXd ks(n);
    for (Eigen::Index i = 0; i < n; ++i) ks(i) = kernel(z_.row(i).data(), z.data());
    const double mean = ks.dot(alpha_);
    const Eigen::VectorXd v = llt_.matrixL().solve(ks);
    const double var = std::max(0.0, output_var_ - v.squaredNorm());
    return {mean, std::sqrt(var)};
  }

  /// Posterior mean and standard deviation in original loss units.
  std::pair<double, double> posterior(const std::vector<double>& z) const {
    auto [m, s] = posterior_standardized(z);
    return {y_mean_ + y_scale_ * m, y_scale_ * s};
  }

  double standardize(double loss) const { return (loss - y_mean_) / y_scale_; }
  double log_marginal_likelihood() const { return lml_; }
  double output_var() const { return output_var_; }
  double noise_var() const { return noise_; }
  double jitter() const { return jitter_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }
  const GpHyper& hyper() const { return hyper_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return static_cast<std::size_t>(z_.rows()); }

  /// Same data, kernel output variance multiplied by `factor`.
  GpSurrogate with_output_scale(double factor) const {
    GpHyper h = hyper_;
    h.log_output_var += std::log(factor);
    auto gp = build(z_, y_, groups_, h);
    gp.y_mean_ = y_mean_;
    gp.y_scale_ = y_scale_;
    return gp;
  }

  static GpSurrogate build(const RowMatrix& z, const Eigen::VectorXd& y_std, const std::vector<std::size_t>& groups,
                           const GpHyper& h) {
    GpSurrogate gp;
    gp.z_ = z;
    gp.y_ = y_std;
    gp.groups_ = groups;
    gp.dim_ = static_cast<std::size_t>(z.cols());
    gp.hyper_ = h;
    gp.output_var_ = std::exp(h.log_output_var);
    gp.noise_ = std::exp(h.log_noise);
    gp.length_.resize(h.log_length.size());
    for (std::size_t k = 0; k < h.log_length.size(); ++k) gp.length_[k] = std::exp(h.log_length[k]);
    const auto n = z.rows();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) K(i, j) = K(j, i) = gp.kernel(z.row(i).data(), z.row(j).data());
    for (double jitter : {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6}) {
      Eigen::MatrixXd A = K;
      A.diagonal().array() += gp.noise_ + jitter * gp.output_var_;
      gp.llt_.compute(A);
      if (gp.llt_.info() == Eigen::Success && gp.llt_.matrixLLT().diagonal().minCoeff() > 0.0) {
        gp.jitter_ = jitter;
        gp.alpha_ = gp.llt_.solve(y_std);
        const double logdet = 2.0 * gp.llt_.matrixLLT().diagonal().array().log().sum();
        gp.lml_ = -0.5 * y_std.dot(gp.alpha_) - 0.5 * logdet -
                  0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
        return gp;
      }
    }
    fail(ErrorCode::singular_kernel, "kernel matrix is not positive definite even with jitter 1e-6");
  }

  const RowMatrix& inputs() const { return z_; }
  const Eigen::VectorXd& standardized_losses() const { return y_; }

 private:
  friend GpSurrogate gp_fit(const std::vector<std::vector<double>>&, const std::vector<double>&,
                            const std::vector<std::size_t>&, const GpFitOptions&);

  RowMatrix z_;  // row-major so each observation is contiguous
  Eigen::VectorXd y_;  // standardized
  std::vector<std::size_t> groups_;
  std::size_t dim_ = 0;
  GpHyper hyper_;
  double output_var_ = 1.0, noise_ = 1e-3, jitter_ = 0.0, lml_ = 0.0;
  std::vector<double> length_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double y_mean_ = 0.0, y_scale_ = 1.0;
};

/// Default starting hyperparameters for a given number of length-scale groups.
inline GpHyper default_hyper(std::size_t groups, const GpFitOptions& opt) {
  GpHyper h;
  h.log_output_var = 0.0;
  h.log_length.assign(groups, std::log(0.3));
  h.log_noise = std::log(opt.fixed_noise ? std::max(*opt.fixed_noise, 1e-300) : 1e-3);
  return h;
}

/// Fits a GP to (encoded point, loss) pairs. Losses are standardized; the
/// hyperparameters maximize the log marginal likelihood by multi-start
/// coordinate search in log space. `groups` maps coordinates to length-scale
/// groups (empty = one group per coordinate).
inline GpSurrogate gp_fit(const std::vector<std::vector<double>>& points, const std::vector<double>& losses,
                          const std::vector<std::size_t>& groups_in = {}, const GpFitOptions& opt = {}) {
  require(!points.empty() && points.size() == losses.size(), ErrorCode::invalid_argument,
          "GP needs at least one observation and one loss per point");
  const std::size_t n = points.size(), d = points[0].size();
  require(d >= 1, ErrorCode::invalid_argument, "GP needs at least one input dimension");
  RowMatrix z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    require(points[i].size() == d, ErrorCode::shape_mismatch, "observations have differing dimensions");
    for (std::size_t k = 0; k < d; ++k) z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = points[i][k];
  }
  std::vector<std::size_t> groups = groups_in;
  if (groups.empty())
    for (std::size_t k = 0; k < d; ++k) groups.push_back(k);
  require(groups.size() == d, ErrorCode::shape_mismatch, "group map must cover every coordinate");
  const std::size_t ng = *std::max_element(groups.begin(), groups.end()) + 1;

  double mean = 0.0;
  for (double l : losses) mean += l;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double l : losses) var += (l - mean) * (l - mean);
  const double sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
  const double scale = sd > 1e-300 ? sd : 1.0;
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = (losses[i] - mean) / scale;

  // Coordinates: output var, length scales, noise (unless fixed).
  const std::size_t ncoord = 1 + ng + (opt.fixed_noise ? 0 : 1);
  std::vector<double> lo(ncoord), hi(ncoord);
  lo[0] = std::log(opt.min_output_var);
  hi[0] = std::log(opt.max_output_var);
  for (std::size_t g = 0; g < ng; ++g) {
    lo[1 + g] = std::log(opt.min_length);
    hi[1 + g] = std::log(opt.max_length);
  }
  if (!opt.fixed_noise) {
    lo.back() = std::log(opt.min_noise);
    hi.back() = std::log(opt.max_noise);
  }
  auto to_hyper = [&](const std::vector<double>& c) {
    GpHyper h;
    h.log_output_var = c[0];
    h.log_length.assign(c.begin() + 1, c.begin() + 1 + static_cast<std::ptrdiff_t>(ng));
    h.log_noise = opt.fixed_noise ? std::log(std::max(*opt.fixed_noise, 1e-300)) : c.back();
    return h;
  };
  auto score = [&](const std::vector<double>& c) {
    try {
      return GpSurrogate::build(z, y, groups, to_hyper(c)).log_marginal_likelihood();
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  const auto init = default_hyper(ng, opt);
  std::vector<double> start0{init.log_output_var};
  start0.insert(start0.end(), init.log_length.begin(), init.log_length.end());
  if (!opt.fixed_noise) start0.push_back(init.log_noise);

  Rng rng(derive_seed(opt.seed, "gp_fit"));
  std::vector<double> best = start0;
  double best_score = score(start0);
  for (std::size_t s = 0; s < opt.starts; ++s) {
    std::vector<double> c = start0;
    if (s > 0)
      for (std::size_t k = 0; k < ncoord; ++k) c[k] = uniform(rng, lo[k], hi[k]);
    double cur = score(c);
    double step = 1.0;
    for (std::size_t it = 0; it < opt.steps; ++it) {
      bool improved = false;
      for (std::size_t k = 0; k < ncoord; ++k) {
        for (double dir : {1.0, -1.0}) {
          auto trial = c;
          trial[k] = std::clamp(c[k] + dir * step, lo[k], hi[k]);
          if (trial[k] == c[k]) continue;
          const double sc = score(trial);
          if (sc > cur) {
            c = std::move(trial);
            cur = sc;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (cur > best_score) {
      best_score = cur;
      best = c;
    }
  }
  auto gp = GpSurrogate::build(z, y, groups, to_hyper(best));
  gp.y_mean_ = mean;
  gp.y_scale_ = scale;
  return gp;
}

/// LML at the default starting hyperparameters (for diagnostics and tests).
inline double initial_log_marginal_likelihood(const std::vector<std::vector<double>>& points,
                                              const std::vector<double>& losses, const GpFitOptions& opt = {}) {
  GpFitOptions one = opt;
  one.starts = 1;
  one.steps = 0;
  return gp_fit(points, losses, {}, one).log_marginal_likelihood();
}

}  // namespace ewtf::hpo
