// Copyright 2026 The Stance Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
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
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stance/rng.hpp"

namespace stance {

// Gaussian-process Bayesian optimization over the unit box: exact posterior
// with a squared-exponential kernel, Expected Improvement acquisition and a
// sequential maximize-observe-refit loop.

struct GpDataset {
  std::vector<std::vector<double>> points;  // in [0, 1]^d
  std::vector<double> values;

  // Observations at an existing input are merged by averaging, which keeps
  // the Gram matrix well conditioned under repeated sampling.
  void add(const std::vector<double>& x, double y) {
    for (size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != x.size()) continue;
      bool same = true;
      for (size_t d = 0; d < x.size(); ++d) {
        if (std::abs(points[i][d] - x[d]) > 1e-12) {
          same = false;
          break;
        }
      }
      if (same) {
        merge_count_[i] += 1;
        values[i] += (y - values[i]) / merge_count_[i];
        return;
      }
    }
    points.push_back(x);
    values.push_back(y);
    merge_count_.push_back(1);
  }

  int size() const { return static_cast<int>(points.size()); }

 private:
  std::vector<int> merge_count_;
};

struct GpConfig {
  std::vector<double> lengthscales;  // per dimension; empty = isotropic
  double default_lengthscale = 0.2;
  double signal_variance = 1.0;
  double noise_variance = 0.01;  // after standardization of the objective
  double jitter = 1e-8;

  double lengthscale(int d) const {
    return d < static_cast<int>(lengthscales.size()) ? lengthscales[d]
                                                     : default_lengthscale;
  }
};

struct GpPosterior {
  double mean = 0.0;
  double std = 0.0;
};

inline double se_kernel(const GpConfig& cfg, const std::vector<double>& a,
                        const std::vector<double>& b) {
  double q = 0.0;
  for (size_t d = 0; d < a.size(); ++d) {
    const double r = (a[d] - b[d]) / cfg.lengthscale(static_cast<int>(d));
    q += r * r;
  }
  return cfg.signal_variance * std::exp(-0.5 * q);
}

// Fitted GP. Observations are standardized to zero mean and unit variance
// before conditioning, so the kernel hyperparameters refer to a normalized
// objective; predictions are mapped back to raw units.
class GpModel {
 public:
  GpModel(const GpDataset& data, const GpConfig& cfg)
      : data_(data), cfg_(cfg) {
    const int n = data_.size();
    if (n == 0) return;

    y_shift_ = 0.0;
    for (double y : data_.values) y_shift_ += y;
    y_shift_ /= n;
    double var = 0.0;
    for (double y : data_.values) var += (y - y_shift_) * (y - y_shift_);
    var /= n;
    y_scale_ = var > 1e-24 ? std::sqrt(var) : 1.0;

    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double k = se_kernel(cfg_, data_.points[i], data_.points[j]);
        gram(i, j) = k;
        gram(j, i) = k;
      }
    }
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = (data_.values[i] - y_shift_) / y_scale_;

    // Cholesky with escalating jitter; clustered samples can make the Gram
    // matrix numerically semidefinite.
    double jitter = cfg_.jitter;
    for (;;) {
      Eigen::MatrixXd regularized = gram;
      regularized.diagonal().array() += cfg_.noise_variance + jitter;
      llt_.compute(regularized);
      if (llt_.info() == Eigen::Success) break;
      jitter *= 10.0;
      if (jitter > 1e-4) {
        throw std::runtime_error(
            "GP Gram matrix not positive definite (jitter escalated to " +
            std::to_string(jitter) + ")");
      }
    }
    alpha_ = llt_.solve(y);
  }

  GpPosterior predict(const std::vector<double>& x) const {
    const int n = data_.size();
    const double prior_var = se_kernel(cfg_, x, x);
    if (n == 0) {
      return {0.0, std::sqrt(prior_var)};
    }
    Eigen::VectorXd k(n);
    for (int i = 0; i < n; ++i) k[i] = se_kernel(cfg_, x, data_.points[i]);
    const double mean_std = k.dot(alpha_);
    const Eigen::VectorXd v = llt_.solve(k);
    const double var = std::max(0.0, prior_var - k.dot(v));
    return {y_shift_ + y_scale_ * mean_std, y_scale_ * std::sqrt(var)};
  }

 private:
  GpDataset data_;
  GpConfig cfg_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double y_shift_ = 0.0;
  double y_scale_ = 1.0;
};

// Exact predictive moments at x. Convenience wrapper that refits; use
// GpModel directly when predicting many times from one dataset.
inline GpPosterior gp_posterior(const GpDataset& data, const GpConfig& cfg,
                                const std::vector<double>& x) {
  return GpModel(data, cfg).predict(x);
}

inline double standard_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

inline double standard_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// Expected improvement of a Gaussian belief over the incumbent `f_best`
// (maximization). Zero std collapses to the deterministic improvement.
inline double expected_improvement(double mean, double std, double f_best) {
  if (std <= 0.0) return std::max(mean - f_best, 0.0);
  const double z = (mean - f_best) / std;
  return std::max(0.0, (mean - f_best) * standard_normal_cdf(z) +
                           std * standard_normal_pdf(z));
}

struct AcquisitionConfig {
  int starts = 64;
  int refine_steps = 100;
  double initial_step = 0.25;
};

// Maximizes EI over [0, 1]^dim by multi-start coordinate pattern search.
// Deterministic given the rng state.
inline std::vector<double> acquire_next(const GpDataset& data,
                                        const GpConfig& cfg, int dim, Rng& rng,
                                        const AcquisitionConfig& acq = {}) {
  const GpModel model(data, cfg);
  double f_best = -std::numeric_limits<double>::infinity();
  for (double y : data.values) f_best = std::max(f_best, y);
  if (data.size() == 0) f_best = 0.0;

  const auto score = [&](const std::vector<double>& x) {
    const GpPosterior p = model.predict(x);
    return expected_improvement(p.mean, p.std, f_best);
  };

  std::vector<double> best_x(dim, 0.5);
  double best_ei = -1.0;
  for (int s = 0; s < acq.starts; ++s) {
    std::vector<double> x(dim);
    for (int d = 0; d < dim; ++d) x[d] = rng.uniform();
    double ei = score(x);
    double step = acq.initial_step;
    for (int it = 0; it < acq.refine_steps; ++it) {
      bool improved = false;
      for (int d = 0; d < dim; ++d) {
        for (const double dir : {1.0, -1.0}) {
          std::vector<double> probe = x;
          probe[d] = std::clamp(probe[d] + dir * step, 0.0, 1.0);
          const double e = score(probe);
          if (e > ei) {
            ei = e;
            x = std::move(probe);
            improved = true;
          }
        }
      }
      if (!improved) {
        step *= 0.5;
        if (step < 1e-10) break;
      }
    }
    if (ei > best_ei) {
      best_ei = ei;
      best_x = x;
    }
  }
  return best_x;
}

struct BoHistoryEntry {
  int iteration = 0;
  std::vector<double> x;
  double y = 0.0;
  double best_so_far = 0.0;
};

struct BoResult {
  std::vector<double> x_best;
  double y_best = -std::numeric_limits<double>::infinity();
  std::vector<BoHistoryEntry> history;
  GpDataset dataset;
};

struct BoConfig {
  GpConfig gp;
  AcquisitionConfig acquisition;
  int init_points = 3;  // uniform seeding before the model-guided phase
  // Designs evaluated before any random seeding, e.g. the incumbent
  // configuration.
  std::vector<std::vector<double>> warm_starts;
};

// Sequential maximization of a noisy objective over [0, 1]^dim. A failed
// evaluation is recorded at the worst observed value so the loop continues.
inline BoResult bo_optimize(
    const std::function<double(const std::vector<double>&)>& objective,
    int budget, int dim, const BoConfig& cfg, uint64_t seed) {
  Rng rng(seed);
  BoResult result;
  for (int n = 0; n < budget; ++n) {
    std::vector<double> x;
    if (n < static_cast<int>(cfg.warm_starts.size())) {
      x = cfg.warm_starts[n];
    } else if (result.dataset.size() < cfg.init_points) {
      x.resize(dim);
      for (int d = 0; d < dim; ++d) x[d] = rng.uniform();
    } else {
      x = acquire_next(result.dataset, cfg.gp, dim, rng, cfg.acquisition);
    }
    double y;
    try {
      y = objective(x);
    } catch (const std::exception&) {
      y = result.dataset.size() > 0
              ? *std::min_element(result.dataset.values.begin(),
                                  result.dataset.values.end())
              : -1e9;
    }
    result.dataset.add(x, y);
    if (y > result.y_best) {
      result.y_best = y;
      result.x_best = x;
    }
    result.history.push_back({n, x, y, result.y_best});
  }
  return result;
}

}  // namespace stance
