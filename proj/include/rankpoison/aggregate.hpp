#pragma once

// Weighted least-squares rank aggregation.
//
// aggregate() solves (B'WB + delta*I) theta = B'Wy directly; B'WB is the
// weighted graph Laplacian of the comparison graph, assembled without
// materializing B. The constant vector spans its kernel, hence the small
// ridge delta. All solvers return the mean-zero representative.
//
// aggregate_robust() adds a per-edge outlier variable gamma with a weighted
// l1 penalty and alternates a ridge solve on y - gamma with per-edge soft
// thresholding; the objective is nonincreasing across iterations.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rankpoison/core.hpp"

namespace rankpoison {

struct RidgeConfig {
  double delta = 1e-8;

  void validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("RidgeConfig: delta > 0 required");
  }
};

struct RobustConfig {
  double lambda = 0.1;
  int max_iters = 100;
  double tol = 1e-10;

  void validate() const {
    if (lambda < 0.0) throw std::invalid_argument("RobustConfig: lambda >= 0 required");
    if (max_iters < 1 || !(tol > 0.0))
      throw std::invalid_argument("RobustConfig: bad iteration controls");
  }
};

namespace detail {

// Solves (B'WB + delta*I) theta = B'W (y - gamma) for real-valued weights,
// gamma = nullptr meaning all zeros.
inline ScoreVector ridge_solve(const ComparisonDataset& data,
                               const std::vector<double>& w,
                               const std::vector<double>* gamma, double delta) {
  const int n = data.item_count();
  const std::size_t N = data.slot_count();
  if (w.size() != N) throw std::invalid_argument("aggregate: weight length mismatch");

  double total = 0.0;
  for (double v : w) {
    if (v < 0.0) throw std::invalid_argument("aggregate: negative weight");
    total += v;
  }
  if (total <= 0.0) throw DegenerateInputError("aggregate: all weights are zero");

  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t e = 0; e < N; ++e) {
    if (w[e] == 0.0) continue;
    const auto [i, j] = slot_pair(n, e);
    lap(i, i) += w[e];
    lap(j, j) += w[e];
    lap(i, j) -= w[e];
    lap(j, i) -= w[e];
    const double y = 1.0 - (gamma ? (*gamma)[e] : 0.0);
    rhs(i) += w[e] * y;
    rhs(j) -= w[e] * y;
  }
  lap.diagonal().array() += delta;

  const Eigen::VectorXd theta = lap.ldlt().solve(rhs);
  ScoreVector out(std::vector<double>(theta.data(), theta.data() + n));
  return out.centered();
}

}  // namespace detail

inline ScoreVector aggregate(const ComparisonDataset& data,
                             const std::vector<double>& weights,
                             RidgeConfig cfg = {}) {
  cfg.validate();
  return detail::ridge_solve(data, weights, nullptr, cfg.delta);
}

inline ScoreVector aggregate(const ComparisonDataset& data,
                             const FrequencyVector& weights, RidgeConfig cfg = {}) {
  return aggregate(data, weights.values(), cfg);
}

// Uses the dataset's own integer vote counts.
inline ScoreVector aggregate(const ComparisonDataset& data, RidgeConfig cfg = {}) {
  std::vector<double> w(data.weights().begin(), data.weights().end());
  return aggregate(data, w, cfg);
}

struct RobustFit {
  ScoreVector scores;
  std::vector<double> gamma;
  int iterations = 0;
  // Objective value after each completed iteration; nonincreasing.
  std::vector<double> objective_trace;
};

namespace detail {

inline double robust_objective(const ComparisonDataset& data,
                               const std::vector<double>& w, const ScoreVector& theta,
                               const std::vector<double>& gamma, double lambda) {
  double acc = 0.0;
  for (std::size_t e = 0; e < data.slot_count(); ++e) {
    if (w[e] == 0.0) continue;
    const double r = slot_residual(theta, data.item_count(), e) - gamma[e];
    acc += 0.5 * w[e] * r * r + lambda * w[e] * std::abs(gamma[e]);
  }
  return acc;
}

inline double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

}  // namespace detail

// Alternating minimization of
//   (1/2) sum_e w_e (y_e - gamma_e - theta_i + theta_j)^2 + lambda sum_e w_e |gamma_e|
// starting from gamma = 0, so the lambda -> inf limit matches aggregate().
// lambda = 0 is degenerate: gamma absorbs the whole residual and the scores
// stay at the plain fit.
inline RobustFit aggregate_robust(const ComparisonDataset& data,
                                  const std::vector<double>& weights,
                                  RobustConfig cfg, RidgeConfig ridge = {}) {
  cfg.validate();
  ridge.validate();
  const std::size_t N = data.slot_count();

  RobustFit fit;
  fit.gamma.assign(N, 0.0);
  fit.scores = detail::ridge_solve(data, weights, &fit.gamma, ridge.delta);

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    double max_update = 0.0;
    for (std::size_t e = 0; e < N; ++e) {
      if (weights[e] == 0.0) continue;
      const double r = slot_residual(fit.scores, data.item_count(), e);
      const double g = detail::soft_threshold(r, cfg.lambda);
      max_update = std::max(max_update, std::abs(g - fit.gamma[e]));
      fit.gamma[e] = g;
    }
    const ScoreVector next = detail::ridge_solve(data, weights, &fit.gamma, ridge.delta);
    for (std::size_t i = 0; i < next.size(); ++i)
      max_update = std::max(max_update, std::abs(next[i] - fit.scores[i]));
    fit.scores = next;
    fit.iterations = iter + 1;
    fit.objective_trace.push_back(
        detail::robust_objective(data, weights, fit.scores, fit.gamma, cfg.lambda));
    if (max_update < cfg.tol) break;
  }
  return fit;
}

inline RobustFit aggregate_robust(const ComparisonDataset& data, RobustConfig cfg,
                                  RidgeConfig ridge = {}) {
  std::vector<double> w(data.weights().begin(), data.weights().end());
  return aggregate_robust(data, w, cfg, ridge);
}

}  // namespace rankpoison
