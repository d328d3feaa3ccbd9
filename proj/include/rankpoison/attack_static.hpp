#pragma once

// Static (min-max) poisoning attack.
//
// Against an unknown ranker decision the attacker solves a distributionally
// robust surrogate: the inner supremum over a 2-Wasserstein ball of radius
// alpha around the empirical pair frequency p collapses to
//
//   F(theta) = L(theta) + R(theta)
//   L(theta) = (1/2N) sum_e p_e r_e^2
//   R(theta) = sqrt( (alpha/4N) sum_e r_e^2 ),      r_e = 1 - theta_i + theta_j.
//
// The pipeline is: minimize F by gradient descent on the mean-zero subspace,
// recover the dual variable lambda* = sqrt(sum_e r_e^2 / (16 N alpha)), take
// the per-slot closed-form maximizer q_e = p_e + r_e^2 / (4 lambda*),
// renormalize onto the simplex so the dosage cap sum w <= (1+kappa) M0 can
// hold, scale by (1+kappa) M0 and round.
//
// R is nonsmooth where all residuals vanish; the solver smooths the sqrt
// with a 1e-12 shift. The reported objective and the dual identities use
// the exact formulas.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rankpoison/core.hpp"

namespace rankpoison {

struct GradientSolverConfig {
  double step = 1.0;        // initial step size, adapted by backtracking
  int max_iters = 10000;
  double grad_tol = 1e-8;   // on the max-norm of the gradient

  void validate() const {
    if (!(step > 0.0) || max_iters < 1 || !(grad_tol > 0.0))
      throw std::invalid_argument("GradientSolverConfig: bad parameters");
  }
};

struct StaticAttackConfig {
  double alpha = 1e-3;
  double kappa = 0.0;
  Rounding rounding = Rounding::nearest;
  GradientSolverConfig solver;

  void validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("StaticAttackConfig: alpha > 0");
    if (kappa < 0.0) throw std::invalid_argument("StaticAttackConfig: kappa >= 0");
    solver.validate();
  }
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::string what, ScoreVector last_iterate, double grad_norm)
      : std::runtime_error(std::move(what)),
        last_iterate(std::move(last_iterate)),
        gradient_norm(grad_norm) {}

  ScoreVector last_iterate;
  double gradient_norm;
};

namespace detail {

inline void check_theta_p(const ScoreVector& theta, const FrequencyVector& p,
                          const ComparisonDataset& data) {
  if (theta.size() != static_cast<std::size_t>(data.item_count()) ||
      p.size() != data.slot_count())
    throw std::invalid_argument("static attack: dimension mismatch");
}

inline std::vector<double> residuals(const ScoreVector& theta,
                                     const ComparisonDataset& data) {
  std::vector<double> r(data.slot_count());
  for (std::size_t e = 0; e < r.size(); ++e)
    r[e] = slot_residual(theta, data.item_count(), e);
  return r;
}

inline double sum_squares(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

}  // namespace detail

// L(theta): the p-weighted half mean of squared residuals.
inline double empirical_loss_term(const ScoreVector& theta, const FrequencyVector& p,
                                  const ComparisonDataset& data) {
  detail::check_theta_p(theta, p, data);
  return weighted_loss(theta, p, data);
}

// R(theta): the square-root penalty over the full design.
inline double residual_regularizer(const ScoreVector& theta,
                                   const ComparisonDataset& data, double alpha) {
  const auto r = detail::residuals(theta, data);
  const double N = static_cast<double>(data.slot_count());
  return std::sqrt(alpha / (4.0 * N) * detail::sum_squares(r));
}

inline double wasserstein_objective(const ScoreVector& theta, const FrequencyVector& p,
                                    const ComparisonDataset& data, double alpha) {
  return empirical_loss_term(theta, p, data) +
         residual_regularizer(theta, data, alpha);
}

// Analytic gradient of L + R, projected onto the mean-zero subspace.
// smoothing is added inside the sqrt of R; pass 0 for the exact gradient.
inline std::vector<double> wasserstein_gradient(const ScoreVector& theta,
                                                const FrequencyVector& p,
                                                const ComparisonDataset& data,
                                                double alpha, double smoothing = 0.0) {
  detail::check_theta_p(theta, p, data);
  const int n = data.item_count();
  const double N = static_cast<double>(data.slot_count());
  const auto r = detail::residuals(theta, data);
  const double root = std::sqrt(smoothing + alpha / (4.0 * N) * detail::sum_squares(r));

  // d r_e / d theta = -b_e, so both terms accumulate residual flows per item.
  std::vector<double> weighted_flow(n, 0.0), plain_flow(n, 0.0);
  for (std::size_t e = 0; e < r.size(); ++e) {
    const auto [i, j] = slot_pair(n, e);
    weighted_flow[i] += p[e] * r[e];
    weighted_flow[j] -= p[e] * r[e];
    plain_flow[i] += r[e];
    plain_flow[j] -= r[e];
  }
  const double reg_coeff = root > 0.0 ? alpha / (4.0 * N * root) : 0.0;
  std::vector<double> grad(n);
  for (int i = 0; i < n; ++i)
    grad[i] = -weighted_flow[i] / N - reg_coeff * plain_flow[i];

  // The row sums of B vanish, so the gradient is mean-zero up to rounding;
  // recentering keeps the iterates pinned to the gauge.
  double mean = 0.0;
  for (double g : grad) mean += g;
  mean /= n;
  for (double& g : grad) g -= mean;
  return grad;
}

// Minimizes F = L + R over the mean-zero subspace by gradient descent with
// a backtracking (Armijo) line search. Throws ConvergenceError with the
// last iterate when max_iters runs out.
inline ScoreVector solve_worst_case_theta(const ComparisonDataset& data,
                                          const FrequencyVector& p, double alpha,
                                          GradientSolverConfig cfg = {}) {
  cfg.validate();
  if (!p.is_normalized())
    throw std::invalid_argument("solve_worst_case_theta: p must be normalized");
  if (!(alpha > 0.0))
    throw std::invalid_argument("solve_worst_case_theta: alpha > 0 required");

  constexpr double kSmoothing = 1e-12;
  constexpr double kArmijo = 1e-4;
  const int n = data.item_count();
  const double N = static_cast<double>(data.slot_count());

  auto objective = [&](const ScoreVector& theta) {
    const auto r = detail::residuals(theta, data);
    double weighted = 0.0;
    for (std::size_t e = 0; e < r.size(); ++e) weighted += p[e] * r[e] * r[e];
    return weighted / (2.0 * N) +
           std::sqrt(kSmoothing + alpha / (4.0 * N) * detail::sum_squares(r));
  };

  ScoreVector theta(std::vector<double>(n, 0.0));
  double f = objective(theta);
  double step = cfg.step;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const auto grad = wasserstein_gradient(theta, p, data, alpha, kSmoothing);
    double gnorm_inf = 0.0, gnorm_sq = 0.0;
    for (double g : grad) {
      gnorm_inf = std::max(gnorm_inf, std::abs(g));
      gnorm_sq += g * g;
    }
    if (gnorm_inf <= cfg.grad_tol) return theta.centered();

    // Backtrack from a step that grows again after successful iterations.
    step *= 2.0;
    while (true) {
      ScoreVector trial = theta;
      for (int i = 0; i < n; ++i) trial.theta[i] -= step * grad[i];
      const double ft = objective(trial);
      if (ft <= f - kArmijo * step * gnorm_sq) {
        theta = std::move(trial);
        f = ft;
        break;
      }
      step *= 0.5;
      if (step < 1e-18) {
        // No descent at machine scale: treat as converged if the gradient
        // is already tiny relative to the objective, otherwise fail.
        if (gnorm_inf <= 1e3 * cfg.grad_tol) return theta.centered();
        throw ConvergenceError("solve_worst_case_theta: line search stalled",
                               theta.centered(), gnorm_inf);
      }
    }
  }
  const auto grad = wasserstein_gradient(theta, p, data, alpha, kSmoothing);
  double gnorm_inf = 0.0;
  for (double g : grad) gnorm_inf = std::max(gnorm_inf, std::abs(g));
  if (gnorm_inf <= cfg.grad_tol) return theta.centered();
  throw ConvergenceError("solve_worst_case_theta: no convergence in " +
                             std::to_string(cfg.max_iters) + " iterations",
                         theta.centered(), gnorm_inf);
}

// Dual variable of the worst-case solve:
// lambda* = sqrt( sum_e r_e^2 / (16 N alpha) ). Zero residuals give zero.
inline double dual_lambda(const ScoreVector& theta_star, const ComparisonDataset& data,
                          double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("dual_lambda: alpha > 0 required");
  const auto r = detail::residuals(theta_star, data);
  const double N = static_cast<double>(data.slot_count());
  return std::sqrt(detail::sum_squares(r) / (16.0 * N * alpha));
}

// Value of the dual bound lambda*alpha + <p,b>/N + |b|^2/(4 lambda N) with
// b_e = r_e^2 / 2 in the inner product and the squared-residual reading of
// the norm term. At lambda = dual_lambda(theta) this equals L + R exactly.
inline double wasserstein_dual_value(const ScoreVector& theta,
                                     const FrequencyVector& p,
                                     const ComparisonDataset& data, double alpha,
                                     double lambda) {
  detail::check_theta_p(theta, p, data);
  if (!(lambda > 0.0))
    throw std::invalid_argument("wasserstein_dual_value: lambda > 0 required");
  const auto r = detail::residuals(theta, data);
  const double N = static_cast<double>(data.slot_count());
  double pb = 0.0;
  for (std::size_t e = 0; e < r.size(); ++e) pb += p[e] * r[e] * r[e] / 2.0;
  const double bnorm_sq = detail::sum_squares(r) / 4.0;
  return lambda * alpha + pb / N + bnorm_sq / (4.0 * lambda * N);
}

// Per-slot closed-form maximizer q_e = p_e + r_e^2 / (4 lambda*), then
// renormalized onto the simplex so the dosage cap can hold after scaling.
inline FrequencyVector toxic_distribution(const ScoreVector& theta_star,
                                          double lambda_star, const FrequencyVector& p,
                                          const ComparisonDataset& data) {
  detail::check_theta_p(theta_star, p, data);
  if (!(lambda_star > 0.0))
    throw std::invalid_argument(
        "toxic_distribution: lambda* = 0 means interpolating scores; the attack "
        "degenerates to q = p");
  std::vector<double> q(data.slot_count());
  double total = 0.0;
  for (std::size_t e = 0; e < q.size(); ++e) {
    const double r = slot_residual(theta_star, data.item_count(), e);
    q[e] = p[e] + r * r / (4.0 * lambda_star);
    total += q[e];
  }
  for (double& v : q) v /= total;
  return FrequencyVector::normalized(std::move(q));
}

struct StaticAttackResult {
  ScoreVector theta_star;
  double lambda_star = 0.0;
  FrequencyVector q_star{std::vector<double>{}};
  Weights poisoned_weights;
  // Diagnostics.
  double objective = 0.0;
  double residual_norm = 0.0;
  bool degenerate = false;  // lambda* = 0, q = p returned
};

// Full pipeline: p = w/M0, worst-case theta, dual variable, toxic
// distribution, weight assignment w = (1+kappa) M0 q, rounding.
inline StaticAttackResult run_static_attack(const ComparisonDataset& data,
                                            const StaticAttackConfig& cfg) {
  cfg.validate();
  const auto total = static_cast<double>(data.total_votes());
  if (total <= 0.0)
    throw DegenerateInputError("run_static_attack: dataset has no votes");

  StaticAttackResult res;
  const FrequencyVector p = FrequencyVector::empirical(data);
  res.theta_star = solve_worst_case_theta(data, p, cfg.alpha, cfg.solver);
  res.objective = wasserstein_objective(res.theta_star, p, data, cfg.alpha);
  res.residual_norm =
      std::sqrt(detail::sum_squares(detail::residuals(res.theta_star, data)));
  res.lambda_star = dual_lambda(res.theta_star, data, cfg.alpha);

  if (res.lambda_star > 0.0) {
    res.q_star = toxic_distribution(res.theta_star, res.lambda_star, p, data);
  } else {
    res.q_star = p;  // interpolating theta*, nothing to gain
    res.degenerate = true;
  }

  std::vector<double> scaled(res.q_star.size());
  for (std::size_t e = 0; e < scaled.size(); ++e)
    scaled[e] = total * (1.0 + cfg.kappa) * res.q_star[e];
  res.poisoned_weights = round_weights(scaled, cfg.rounding);
  return res;
}

}  // namespace rankpoison
