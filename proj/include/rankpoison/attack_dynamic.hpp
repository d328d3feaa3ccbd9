#pragma once

// Dynamic (leader-follower) poisoning attack.
//
// With full knowledge of the ranker's current scores the attacker picks the
// worst frequency vector q inside a chi-square ball around the empirical
// frequency p:
//
//   maximize <q, z>   s.t.  (1/2)||q - p||^2 <= rho ||p||^2,  q >= 0,  sum q = 1,
//
// where z_e is the per-slot loss contribution at the current fit. The inner
// problem is solved through its dual: for a penalty mu the optimal q is the
// Euclidean projection of v = p - z~/mu onto the probability simplex (z~ is
// the negated, centered objective vector), and mu is found by bisecting the
// sign of g'(mu) = (1/2)||q(mu) - p||^2 - rho ||p||^2, which is nonincreasing
// in mu. The bracket keeps g'(mu_hi) <= 0, and the returned q is evaluated at
// mu_hi, so the ball constraint holds on every call up to float rounding.
//
// find_shift computes the exact projection shift eta with sum (v - eta)+ = 1.
// When p is uniform the given z-ascending order already sorts v descending
// and the prefix sums of z shortcut the search; for general p the slots are
// re-ranked by v, which costs O(N log N) per call and keeps the projection
// exact. One leader-follower round is the default, matching the evaluation
// protocol.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rankpoison/aggregate.hpp"
#include "rankpoison/core.hpp"

namespace rankpoison {

struct DynamicAttackConfig {
  double rho = 1e-3;
  double kappa = 0.0;
  double epsilon = 1e-10;  // relative bisection accuracy
  int max_rounds = 1;
  Rounding rounding = Rounding::nearest;
  bool robust = false;     // use the outlier-aware ranker for z
  double lambda = 0.1;     // robust ranker sparsity weight
  RidgeConfig ridge;

  void validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("DynamicAttackConfig: rho > 0");
    if (!(epsilon > 0.0))
      throw std::invalid_argument("DynamicAttackConfig: epsilon > 0");
    if (kappa < 0.0) throw std::invalid_argument("DynamicAttackConfig: kappa >= 0");
    if (max_rounds < 1)
      throw std::invalid_argument("DynamicAttackConfig: max_rounds >= 1");
    ridge.validate();
  }
};

// Membership test for the constraint set around a normalized center.
struct ChiSquareBall {
  FrequencyVector center;
  double rho;

  ChiSquareBall(FrequencyVector p, double radius)
      : center(std::move(p)), rho(radius) {
    if (!center.is_normalized())
      throw std::invalid_argument("ChiSquareBall: center must be normalized");
    if (!(rho > 0.0)) throw std::invalid_argument("ChiSquareBall: rho > 0");
  }

  bool contains(const FrequencyVector& q, double slack = 1e-9) const {
    if (q.size() != center.size()) return false;
    double dev = 0.0, sum = 0.0, norm = 0.0;
    for (std::size_t e = 0; e < q.size(); ++e) {
      if (q[e] < 0.0) return false;
      const double d = q[e] - center[e];
      dev += d * d;
      sum += q[e];
      norm += center[e] * center[e];
    }
    return std::abs(sum - 1.0) <= slack && 0.5 * dev <= rho * norm + slack;
  }
};

// Per-slot loss contributions z_e = (1/2)(y_e - gamma_e - theta_i + theta_j)^2
// + lambda |gamma_e| at the current fit; gamma = 0 gives the plain squared
// residual halves.
inline std::vector<double> edge_objective(const ScoreVector& theta,
                                          const std::vector<double>* gamma,
                                          double lambda,
                                          const ComparisonDataset& data) {
  if (theta.size() != static_cast<std::size_t>(data.item_count()))
    throw std::invalid_argument("edge_objective: dimension mismatch");
  if (gamma && gamma->size() != data.slot_count())
    throw std::invalid_argument("edge_objective: gamma length mismatch");
  std::vector<double> z(data.slot_count());
  for (std::size_t e = 0; e < z.size(); ++e) {
    const double g = gamma ? (*gamma)[e] : 0.0;
    const double r = slot_residual(theta, data.item_count(), e) - g;
    z[e] = 0.5 * r * r + (gamma ? lambda * std::abs(g) : 0.0);
  }
  return z;
}

inline std::vector<double> edge_objective(const ScoreVector& theta,
                                          const ComparisonDataset& data) {
  return edge_objective(theta, nullptr, 0.0, data);
}

struct ShiftResult {
  double eta = 0.0;
  std::size_t index = 0;  // support size of the projection, 1-based
};

namespace detail {

// Binary search for the support boundary of the projection of v (sorted
// nonincreasing, prefix sums V): the unique k with
// sum_{j<=k}(v_j - v_k) < 1 <= sum_{j<=k+1}(v_j - v_{k+1}), k = N if none.
inline std::size_t projection_support(const std::vector<double>& v_sorted,
                                      const std::vector<double>& v_prefix) {
  const std::size_t N = v_sorted.size();
  auto gap = [&](std::size_t k) {  // sum_{j<=k}(v_j - v_k), nondecreasing in k
    return v_prefix[k - 1] - static_cast<double>(k) * v_sorted[k - 1];
  };
  if (gap(N) < 1.0) return N;
  std::size_t lo = 1, hi = N;  // gap(lo) < 1 <= gap(hi)
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (gap(mid) < 1.0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace detail

// Projection shift for v = p - z/mu: finds (eta, k) with sum (v - eta)+ = 1,
// eta = (sum of the k largest v - 1)/k. Expects z sorted ascending with zero
// mean, p aligned to the same slot order, cumsum the prefix sums of z.
inline ShiftResult find_shift(const std::vector<double>& z_sorted,
                              const std::vector<double>& p,
                              const std::vector<double>& cumsum, double mu) {
  const std::size_t N = z_sorted.size();
  if (p.size() != N || cumsum.size() != N || N == 0)
    throw std::invalid_argument("find_shift: dimension mismatch");
  if (!(mu > 0.0)) throw std::invalid_argument("find_shift: mu > 0 required");

  std::vector<double> v(N);
  for (std::size_t e = 0; e < N; ++e) v[e] = p[e] - z_sorted[e] / mu;

  std::vector<double> v_sorted, v_prefix(N);
  if (std::is_sorted(v.rbegin(), v.rend())) {
    // Uniform p keeps v nonincreasing in the given z order; the prefix sums
    // of z then give the v prefix sums directly.
    v_sorted = v;
    double p_prefix = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      p_prefix += p[k];
      v_prefix[k] = p_prefix - cumsum[k] / mu;
    }
  } else {
    std::vector<std::size_t> idx(N);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&v](std::size_t a, std::size_t b) {
      if (v[a] != v[b]) return v[a] > v[b];
      return a < b;
    });
    v_sorted.resize(N);
    double acc = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      v_sorted[k] = v[idx[k]];
      acc += v_sorted[k];
      v_prefix[k] = acc;
    }
  }

  ShiftResult out;
  out.index = detail::projection_support(v_sorted, v_prefix);
  out.eta = (v_prefix[out.index - 1] - 1.0) / static_cast<double>(out.index);
  return out;
}

struct WorstCaseResult {
  FrequencyVector q{std::vector<double>{}};
  double mu = 0.0;
  double eta = 0.0;
  std::size_t support = 0;
  double objective = 0.0;  // <q, z> in the caller's orientation
  int bisection_iters = 0;
  double constraint_gap = 0.0;  // (1/2)||q-p||^2 - rho ||p||^2, <= 0 up to fp
};

// Worst-case frequency in the chi-square ball: maximizes <q, z> subject to
// membership. z is negated internally so the projection machinery, which
// minimizes, delivers the maximizer. A constant z carries no incentive and
// returns p unchanged.
inline WorstCaseResult worst_case_frequency(const std::vector<double>& z,
                                            const FrequencyVector& p, double rho,
                                            double epsilon) {
  const std::size_t N = z.size();
  if (p.size() != N || N == 0)
    throw std::invalid_argument("worst_case_frequency: dimension mismatch");
  if (!p.is_normalized())
    throw std::invalid_argument("worst_case_frequency: p must be normalized");
  if (!(rho > 0.0) || !(epsilon > 0.0))
    throw std::invalid_argument("worst_case_frequency: rho, epsilon > 0 required");

  WorstCaseResult res;
  const auto [zmin, zmax] = std::minmax_element(z.begin(), z.end());
  if (*zmax - *zmin <= 1e-15 * std::max(1.0, std::abs(*zmax))) {
    res.q = p;
    res.objective = std::inner_product(z.begin(), z.end(), p.values().begin(), 0.0);
    return res;
  }

  // Negate, center, sort ascending (ties by slot index), carry p along.
  std::vector<double> zt(N);
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= static_cast<double>(N);
  for (std::size_t e = 0; e < N; ++e) zt[e] = -(z[e] - mean);

  std::vector<std::size_t> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&zt](std::size_t a, std::size_t b) {
    if (zt[a] != zt[b]) return zt[a] < zt[b];
    return a < b;
  });
  std::vector<double> zs(N), ps(N), cumsum(N);
  for (std::size_t k = 0; k < N; ++k) {
    zs[k] = zt[idx[k]];
    ps[k] = p[idx[k]];
  }
  double acc = 0.0, znorm_sq = 0.0, zinf = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    acc += zs[k];
    cumsum[k] = acc;
    znorm_sq += zs[k] * zs[k];
    zinf = std::max(zinf, std::abs(zs[k]));
  }

  double pnorm_sq = 0.0;
  for (std::size_t e = 0; e < N; ++e) pnorm_sq += p[e] * p[e];
  const double radius = rho * pnorm_sq;

  // ||q(mu) - p|| <= ||z~||/mu, so g'(mu_inf) <= 0 is guaranteed by the
  // second term of the bracket cap.
  const double mu_inf = std::max(zinf, std::sqrt(znorm_sq / (2.0 * radius)));

  auto project = [&](double mu, ShiftResult& shift, std::vector<double>& q_sorted) {
    shift = find_shift(zs, ps, cumsum, mu);
    q_sorted.resize(N);
    double dev = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const double qk = std::max(0.0, ps[k] - zs[k] / mu - shift.eta);
      q_sorted[k] = qk;
      const double d = qk - ps[k];
      dev += d * d;
    }
    return 0.5 * dev - radius;  // g'(mu)
  };

  double mu_lo = 0.0, mu_hi = mu_inf;
  ShiftResult shift;
  std::vector<double> q_sorted;
  int iters = 0;
  while (mu_hi - mu_lo > epsilon * mu_inf) {
    const double mu = 0.5 * (mu_lo + mu_hi);
    const double gprime = project(mu, shift, q_sorted);
    (gprime > 0.0 ? mu_lo : mu_hi) = mu;
    ++iters;
  }
  // Evaluate at the feasible end of the bracket so membership always holds.
  res.constraint_gap = project(mu_hi, shift, q_sorted);
  res.mu = mu_hi;
  res.eta = shift.eta;
  res.support = shift.index;
  res.bisection_iters = iters;

  std::vector<double> q(N);
  for (std::size_t k = 0; k < N; ++k) q[idx[k]] = q_sorted[k];
  res.objective = std::inner_product(z.begin(), z.end(), q.begin(), 0.0);
  res.q = FrequencyVector::normalized(std::move(q));
  return res;
}

struct DynamicAttackResult {
  ComparisonDataset poisoned{2};
  int rounds = 0;
  WorstCaseResult last_worst_case;
  ScoreVector last_scores;
};

// Leader-follower loop: fit the ranker on the current weights, score every
// slot, move the frequency to the worst case in the ball around the original
// empirical frequency, scale by (1+kappa) M0, round, repeat until the
// weights stop changing or max_rounds is hit.
inline DynamicAttackResult run_dynamic_attack(const ComparisonDataset& data,
                                              const DynamicAttackConfig& cfg) {
  cfg.validate();
  const auto total = static_cast<double>(data.total_votes());
  if (total <= 0.0)
    throw DegenerateInputError("run_dynamic_attack: dataset has no votes");

  const FrequencyVector p = FrequencyVector::empirical(data);
  DynamicAttackResult res;
  res.poisoned = data;

  for (int round = 0; round < cfg.max_rounds; ++round) {
    std::vector<double> z;
    if (cfg.robust) {
      RobustConfig rc;
      rc.lambda = cfg.lambda;
      const RobustFit fit = aggregate_robust(res.poisoned, rc, cfg.ridge);
      res.last_scores = fit.scores;
      z = edge_objective(fit.scores, &fit.gamma, cfg.lambda, res.poisoned);
    } else {
      res.last_scores = aggregate(res.poisoned, cfg.ridge);
      z = edge_objective(res.last_scores, res.poisoned);
    }

    res.last_worst_case = worst_case_frequency(z, p, cfg.rho, cfg.epsilon);
    std::vector<double> scaled(res.last_worst_case.q.size());
    for (std::size_t e = 0; e < scaled.size(); ++e)
      scaled[e] = total * (1.0 + cfg.kappa) * res.last_worst_case.q[e];
    Weights next = round_weights(scaled, cfg.rounding);
    res.rounds = round + 1;
    if (next == res.poisoned.weights()) break;
    res.poisoned = data.with_weights(std::move(next));
  }
  return res;
}

}  // namespace rankpoison
