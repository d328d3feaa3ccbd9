#pragma once

// Ranking quality measures between an aggregated ranking and a reference.
//
// Kendall-tau and reciprocal rank are convention free. P@K uses plain set
// overlap of the top-K. AP@K treats membership in the truth's top-K as the
// binary relevance and divides by K. NDCG@K uses the linear gain
// n - truth_rank with a log2 position discount; the ideal list orders items
// by gain. All of them read rank positions only, never raw scores.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rankpoison/core.hpp"

namespace rankpoison {

namespace detail {
inline void check_same_n(const RankingList& a, const RankingList& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("rankings must cover the same items");
}

inline void check_k(const RankingList& a, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > a.size())
    throw std::invalid_argument("k out of range");
}
}  // namespace detail

// (2 / n(n-1)) * sum_{i<j} sign((rank1_i - rank1_j)(rank2_i - rank2_j)).
inline double kendall_tau(const RankingList& pi1, const RankingList& pi2) {
  detail::check_same_n(pi1, pi2);
  const int n = static_cast<int>(pi1.size());
  std::int64_t acc = 0;
  for (int i = 0; i < n - 1; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int d1 = pi1.rank_of[i] - pi1.rank_of[j];
      const int d2 = pi2.rank_of[i] - pi2.rank_of[j];
      const std::int64_t prod = static_cast<std::int64_t>(d1) * d2;
      acc += (prod > 0) - (prod < 0);
    }
  }
  return 2.0 * static_cast<double>(acc) /
         (static_cast<double>(n) * static_cast<double>(n - 1));
}

// 1 / position of the truth's top item inside `other`.
inline double reciprocal_rank(const RankingList& truth, const RankingList& other) {
  detail::check_same_n(truth, other);
  return 1.0 / static_cast<double>(other.rank_of[truth.order[0]]);
}

// |top-k(truth) intersect top-k(other)| / k.
inline double precision_at_k(const RankingList& truth, const RankingList& other,
                             int k) {
  detail::check_same_n(truth, other);
  detail::check_k(truth, k);
  int hits = 0;
  for (int pos = 0; pos < k; ++pos)
    if (truth.rank_of[other.order[pos]] <= k) ++hits;
  return static_cast<double>(hits) / static_cast<double>(k);
}

// (1/k) * sum_{j<=k} rel(j) * P@j over `other`'s prefix, rel(j) being
// membership of other[j] in the truth's top-k.
inline double average_precision_at_k(const RankingList& truth,
                                     const RankingList& other, int k) {
  detail::check_same_n(truth, other);
  detail::check_k(truth, k);
  int hits = 0;
  double acc = 0.0;
  for (int pos = 1; pos <= k; ++pos) {
    const bool rel = truth.rank_of[other.order[pos - 1]] <= k;
    if (rel) {
      ++hits;
      acc += static_cast<double>(hits) / static_cast<double>(pos);
    }
  }
  return acc / static_cast<double>(k);
}

// DCG@k(other) / DCG@k(ideal) with gain(item) = n - truth_rank(item).
inline double ndcg_at_k(const RankingList& truth, const RankingList& other, int k) {
  detail::check_same_n(truth, other);
  detail::check_k(truth, k);
  const int n = static_cast<int>(truth.size());
  auto dcg = [&](const RankingList& list) {
    double acc = 0.0;
    for (int pos = 1; pos <= k; ++pos) {
      const double gain = static_cast<double>(n - truth.rank_of[list.order[pos - 1]]);
      acc += gain / std::log2(static_cast<double>(pos) + 1.0);
    }
    return acc;
  };
  // The ideal list orders items by gain, which is the truth order itself.
  const double ideal = dcg(truth);
  return ideal > 0.0 ? dcg(other) / ideal : 0.0;
}

struct MetricReport {
  double kendall_tau = 0.0;
  double r_rank = 0.0;
  double p_at_k = 0.0;
  double ap_at_k = 0.0;
  double ndcg_at_k = 0.0;
  int k = 0;
};

inline MetricReport evaluate_ranking(const RankingList& truth,
                                     const RankingList& other, int k) {
  MetricReport r;
  r.kendall_tau = kendall_tau(truth, other);
  r.r_rank = reciprocal_rank(truth, other);
  r.p_at_k = precision_at_k(truth, other, k);
  r.ap_at_k = average_precision_at_k(truth, other, k);
  r.ndcg_at_k = ndcg_at_k(truth, other, k);
  r.k = k;
  return r;
}

}  // namespace rankpoison
