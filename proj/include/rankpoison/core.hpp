#pragma once

// Core data model for rank estimation from pairwise comparisons.
//
// The design is fixed over all N = n(n-1) ordered pairs: slot (i, j)
// counts votes saying "i beats j", its label is the constant 1, and its
// design row is +1 at i, -1 at j. Attacks and aggregation only ever move
// the weight vector; labels and rows never change.
//
// Slot order is lexicographic over ordered pairs (i, j), i != j. This
// order is part of the CSV file contract, do not change it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rankpoison {

using Weights = std::vector<std::int64_t>;

// Raised when an operation receives data it cannot work with at all,
// e.g. aggregation over an all-zero weight vector.
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::size_t num_slots(int n) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1);
}

// Lexicographic slot index of the ordered pair (i, j), i != j.
inline std::size_t slot_index(int n, int i, int j) {
  return static_cast<std::size_t>(i) * (n - 1) +
         static_cast<std::size_t>(j < i ? j : j - 1);
}

// Inverse of slot_index.
inline std::pair<int, int> slot_pair(int n, std::size_t slot) {
  const int i = static_cast<int>(slot / (n - 1));
  const int r = static_cast<int>(slot % (n - 1));
  return {i, r < i ? r : r + 1};
}

struct ItemSet {
  int n;

  explicit ItemSet(int count) : n(count) {
    if (n < 2) throw std::invalid_argument("ItemSet: need at least 2 items");
  }
};

// All N ordered-pair slots with nonnegative integer vote counts.
// Immutable after construction; labels are implicitly all ones.
class ComparisonDataset {
 public:
  explicit ComparisonDataset(int n) : n_(check_n(n)), weights_(num_slots(n), 0) {}

  ComparisonDataset(int n, Weights weights)
      : n_(check_n(n)), weights_(std::move(weights)) {
    if (weights_.size() != num_slots(n_))
      throw std::invalid_argument("ComparisonDataset: weight vector has wrong length");
    for (auto w : weights_)
      if (w < 0) throw std::invalid_argument("ComparisonDataset: negative weight");
  }

  int item_count() const { return n_; }
  std::size_t slot_count() const { return weights_.size(); }
  const Weights& weights() const { return weights_; }

  std::int64_t weight(int i, int j) const { return weights_[slot_index(n_, i, j)]; }

  std::int64_t total_votes() const {
    return std::accumulate(weights_.begin(), weights_.end(), std::int64_t{0});
  }

  ComparisonDataset with_weights(Weights weights) const {
    return ComparisonDataset(n_, std::move(weights));
  }

  bool operator==(const ComparisonDataset& other) const {
    return n_ == other.n_ && weights_ == other.weights_;
  }

 private:
  static int check_n(int n) {
    if (n < 2) throw std::invalid_argument("ComparisonDataset: need at least 2 items");
    return n;
  }

  int n_;
  Weights weights_;
};

// Builds the empty full design over n items: N slots, all weights zero.
inline ComparisonDataset build_full_design(int n) { return ComparisonDataset(n); }

// Nonnegative real weights over the N pair slots; the relaxed attack
// variable. The normalized flag is validated at construction, never assumed.
class FrequencyVector {
 public:
  explicit FrequencyVector(std::vector<double> values)
      : values_(std::move(values)), normalized_(false) {
    check_nonnegative();
  }

  static FrequencyVector normalized(std::vector<double> values) {
    FrequencyVector f(std::move(values));
    const double s = f.sum();
    if (std::abs(s - 1.0) > 1e-9)
      throw std::invalid_argument("FrequencyVector: not normalized, sum = " +
                                  std::to_string(s));
    f.normalized_ = true;
    return f;
  }

  static FrequencyVector from_weights(const Weights& w) {
    std::vector<double> v(w.begin(), w.end());
    return FrequencyVector(std::move(v));
  }

  // Empirical frequency p = w / M0 of a dataset with positive total weight.
  static FrequencyVector empirical(const ComparisonDataset& data) {
    const double total = static_cast<double>(data.total_votes());
    if (total <= 0)
      throw std::invalid_argument("FrequencyVector: dataset has no votes");
    std::vector<double> v(data.slot_count());
    for (std::size_t e = 0; e < v.size(); ++e)
      v[e] = static_cast<double>(data.weights()[e]) / total;
    return normalized(std::move(v));
  }

  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t e) const { return values_[e]; }
  std::size_t size() const { return values_.size(); }
  bool is_normalized() const { return normalized_; }
  double sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

 private:
  void check_nonnegative() const {
    for (double v : values_)
      if (!(v >= 0.0))
        throw std::invalid_argument("FrequencyVector: negative or NaN entry");
  }

  std::vector<double> values_;
  bool normalized_;
};

// Quality scores over the n items. The loss is invariant under adding a
// constant, so the canonical representative is mean zero.
struct ScoreVector {
  std::vector<double> theta;

  ScoreVector() = default;
  explicit ScoreVector(std::vector<double> t) : theta(std::move(t)) {}

  std::size_t size() const { return theta.size(); }
  double operator[](std::size_t i) const { return theta[i]; }

  double mean() const {
    if (theta.empty()) return 0.0;
    return std::accumulate(theta.begin(), theta.end(), 0.0) /
           static_cast<double>(theta.size());
  }

  ScoreVector centered() const {
    ScoreVector out(*this);
    const double m = mean();
    for (double& t : out.theta) t -= m;
    return out;
  }
};

// Residual of slot (i, j) at theta: y' - theta_i + theta_j with y' = 1.
inline double slot_residual(const ScoreVector& theta, int n, std::size_t slot) {
  const auto [i, j] = slot_pair(n, slot);
  return 1.0 - theta[i] + theta[j];
}

// (1/2N) sum_e q_e (y'_e - theta_i + theta_j)^2.
inline double weighted_loss(const ScoreVector& theta, const FrequencyVector& freq,
                            const ComparisonDataset& data) {
  const int n = data.item_count();
  const std::size_t N = data.slot_count();
  if (theta.size() != static_cast<std::size_t>(n) || freq.size() != N)
    throw std::invalid_argument("weighted_loss: dimension mismatch");
  double acc = 0.0;
  for (std::size_t e = 0; e < N; ++e) {
    const double r = slot_residual(theta, n, e);
    acc += freq[e] * r * r;
  }
  return acc / (2.0 * static_cast<double>(N));
}

// A permutation of the items, best first, with a 1-based inverse map.
struct RankingList {
  std::vector<int> order;    // order[0] is the best item
  std::vector<int> rank_of;  // rank_of[item] in 1..n

  static RankingList from_order(std::vector<int> order) {
    RankingList r;
    r.rank_of.assign(order.size(), 0);
    r.order = std::move(order);
    std::vector<bool> seen(r.order.size(), false);
    for (std::size_t pos = 0; pos < r.order.size(); ++pos) {
      const int item = r.order[pos];
      if (item < 0 || item >= static_cast<int>(r.order.size()) || seen[item])
        throw std::invalid_argument("RankingList: order is not a permutation");
      seen[item] = true;
      r.rank_of[item] = static_cast<int>(pos) + 1;
    }
    return r;
  }

  std::size_t size() const { return order.size(); }
};

// Descending sort of theta; equal scores break ties by ascending item index.
inline RankingList rank_from_scores(const ScoreVector& theta) {
  std::vector<int> order(theta.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&theta](int a, int b) {
    return theta[a] > theta[b];
  });
  return RankingList::from_order(std::move(order));
}

// Budget knobs shared by the attack modules.
struct AttackBudget {
  double alpha = 0.0;         // distributional uncertainty budget (also rho)
  double kappa = 0.0;         // maximum relative growth of the vote total
  std::int64_t b = 0;         // l1 cap on weight changes, 0 = unset
  std::int64_t l = 0;         // per-slot cap on weight changes, 0 = unset
  double s1 = 0.0, s2 = 0.0;  // random baseline inject/delete fractions
};

enum class Rounding { nearest, floor, ceil, largest_remainder };

inline Rounding rounding_from_string(const std::string& s) {
  if (s == "nearest") return Rounding::nearest;
  if (s == "floor") return Rounding::floor;
  if (s == "ceil") return Rounding::ceil;
  if (s == "largest-remainder") return Rounding::largest_remainder;
  throw std::invalid_argument("unknown rounding mode: " + s);
}

inline std::string to_string(Rounding r) {
  switch (r) {
    case Rounding::nearest: return "nearest";
    case Rounding::floor: return "floor";
    case Rounding::ceil: return "ceil";
    case Rounding::largest_remainder: return "largest-remainder";
  }
  return "?";
}

// Rounds fractional weights to integers. Largest-remainder preserves
// floor(sum w) exactly; the others work slot by slot. Negative inputs clamp
// to zero first.
inline Weights round_weights(const std::vector<double>& w, Rounding mode) {
  Weights out(w.size(), 0);
  if (mode == Rounding::largest_remainder) {
    double total = 0.0;
    std::vector<double> frac(w.size());
    for (std::size_t e = 0; e < w.size(); ++e) {
      const double v = std::max(0.0, w[e]);
      total += v;
      out[e] = static_cast<std::int64_t>(std::floor(v));
      frac[e] = v - std::floor(v);
    }
    const auto target = static_cast<std::int64_t>(std::floor(total + 1e-9));
    std::int64_t assigned = std::accumulate(out.begin(), out.end(), std::int64_t{0});
    std::vector<std::size_t> idx(w.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&frac](std::size_t a, std::size_t b) {
      if (frac[a] != frac[b]) return frac[a] > frac[b];
      return a < b;  // deterministic tie break
    });
    for (std::size_t k = 0; k < idx.size() && assigned < target; ++k, ++assigned)
      ++out[idx[k]];
    return out;
  }
  for (std::size_t e = 0; e < w.size(); ++e) {
    const double v = std::max(0.0, w[e]);
    double r = 0.0;
    switch (mode) {
      case Rounding::nearest: r = std::floor(v + 0.5); break;
      case Rounding::floor: r = std::floor(v); break;
      case Rounding::ceil: r = std::ceil(v); break;
      default: break;
    }
    out[e] = static_cast<std::int64_t>(r);
  }
  return out;
}

// Nearest integer with half-to-even tie break; used wherever a fractional
// count must become deterministic.
inline std::int64_t round_half_even(double x) {
  const double f = std::floor(x);
  const double frac = x - f;
  auto lo = static_cast<std::int64_t>(f);
  if (frac > 0.5) return lo + 1;
  if (frac < 0.5) return lo;
  return (lo % 2 == 0) ? lo : lo + 1;
}

// Bounded draw from a raw 64-bit generator. The tiny modulo bias is
// irrelevant here; what matters is identical output on every platform.
template <typename Rng>
std::int64_t draw_below(Rng& rng, std::int64_t m) {
  return static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(m));
}

// Splits votes of a dataset into those agreeing with a reference ranking
// and those conflicting with it.
struct ConsistencySplit {
  std::int64_t consistent = 0;
  std::int64_t conflicting = 0;
};

inline ConsistencySplit split_by_consistency(const ComparisonDataset& data,
                                             const RankingList& truth) {
  ConsistencySplit s;
  const int n = data.item_count();
  for (std::size_t e = 0; e < data.slot_count(); ++e) {
    const auto [i, j] = slot_pair(n, e);
    if (truth.rank_of[i] < truth.rank_of[j])
      s.consistent += data.weights()[e];
    else
      s.conflicting += data.weights()[e];
  }
  return s;
}

}  // namespace rankpoison
