#pragma once

// Random perturbation baseline. Deletes a fraction of the existing votes
// (uniformly, without replacement over the vote multiset) and injects a
// fraction of new votes on uniformly random slots, with no knowledge of the
// true ranking. Optional hard caps bound the l1 and per-slot change; an
// operation that would break a cap is skipped and counted as truncated.

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "rankpoison/core.hpp"

namespace rankpoison {

struct RandomAttackConfig {
  double s1 = 0.0;  // fraction of M0 to inject
  double s2 = 0.0;  // fraction of M0 to delete
  std::optional<std::int64_t> b;  // l1 cap on total change
  std::optional<std::int64_t> l;  // per-slot cap on change
  std::uint64_t seed = 0;

  void validate() const {
    if (!(s1 >= 0.0 && s1 <= 1.0 && s2 >= 0.0 && s2 <= 1.0))
      throw std::invalid_argument("RandomAttackConfig: s1, s2 in [0,1]");
    if ((b && *b < 1) || (l && *l < 1))
      throw std::invalid_argument("RandomAttackConfig: caps must be positive");
  }
};

struct RandomAttackResult {
  ComparisonDataset poisoned{2};
  std::int64_t deleted = 0;
  std::int64_t injected = 0;
  std::int64_t truncated = 0;  // operations dropped because of b/l caps
};

inline RandomAttackResult run_random_attack(const ComparisonDataset& data,
                                            const RandomAttackConfig& cfg) {
  cfg.validate();
  const std::int64_t total = data.total_votes();
  if (total <= 0)
    throw DegenerateInputError("run_random_attack: dataset has no votes");

  std::mt19937_64 rng(cfg.seed);
  Weights w = data.weights();
  std::vector<std::int64_t> delta(w.size(), 0);
  std::int64_t l1 = 0;

  RandomAttackResult res;

  // Applies +/-1 on a slot unless a cap would break; returns success.
  auto apply = [&](std::size_t e, std::int64_t d) {
    const std::int64_t nd = delta[e] + d;
    if (cfg.l && std::abs(nd) > *cfg.l) return false;
    const std::int64_t nl1 = l1 - std::abs(delta[e]) + std::abs(nd);
    if (cfg.b && nl1 > *cfg.b) return false;
    delta[e] = nd;
    l1 = nl1;
    w[e] += d;
    return true;
  };

  const std::int64_t to_delete = round_half_even(cfg.s2 * static_cast<double>(total));
  std::int64_t pool = total;
  for (std::int64_t k = 0; k < to_delete && pool > 0; ++k) {
    // Uniform vote from the remaining multiset, skipping capped slots.
    std::int64_t eligible = 0;
    for (std::size_t e = 0; e < w.size(); ++e) {
      const bool capped = cfg.l && std::abs(delta[e] - 1) > *cfg.l;
      if (!capped && w[e] > 0) eligible += w[e];
    }
    if (eligible == 0 || (cfg.b && l1 >= *cfg.b)) {
      res.truncated += to_delete - k;
      break;
    }
    std::int64_t r = draw_below(rng, eligible);
    for (std::size_t e = 0; e < w.size(); ++e) {
      const bool capped = cfg.l && std::abs(delta[e] - 1) > *cfg.l;
      if (capped || w[e] == 0) continue;
      if (r < w[e]) {
        if (apply(e, -1)) {
          ++res.deleted;
          --pool;
        } else {
          ++res.truncated;
        }
        break;
      }
      r -= w[e];
    }
  }

  const std::int64_t to_inject = round_half_even(cfg.s1 * static_cast<double>(total));
  for (std::int64_t k = 0; k < to_inject; ++k) {
    const auto e =
        static_cast<std::size_t>(draw_below(rng, static_cast<std::int64_t>(w.size())));
    if (apply(e, +1))
      ++res.injected;
    else
      ++res.truncated;
  }

  res.poisoned = data.with_weights(std::move(w));
  return res;
}

}  // namespace rankpoison
