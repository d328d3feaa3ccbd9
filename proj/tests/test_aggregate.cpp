#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "rankpoison/aggregate.hpp"
#include "rankpoison/data_io.hpp"
#include "rankpoison/metrics.hpp"

using namespace rankpoison;

namespace {

std::vector<double> random_weights(int n, std::mt19937_64& rng, double scale = 10.0) {
  std::uniform_real_distribution<double> unif(0.0, scale);
  std::vector<double> w(num_slots(n));
  for (auto& v : w) v = unif(rng);
  return w;
}

}  // namespace

TEST_CASE("aggregate on a single comparison") {
  Weights w(num_slots(2), 0);
  w[slot_index(2, 0, 1)] = 1;
  const ComparisonDataset d(2, w);
  const ScoreVector theta = aggregate(d);
  CHECK_THAT(theta[0], Catch::Matchers::WithinAbs(0.5, 1e-6));
  CHECK_THAT(theta[1], Catch::Matchers::WithinAbs(-0.5, 1e-6));
}

TEST_CASE("aggregate matches the explicit design-matrix solve") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 3;
    const ComparisonDataset d = build_full_design(n);
    const auto w = random_weights(n, rng);
    const ScoreVector fast = aggregate(d, w);
    const ScoreVector slow = oracles::explicit_design_solve(d, w, 1e-8);
    for (int i = 0; i < n; ++i)
      CHECK_THAT(fast[i], Catch::Matchers::WithinAbs(slow[i], 1e-9));
  }
}

TEST_CASE("aggregate satisfies its normal equations") {
  std::mt19937_64 rng(37);
  const int n = 8;
  const ComparisonDataset d = build_full_design(n);
  const auto w = random_weights(n, rng);
  const double delta = 1e-8;
  const ScoreVector theta = aggregate(d, w, RidgeConfig{delta});

  // residual of (B'WB + delta I) theta = B'W y, assembled independently
  std::vector<double> lhs(n, 0.0), rhs(n, 0.0);
  for (std::size_t e = 0; e < d.slot_count(); ++e) {
    const auto [i, j] = slot_pair(n, e);
    const double diff = theta[i] - theta[j];
    lhs[i] += w[e] * diff;
    lhs[j] -= w[e] * diff;
    rhs[i] += w[e];
    rhs[j] -= w[e];
  }
  double rhs_inf = 0.0, res_inf = 0.0;
  for (int i = 0; i < n; ++i) {
    lhs[i] += delta * theta[i];
    rhs_inf = std::max(rhs_inf, std::abs(rhs[i]));
    res_inf = std::max(res_inf, std::abs(lhs[i] - rhs[i]));
  }
  CHECK(res_inf <= 1e-8 * (1.0 + rhs_inf));
}

TEST_CASE("weight scaling leaves the argmin unchanged") {
  std::mt19937_64 rng(41);
  const int n = 5;
  const ComparisonDataset d = build_full_design(n);
  const auto w = random_weights(n, rng);
  const double c = 7.5;
  std::vector<double> scaled(w);
  for (auto& v : scaled) v *= c;
  const ScoreVector base = aggregate(d, w, RidgeConfig{1e-8});
  const ScoreVector same = aggregate(d, scaled, RidgeConfig{c * 1e-8});
  for (int i = 0; i < n; ++i)
    CHECK_THAT(same[i], Catch::Matchers::WithinAbs(base[i], 1e-10));
}

TEST_CASE("aggregate output is mean zero") {
  std::mt19937_64 rng(43);
  const ComparisonDataset d = build_full_design(6);
  const ScoreVector theta = aggregate(d, random_weights(6, rng));
  CHECK_THAT(theta.mean(), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("all-zero weights are degenerate") {
  const ComparisonDataset d = build_full_design(4);
  CHECK_THROWS_AS(aggregate(d), DegenerateInputError);
}

TEST_CASE("noiseless aggregation recovers the planted order") {
  SyntheticConfig cfg;
  cfg.n = 10;
  cfg.total_votes = 2000;
  cfg.noise_fraction = 0.0;
  cfg.seed = 1;
  const SyntheticData s = generate_synthetic(cfg);
  const RankingList ranked = rank_from_scores(aggregate(s.data));
  CHECK(kendall_tau(s.ground_truth, ranked) == 1.0);
}

TEST_CASE("robust aggregation") {
  SECTION("large lambda reduces to the plain solve with zero gamma") {
    std::mt19937_64 rng(47);
    const int n = 4;
    const ComparisonDataset d = build_full_design(n);
    const auto w = random_weights(n, rng);
    RobustConfig cfg;
    cfg.lambda = 100.0;  // above any residual magnitude
    const RobustFit fit = aggregate_robust(d, w, cfg);
    const ScoreVector plain = aggregate(d, w);
    for (double g : fit.gamma) CHECK(g == 0.0);
    for (int i = 0; i < n; ++i)
      CHECK_THAT(fit.scores[i], Catch::Matchers::WithinAbs(plain[i], 1e-9));
  }

  SECTION("lambda zero absorbs the whole residual into gamma") {
    std::mt19937_64 rng(53);
    const int n = 4;
    const ComparisonDataset d = build_full_design(n);
    const auto w = random_weights(n, rng, 5.0);
    RobustConfig cfg;
    cfg.lambda = 0.0;
    const RobustFit fit = aggregate_robust(d, w, cfg);
    for (std::size_t e = 0; e < d.slot_count(); ++e) {
      if (w[e] == 0.0) continue;
      const double r = slot_residual(fit.scores, n, e);
      CHECK_THAT(fit.gamma[e], Catch::Matchers::WithinAbs(r, 1e-9));
    }
  }

  SECTION("objective is nonincreasing across iterations") {
    std::mt19937_64 rng(59);
    const int n = 5;
    const ComparisonDataset d = build_full_design(n);
    const auto w = random_weights(n, rng);
    RobustConfig cfg;
    cfg.lambda = 0.3;
    const RobustFit fit = aggregate_robust(d, w, cfg);
    for (std::size_t t = 1; t < fit.objective_trace.size(); ++t)
      CHECK(fit.objective_trace[t] <= fit.objective_trace[t - 1] + 1e-12);
  }

  SECTION("one flipped edge is caught by gamma and matches a grid search") {
    // Truth 0 > 1 > 2 with solid votes, except the (2,0) direction is
    // flipped hard. Small lambda should park the conflict in gamma only.
    const int n = 3;
    Weights w(num_slots(n), 0);
    w[slot_index(n, 0, 1)] = 10;
    w[slot_index(n, 1, 2)] = 10;
    w[slot_index(n, 2, 0)] = 10;  // conflicts with 0 > 2
    const ComparisonDataset d(n, w);
    std::vector<double> wd(w.begin(), w.end());

    RobustConfig cfg;
    cfg.lambda = 0.25;
    cfg.max_iters = 500;
    const RobustFit fit = aggregate_robust(d, wd, cfg);

    // gamma handles the flipped slot and leaves the consistent ones alone
    CHECK(std::abs(fit.gamma[slot_index(n, 2, 0)]) > 0.5);
    CHECK(std::abs(fit.gamma[slot_index(n, 0, 1)]) <
          std::abs(fit.gamma[slot_index(n, 2, 0)]));

    // grid-search oracle over (theta mean-zero, gamma on the voted slots)
    const std::vector<std::size_t> voted{slot_index(n, 0, 1), slot_index(n, 1, 2),
                                         slot_index(n, 2, 0)};
    auto objective = [&](const std::vector<double>& point) {
      ScoreVector theta({point[0], point[1], -point[0] - point[1]});
      double acc = 0.0;
      for (std::size_t k = 0; k < voted.size(); ++k) {
        const std::size_t e = voted[k];
        const double r = slot_residual(theta, n, e) - point[2 + k];
        acc += 0.5 * wd[e] * r * r + cfg.lambda * wd[e] * std::abs(point[2 + k]);
      }
      return acc;
    };
    const auto [point, best] = oracles::refine_grid(objective, 5, 2.0, 9, 6);
    const double impl_objective =
        detail::robust_objective(d, wd, fit.scores, fit.gamma, cfg.lambda);
    CHECK(impl_objective <= best + 1e-4);
  }
}
