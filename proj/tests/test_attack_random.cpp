#include <catch2/catch_amalgamated.hpp>

#include "rankpoison/aggregate.hpp"
#include "rankpoison/attack_random.hpp"
#include "rankpoison/data_io.hpp"

using namespace rankpoison;

namespace {

SyntheticData sample_data(int n = 10, std::int64_t votes = 2000) {
  SyntheticConfig cfg;
  cfg.n = n;
  cfg.total_votes = votes;
  cfg.noise_fraction = 0.0;
  cfg.seed = 19;
  return generate_synthetic(cfg);
}

std::int64_t l1_change(const ComparisonDataset& a, const ComparisonDataset& b) {
  std::int64_t acc = 0;
  for (std::size_t e = 0; e < a.slot_count(); ++e)
    acc += std::abs(a.weights()[e] - b.weights()[e]);
  return acc;
}

}  // namespace

TEST_CASE("zero fractions are a no-op") {
  const SyntheticData s = sample_data();
  RandomAttackConfig cfg;
  const auto res = run_random_attack(s.data, cfg);
  CHECK(res.poisoned == s.data);
  CHECK(res.deleted == 0);
  CHECK(res.injected == 0);
}

TEST_CASE("five percent each way stays inside the l1 budget") {
  const SyntheticData s = sample_data();
  RandomAttackConfig cfg;
  cfg.s1 = 0.05;
  cfg.s2 = 0.05;
  cfg.seed = 4;
  const auto res = run_random_attack(s.data, cfg);
  const auto total = s.data.total_votes();
  CHECK(l1_change(res.poisoned, s.data) <=
        static_cast<std::int64_t>(0.10 * static_cast<double>(total)) + 1);
  CHECK(res.deleted == 100);
  CHECK(res.injected == 100);
}

TEST_CASE("full deletion empties the dataset") {
  const SyntheticData s = sample_data(6, 300);
  RandomAttackConfig cfg;
  cfg.s2 = 1.0;
  const auto res = run_random_attack(s.data, cfg);
  CHECK(res.poisoned.total_votes() == 0);
  CHECK_THROWS_AS(aggregate(res.poisoned), DegenerateInputError);
}

TEST_CASE("hard caps bound every change") {
  const SyntheticData s = sample_data();
  RandomAttackConfig cfg;
  cfg.s1 = 0.30;
  cfg.s2 = 0.30;
  cfg.b = 40;
  cfg.l = 2;
  cfg.seed = 8;
  const auto res = run_random_attack(s.data, cfg);
  std::int64_t linf = 0;
  for (std::size_t e = 0; e < s.data.slot_count(); ++e)
    linf = std::max(linf, std::abs(res.poisoned.weights()[e] - s.data.weights()[e]));
  CHECK(l1_change(res.poisoned, s.data) <= *cfg.b);
  CHECK(linf <= *cfg.l);
  CHECK(res.truncated > 0);  // 0.6 * 2000 requested against a budget of 40
}

TEST_CASE("same seed gives the same poisoned data") {
  const SyntheticData s = sample_data();
  RandomAttackConfig cfg;
  cfg.s1 = 0.1;
  cfg.s2 = 0.1;
  cfg.seed = 21;
  const auto a = run_random_attack(s.data, cfg);
  const auto b = run_random_attack(s.data, cfg);
  CHECK(a.poisoned == b.poisoned);
}

TEST_CASE("weights never go negative") {
  const SyntheticData s = sample_data(4, 50);
  RandomAttackConfig cfg;
  cfg.s1 = 0.5;
  cfg.s2 = 0.9;
  cfg.seed = 5;
  const auto res = run_random_attack(s.data, cfg);
  for (auto w : res.poisoned.weights()) CHECK(w >= 0);
}
