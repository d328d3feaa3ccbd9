#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rankpoison/core.hpp"

using namespace rankpoison;

TEST_CASE("full design layout") {
  SECTION("n=2 has the two ordered slots") {
    const ComparisonDataset d = build_full_design(2);
    REQUIRE(d.slot_count() == 2);
    CHECK(slot_pair(2, 0) == std::pair<int, int>{0, 1});
    CHECK(slot_pair(2, 1) == std::pair<int, int>{1, 0});
  }

  SECTION("n=3 has 6 slots, n=10 has 90") {
    CHECK(build_full_design(3).slot_count() == 6);
    CHECK(build_full_design(10).slot_count() == 90);
  }

  SECTION("slot_index inverts slot_pair") {
    const int n = 7;
    for (std::size_t e = 0; e < num_slots(n); ++e) {
      const auto [i, j] = slot_pair(n, e);
      REQUIRE(i != j);
      CHECK(slot_index(n, i, j) == e);
    }
  }

  SECTION("n < 2 rejected") {
    CHECK_THROWS_AS(build_full_design(1), std::invalid_argument);
    CHECK_THROWS_AS(ItemSet(1), std::invalid_argument);
  }

  SECTION("negative weights rejected") {
    CHECK_THROWS_AS(ComparisonDataset(3, Weights{0, 0, -1, 0, 0, 0}),
                    std::invalid_argument);
  }
}

TEST_CASE("design rows are antisymmetric and sum to zero") {
  const int n = 4;
  for (std::size_t e = 0; e < num_slots(n); ++e) {
    const auto [i, j] = slot_pair(n, e);
    // slot (j, i) exists and is the negated row
    const auto [ri, rj] = slot_pair(n, slot_index(n, j, i));
    CHECK(ri == j);
    CHECK(rj == i);
  }
}

TEST_CASE("weighted_loss") {
  SECTION("interpolating theta gives zero loss") {
    const ComparisonDataset d = build_full_design(2);
    const ScoreVector theta({0.5, -0.5});
    const FrequencyVector q(std::vector<double>{1.0, 0.0});
    CHECK(weighted_loss(theta, q, d) == 0.0);
  }

  SECTION("zero scores make every residual one") {
    const int n = 4;
    const ComparisonDataset d = build_full_design(n);
    const std::size_t N = d.slot_count();
    const FrequencyVector q(std::vector<double>(N, 1.0 / N));
    const ScoreVector theta(std::vector<double>(n, 0.0));
    CHECK_THAT(weighted_loss(theta, q, d),
               Catch::Matchers::WithinAbs(1.0 / (2.0 * N), 1e-15));
  }

  SECTION("matches term-by-term summation on random input") {
    const int n = 4;
    const ComparisonDataset d = build_full_design(n);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> qv(d.slot_count());
    std::vector<double> tv(n);
    for (auto& v : qv) v = unif(rng);
    for (auto& v : tv) v = 2.0 * unif(rng) - 1.0;
    const ScoreVector theta(tv);
    const FrequencyVector q(qv);

    double direct = 0.0;
    for (std::size_t e = 0; e < d.slot_count(); ++e) {
      const auto [i, j] = slot_pair(n, e);
      const double r = 1.0 - theta[i] + theta[j];
      direct += qv[e] * r * r;
    }
    direct /= 2.0 * static_cast<double>(d.slot_count());
    CHECK_THAT(weighted_loss(theta, q, d), Catch::Matchers::WithinAbs(direct, 1e-12));
  }

  SECTION("gauge invariance is exact for representable shifts") {
    const int n = 5;
    const ComparisonDataset d = build_full_design(n);
    std::mt19937_64 rng(11);
    std::vector<double> qv(d.slot_count());
    std::vector<double> tv(n);
    for (auto& v : qv) v = static_cast<double>(rng() % 1024) / 1024.0;
    for (auto& v : tv) v = static_cast<double>(rng() % 2048) / 1024.0 - 1.0;
    const FrequencyVector q(qv);
    const ScoreVector theta(tv);
    std::vector<double> shifted = tv;
    for (double& v : shifted) v += 0.5;  // dyadic shift, exact in binary
    CHECK(weighted_loss(theta, q, d) == weighted_loss(ScoreVector(shifted), q, d));
  }

  SECTION("dimension mismatch rejected") {
    const ComparisonDataset d = build_full_design(3);
    CHECK_THROWS_AS(
        weighted_loss(ScoreVector({0.0, 0.0}), FrequencyVector(std::vector<double>(6, 0.1)), d),
        std::invalid_argument);
  }
}

TEST_CASE("rank_from_scores") {
  SECTION("descending sort") {
    const RankingList r = rank_from_scores(ScoreVector({3.0, 1.0, 2.0}));
    CHECK(r.order == std::vector<int>{0, 2, 1});
    CHECK(r.rank_of == std::vector<int>{1, 3, 2});
  }

  SECTION("ties break by ascending index") {
    const RankingList r = rank_from_scores(ScoreVector({1.0, 1.0}));
    CHECK(r.order == std::vector<int>{0, 1});
  }

  SECTION("invariant under strictly increasing transforms") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> t(8);
      for (auto& v : t) v = unif(rng);
      const RankingList base = rank_from_scores(ScoreVector(t));
      std::vector<double> warped(t);
      for (auto& v : warped) v = std::exp(3.0 * v) + 1.0;
      CHECK(rank_from_scores(ScoreVector(warped)).order == base.order);
    }
  }
}

TEST_CASE("frequency vector flags") {
  CHECK_THROWS_AS(FrequencyVector(std::vector<double>{0.5, -0.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FrequencyVector::normalized(std::vector<double>{0.5, 0.4}),
                  std::invalid_argument);
  const FrequencyVector q(std::vector<double>{0.5, 0.4});
  CHECK_FALSE(q.is_normalized());
  CHECK(FrequencyVector::normalized(std::vector<double>{0.5, 0.5}).is_normalized());
}

TEST_CASE("round_weights") {
  const std::vector<double> w{1.4, 2.6, 0.2, 3.8};

  SECTION("nearest") {
    CHECK(round_weights(w, Rounding::nearest) == Weights{1, 3, 0, 4});
  }
  SECTION("floor") {
    CHECK(round_weights(w, Rounding::floor) == Weights{1, 2, 0, 3});
  }
  SECTION("ceil") {
    CHECK(round_weights(w, Rounding::ceil) == Weights{2, 3, 1, 4});
  }
  SECTION("largest remainder preserves the floored total") {
    const Weights r = round_weights(w, Rounding::largest_remainder);
    CHECK(std::accumulate(r.begin(), r.end(), std::int64_t{0}) == 8);
    CHECK(r == Weights{1, 3, 0, 4});  // .8 and .6 get the two spare votes
  }
  SECTION("largest remainder is exact on integer totals") {
    std::mt19937_64 rng(5);
    std::vector<double> v(20);
    double acc = 0.0;
    for (std::size_t e = 0; e + 1 < v.size(); ++e) {
      v[e] = static_cast<double>(rng() % 1000) / 16.0;
      acc += v[e];
    }
    v.back() = std::ceil(acc) - acc + 41.0;  // force an integer total
    const double total = acc + v.back();
    const Weights r = round_weights(v, Rounding::largest_remainder);
    CHECK(std::accumulate(r.begin(), r.end(), std::int64_t{0}) ==
          static_cast<std::int64_t>(std::llround(total)));
  }
}

TEST_CASE("round_half_even") {
  CHECK(round_half_even(2.5) == 2);
  CHECK(round_half_even(3.5) == 4);
  CHECK(round_half_even(2.4) == 2);
  CHECK(round_half_even(2.6) == 3);
  CHECK(round_half_even(0.0) == 0);
}

TEST_CASE("consistency split counts votes by agreement with a reference") {
  const int n = 3;
  Weights w(num_slots(n), 0);
  const RankingList truth = RankingList::from_order({2, 0, 1});
  w[slot_index(n, 2, 0)] = 4;  // consistent
  w[slot_index(n, 0, 1)] = 3;  // consistent
  w[slot_index(n, 1, 2)] = 5;  // conflicting
  const ComparisonDataset d(n, w);
  const ConsistencySplit s = split_by_consistency(d, truth);
  CHECK(s.consistent == 7);
  CHECK(s.conflicting == 5);
}
