#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "ccopt/combinatorics.hpp"

using namespace ccopt;

TEST_CASE("binomial coefficients, including out-of-range arguments") {
  CHECK(binomial(0, 0) == 1);
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(10, 10) == 1);
  CHECK(binomial(4, 7) == 0);
  CHECK_THROWS(binomial(3, -1));
  // Pascal's rule on a band wide enough to catch off-by-one slips.
  for (int n = 1; n <= 30; ++n)
    for (int k = 1; k <= n; ++k) CHECK(binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k));
  CHECK(binomial_d(6, 3) == doctest::Approx(20.0));
}

TEST_CASE("Stirling partition numbers") {
  CHECK(stirling2(0, 0) == 1);
  CHECK(stirling2(4, 2) == 7);
  CHECK(stirling2(5, 3) == 25);
  CHECK(stirling2(6, 1) == 1);
  CHECK(stirling2(6, 6) == 1);
  CHECK(stirling2(3, 5) == 0);
  // Row sums are Bell numbers.
  BigInt bell5 = 0;
  for (int u = 0; u <= 5; ++u) bell5 += stirling2(5, u);
  CHECK(bell5 == 52);
}

TEST_CASE("three-way multinomial") {
  CHECK(multinomial3(4, 2, 1) == 12);  // 4!/(2!1!1!)
  CHECK(multinomial3(3, 0, 0) == 1);
  CHECK_THROWS(multinomial3(3, 2, 2));
}

TEST_CASE("compositions enumerate ordered positive summands") {
  const auto parts = compositions(4, 2);
  REQUIRE(parts.size() == 3);  // 1+3, 2+2, 3+1
  CHECK(parts[0] == std::vector<int>{1, 3});
  CHECK(parts[1] == std::vector<int>{2, 2});
  CHECK(parts[2] == std::vector<int>{3, 1});
  CHECK(compositions(0, 0).size() == 1);
  CHECK(compositions(3, 0).empty());
  CHECK(compositions(2, 3).empty());
}

TEST_CASE("fixed-size subset enumeration") {
  const std::vector<int> ground{1, 2, 3, 4};
  const auto subs = subsets_of_size(ground, 2);
  CHECK(subs.size() == 6);
  std::set<std::vector<int>> seen(subs.begin(), subs.end());
  CHECK(seen.size() == 6);
  for (const auto& s : subs) CHECK(s.size() == 2);
  CHECK(subs.front() == std::vector<int>{1, 2});
  CHECK(subs.back() == std::vector<int>{3, 4});
  CHECK(subsets_of_size(ground, 0).size() == 1);
  CHECK(subsets_of_size(ground, 5).empty());
}

TEST_CASE("popularity models") {
  const Popularity uni = Popularity::uniform(4);
  CHECK(uni.prob(1) == doctest::Approx(0.25));
  CHECK(uni.tail(3) == doctest::Approx(0.5));
  CHECK(uni.tail(5) == doctest::Approx(0.0));

  const Popularity zipf = Popularity::zipf(3, 1.0);
  // Weights 1, 1/2, 1/3 over total 11/6.
  CHECK(zipf.prob(1) == doctest::Approx(6.0 / 11.0));
  CHECK(zipf.prob(2) == doctest::Approx(3.0 / 11.0));
  CHECK(zipf.prob(3) == doctest::Approx(2.0 / 11.0));
  CHECK(zipf.tail(1) == doctest::Approx(1.0));

  CHECK_THROWS(Popularity::from_probabilities({0.2, 0.8}));       // increasing
  CHECK_THROWS(Popularity::from_probabilities({0.9, 0.2}));       // sum != 1
  CHECK_THROWS(Popularity::from_probabilities({1.2, -0.2}));      // negative
  CHECK_NOTHROW(Popularity::from_probabilities({0.5, 0.3, 0.2}));
}

TEST_CASE("demand enumeration covers N^K outcomes with total probability one") {
  const Popularity pop = Popularity::zipf(3, 0.8);
  int count = 0;
  double total = 0.0;
  for_each_demand(pop, 2, [&](const std::vector<int>& d, double prob) {
    REQUIRE(d.size() == 2);
    double expect = 1.0;
    for (int f : d) expect *= pop.prob(f);
    CHECK(prob == doctest::Approx(expect).epsilon(1e-12));
    ++count;
    total += prob;
  });
  CHECK(count == 9);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("distinct-request-count distribution") {
  // K=3, N=4: one repeated file 4/64, a pair 36/64, all distinct 24/64.
  CHECK(distinct_files_prob(1, 3, 4) == doctest::Approx(1.0 / 16));
  CHECK(distinct_files_prob(2, 3, 4) == doctest::Approx(9.0 / 16));
  CHECK(distinct_files_prob(3, 3, 4) == doctest::Approx(6.0 / 16));
  for (int K = 1; K <= 6; ++K)
    for (int N = 1; N <= 6; ++N) {
      double total = 0.0;
      for (int u = 1; u <= std::min(K, N); ++u) total += distinct_files_prob(u, K, N);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("leftover-rank distribution: frozen small cases") {
  // Two users, two files, uniform: both-same-file demands put that file at
  // leftover rank 1 with probability 1/4 each.
  const Popularity uni2 = Popularity::uniform(2);
  CHECK(leftover_rank_prob(1, 1, 1, uni2, 2) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(leftover_rank_prob(1, 1, 2, uni2, 2) == doctest::Approx(0.25).epsilon(1e-12));
  // With two distinct files among two users there are no leftover users at
  // all, so rank 1 is out of range.
  CHECK_THROWS(leftover_rank_prob(1, 2, 1, uni2, 2));

  const Popularity uni3 = Popularity::uniform(3);
  CHECK(leftover_rank_prob(1, 2, 2, uni3, 3) == doctest::Approx(2.0 / 9).epsilon(1e-12));
}

TEST_CASE("leftover-rank distribution: formula equals brute force") {
  for (const double gamma : {0.0, 1.0}) {
    for (int K = 2; K <= 4; ++K)
      for (int N = 2; N <= 4; ++N) {
        const Popularity pop = Popularity::zipf(N, gamma);
        for (int u = 1; u <= std::min(K, N); ++u)
          for (int i = 1; i <= K - u; ++i)
            for (int n = 1; n <= N; ++n)
              CHECK(std::abs(leftover_rank_prob(i, u, n, pop, K) -
                             leftover_rank_prob_enum(i, u, n, pop, K)) <= 1e-12);
      }
  }
}

TEST_CASE("leftover-rank mass per rank does not depend on the rank") {
  const Popularity pop = Popularity::zipf(4, 1.3);
  const int K = 4;
  for (int u = 1; u <= 4; ++u) {
    for (int i = 2; i <= K - u; ++i) {
      double first = 0.0, cur = 0.0;
      for (int n = 1; n <= 4; ++n) {
        first += leftover_rank_prob(1, u, n, pop, K);
        cur += leftover_rank_prob(i, u, n, pop, K);
      }
      CHECK(std::abs(first - cur) <= 1e-12);
    }
  }
}

TEST_CASE("demand statistics table cross-validates and exposes both tables") {
  const Popularity pop = Popularity::zipf(3, 1.5);
  const DemandStats stats = DemandStats::compute(pop, 3);  // cross-checks internally
  const DemandStats brute = DemandStats::enumerate(pop, 3);
  for (int u = 1; u <= 3; ++u)
    for (int i = 1; i <= 3 - u; ++i)
      for (int n = 1; n <= 3; ++n)
        CHECK(stats.leftover_rank(i, u, n) ==
              doctest::Approx(brute.leftover_rank(i, u, n)).epsilon(1e-12));
  CHECK(stats.K() == 3);
  CHECK(stats.N() == 3);
}

TEST_CASE("enumeration budget guard") {
  CHECK(max_enumeration() >= 1000);
  const Popularity pop = Popularity::uniform(12);
  // 12^9 demands blow any reasonable budget; the guard must refuse.
  CHECK_THROWS(leftover_rank_prob_enum(1, 2, 1, pop, 9));
}
