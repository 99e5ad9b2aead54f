#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ccopt/subpack.hpp"

using namespace ccopt;

namespace {

SymmetricParam make_y(int K, int N, std::vector<std::vector<double>> rows) {
  SymmetricParam y;
  y.K = K;
  y.N = N;
  y.y = std::move(rows);
  return y;
}

double flat_dot(const std::vector<double>& g, const SymmetricParam& a,
                const SymmetricParam& b) {
  double dot = 0.0;
  std::size_t idx = 0;
  for (int n = 0; n < a.N; ++n)
    for (int s = 0; s <= a.K; ++s, ++idx) dot += g[idx] * (a.y[n][s] - b.y[n][s]);
  return dot;
}

// Partition-feasible random y (ordering included); memory is irrelevant to
// the sparsity function, so it is not enforced here.
SymmetricParam random_partition_feasible(int K, int N, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<double>> rows(N, std::vector<double>(K + 1, 0.0));
  for (int s = 1; s <= K; ++s) {
    std::vector<double> col(N);
    for (double& v : col) v = unif(rng);
    std::sort(col.begin(), col.end(), std::greater<>());
    for (int n = 0; n < N; ++n) rows[n][s] = col[n];
  }
  for (int n = 0; n < N; ++n) {
    double cached = 0.0;
    for (int s = 1; s <= K; ++s) cached += binomial_d(K, s) * rows[n][s];
    const double scale = unif(rng) / cached;
    cached = 0.0;
    for (int s = 1; s <= K; ++s) {
      rows[n][s] *= scale;
      cached += binomial_d(K, s) * rows[n][s];
    }
    rows[n][0] = 1.0 - cached;
  }
  return make_y(K, N, std::move(rows));
}

}  // namespace

TEST_CASE("support size and largest-entry sums") {
  CHECK(l0_count({0.0, 1e-12, 0.5, -0.2}) == 2);
  CHECK(l0_count({}) == 0);
  CHECK(sum_largest({0.1, 0.4, 0.3, 0.2}, 1) == doctest::Approx(0.4));
  CHECK(sum_largest({0.1, 0.4, 0.3, 0.2}, 3) == doctest::Approx(0.9));
  CHECK(sum_largest({0.1, 0.4, 0.3, 0.2}, 4) == doctest::Approx(1.0));
}

TEST_CASE("per-file expansion lays types out in contiguous bands") {
  const SymmetricParam y = make_y(2, 2, {{0.1, 0.4, 0.1}, {1.0, 0.0, 0.0}});
  const std::vector<double> row = expand_file(y, 1);
  REQUIRE(row.size() == 4);
  CHECK(row[0] == doctest::Approx(0.1));
  CHECK(row[1] == doctest::Approx(0.4));
  CHECK(row[2] == doctest::Approx(0.4));
  CHECK(row[3] == doctest::Approx(0.1));
  CHECK(l0_count(expand_file(y, 2)) == 1);
}

TEST_CASE("largest-entry subgradient hands out whole type bands first") {
  const SymmetricParam y = make_y(2, 2, {{0.1, 0.4, 0.1}, {1.0, 0.0, 0.0}});
  const std::vector<double> g = sum_largest_subgradient(y, 1, 2);
  REQUIRE(g.size() == 6);  // N * (K+1), file-major
  CHECK(g[0] == doctest::Approx(0.0));
  CHECK(g[1] == doctest::Approx(2.0));  // both size-1 slots picked
  CHECK(g[2] == doctest::Approx(0.0));
  CHECK(g[3] == doctest::Approx(0.0));  // other file untouched
  CHECK(g[4] == doctest::Approx(0.0));
  CHECK(g[5] == doctest::Approx(0.0));

  // Value ties break toward the smaller type: with equal entries the single
  // uncached slot is taken before a size-2 slot.
  const SymmetricParam tie = make_y(2, 2, {{0.2, 0.2, 0.2}, {1.0, 0.0, 0.0}});
  const std::vector<double> gt = sum_largest_subgradient(tie, 1, 2);
  CHECK(gt[0] == doctest::Approx(1.0));
  CHECK(gt[1] == doctest::Approx(1.0));
  CHECK(gt[2] == doctest::Approx(0.0));
}

TEST_CASE("subgradient blocks sum to the cap and satisfy the support bound") {
  std::mt19937_64 rng(17);
  const int K = 3, N = 3, f_hat = 3;
  for (int trial = 0; trial < 50; ++trial) {
    const SymmetricParam y = random_partition_feasible(K, N, rng);
    for (int n = 1; n <= N; ++n) {
      const std::vector<double> g = sum_largest_subgradient(y, n, f_hat);
      double block = 0.0;
      for (int s = 0; s <= K; ++s) block += g[(n - 1) * (K + 1) + s];
      CHECK(block == doctest::Approx(static_cast<double>(f_hat)).epsilon(1e-15));
    }
  }
}

TEST_CASE("first-order inequality of the convex sparsity surrogate") {
  std::mt19937_64 rng(31);
  const int K = 3, N = 3, f_hat = 3;
  for (int trial = 0; trial < 50; ++trial) {
    const SymmetricParam a = random_partition_feasible(K, N, rng);
    const SymmetricParam b = random_partition_feasible(K, N, rng);
    for (int n = 1; n <= N; ++n) {
      const double ha = sum_largest(expand_file(a, n), f_hat);
      const double hb = sum_largest(expand_file(b, n), f_hat);
      const std::vector<double> g = sum_largest_subgradient(a, n, f_hat);
      CHECK(hb - ha - flat_dot(g, b, a) >= -1e-12);
    }
  }
}

TEST_CASE("random starts are feasible and within the sparsity cap") {
  const Instance inst(3, 3, 1.0, Popularity::zipf(3, 1.0));
  SubpackConfig cfg;
  cfg.f_hat = 4;
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const SymmetricParam y = random_feasible(inst, cfg, rng);
    CHECK(validate(y, inst).empty());
    for (int n = 1; n <= inst.N; ++n) CHECK(l0_count(expand_file(y, n)) <= cfg.f_hat);
  }
}

TEST_CASE("random starts fall back to caching nothing under a unit cap") {
  const Instance inst(3, 3, 1.0, Popularity::uniform(3));
  SubpackConfig cfg;
  cfg.f_hat = 1;  // no cached type fits next to the uncached fragment
  std::mt19937_64 rng(3);
  const SymmetricParam y = random_feasible(inst, cfg, rng);
  for (int n = 0; n < inst.N; ++n) {
    CHECK(y.y[n][0] == doctest::Approx(1.0));
    for (int s = 1; s <= inst.K; ++s) CHECK(y.y[n][s] == doctest::Approx(0.0));
  }
}

TEST_CASE("descent keeps iterates sparsity-feasible and never backtracks") {
  const Instance inst(3, 3, 1.0, Popularity::zipf(3, 1.0));
  const DemandStats stats = DemandStats::compute(inst.pop, inst.K);
  SubpackConfig cfg;
  cfg.f_hat = 4;
  std::mt19937_64 rng(cfg.seed);
  const SymmetricParam y0 = random_feasible(inst, cfg, rng);
  const double start_load = average_load_symmetric(inst, y0, stats);

  const DcResult r = dc_solve(inst, stats, cfg, y0);
  REQUIRE(r.ok);
  REQUIRE(r.feasible);
  CHECK(r.objective <= start_load + 1e-9);
  CHECK(validate(r.y, inst).empty());
  for (int c : r.l0_per_file) CHECK(c <= cfg.f_hat);
  for (double m : r.margin) CHECK(m >= -1e-6);
  CHECK(std::abs(average_load_symmetric(inst, r.y, stats) - r.objective) <= 1e-9);
}

TEST_CASE("multi-start aggregation is deterministic") {
  const Instance inst(3, 3, 2.0, Popularity::zipf(3, 0.5));
  const DemandStats stats = DemandStats::compute(inst.pop, inst.K);
  SubpackConfig cfg;
  cfg.f_hat = 4;
  cfg.starts = 12;
  cfg.seed = 5;
  const MultiStartResult a = dc_multi_start(inst, stats, cfg);
  const MultiStartResult b = dc_multi_start(inst, stats, cfg);
  REQUIRE(a.found);
  CHECK(a.runs == 12);
  CHECK(a.feasible_runs == b.feasible_runs);
  CHECK(a.best.objective == b.best.objective);  // bitwise
  CHECK(a.best.y.y == b.best.y.y);
}

TEST_CASE("support oracle beats or matches the descent heuristic") {
  for (const double gamma : {0.0, 1.0}) {
    const Instance inst(3, 3, 1.0, Popularity::zipf(3, gamma));
    const DemandStats stats = DemandStats::compute(inst.pop, inst.K);
    for (const int f_hat : {2, 4}) {
      SubpackConfig cfg;
      cfg.f_hat = f_hat;
      cfg.starts = 30;
      const SupportOracleResult oracle = support_oracle(inst, stats, f_hat);
      REQUIRE(oracle.found);
      CHECK(validate(oracle.y, inst).empty());
      for (int n = 1; n <= inst.N; ++n)
        CHECK(l0_count(expand_file(oracle.y, n)) <= f_hat);

      const MultiStartResult ms = dc_multi_start(inst, stats, cfg);
      REQUIRE(ms.found);
      CHECK(oracle.objective <= ms.best.objective + 1e-9);
    }
  }
}

TEST_CASE("tightening the cap can only cost load") {
  const Instance inst(3, 3, 1.0, Popularity::zipf(3, 1.0));
  const DemandStats stats = DemandStats::compute(inst.pop, inst.K);
  double prev = -1.0;
  for (const int f_hat : {8, 6, 4, 2, 1}) {
    const SupportOracleResult r = support_oracle(inst, stats, f_hat);
    REQUIRE(r.found);
    if (prev >= 0.0) CHECK(r.objective >= prev - 1e-9);
    prev = r.objective;
  }
}

TEST_CASE("unrestricted subset supports agree with type supports at two users") {
  for (const double gamma : {0.0, 1.0}) {
    const Instance inst(2, 2, 1.0, Popularity::zipf(2, gamma));
    const DemandStats stats = DemandStats::compute(inst.pop, inst.K);
    for (const int f_hat : {2, 3}) {
      const SupportOracleResult typed = support_oracle(inst, stats, f_hat);
      const FullSupportOracleResult full = full_support_oracle(inst, f_hat);
      REQUIRE(typed.found);
      REQUIRE(full.found);
      CHECK(std::abs(typed.objective - full.objective) <= 1e-7);
      CHECK(validate(full.x, inst).empty());
    }
  }
}
