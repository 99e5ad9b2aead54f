// Acceptance gate: every release-blocking property in one binary, one
// pass/fail line each. Exit code is the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ccopt/subpack.hpp"

using namespace ccopt;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Gate {
  int failed = 0;
  void report(int index, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", index, name.c_str(),
                detail.empty() ? "" : " — ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
  }
};

SymmetricParam random_ordered_y(int K, int N, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SymmetricParam y;
  y.K = K;
  y.N = N;
  y.y.assign(N, std::vector<double>(K + 1, 0.0));
  for (int s = 1; s <= K; ++s) {
    std::vector<double> col(N);
    for (double& v : col) v = unif(rng);
    std::sort(col.begin(), col.end(), std::greater<>());
    for (int n = 0; n < N; ++n) y.y[n][s] = col[n];
  }
  double worst = 0.0;
  for (int n = 0; n < N; ++n) {
    double cached = 0.0;
    for (int s = 1; s <= K; ++s) cached += binomial_d(K, s) * y.y[n][s];
    worst = std::max(worst, cached);
  }
  for (int n = 0; n < N; ++n) {
    double cached = 0.0;
    for (int s = 1; s <= K; ++s) {
      y.y[n][s] *= 0.9 / worst;
      cached += binomial_d(K, s) * y.y[n][s];
    }
    y.y[n][0] = 1.0 - cached;
  }
  return y;
}

PartitionParam random_partition(int K, int N, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PartitionParam x;
  x.K = K;
  x.N = N;
  x.x.assign(N, std::vector<double>(1 << K, 0.0));
  for (auto& row : x.x) {
    double total = 0.0;
    for (double& v : row) total += (v = unif(rng));
    for (double& v : row) v /= total;
  }
  return x;
}

// 1. Closed-form single-type optimum at every integer cache fraction.
void criterion_closed_form(Gate& gate) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  bool support_ok = true;
  for (const int K : {2, 3, 4})
    for (const int N : {2, 4, 6})
      for (int t = 0; t <= K; ++t) {
        const double M = static_cast<double>(t) * N / K;
        const OptResult r = solve_uniform(Instance(K, N, M, Popularity::uniform(N)));
        if (r.status != LpStatus::Optimal || !r.z) {
          gate.report(1, "single-type closed form", false, "solver failure");
          return;
        }
        const UniformOptimum cf = uniform_closed_form(K, N, M);
        worst = std::max(worst, std::abs(r.objective - cf.load));
        for (int s = 0; s <= K; ++s)
          if (std::abs(r.z->z[s] - cf.z.z[s]) > 1e-8) support_ok = false;
      }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os.precision(3);
  os << "max objective diff " << worst << ", support " << (support_ok ? "exact" : "off")
     << ", " << secs << " s";
  gate.report(1, "single-type closed form", worst <= 1e-8 && support_ok && secs < 5.0, os.str());
}

// 2. The symmetric restriction loses nothing against the full placement LP.
void criterion_lossless(Gate& gate) {
  const auto t0 = Clock::now();
  double worst12 = 0.0, worst23 = 0.0;
  for (const double gamma : {0.0, 0.5, 1.0, 2.0}) {
    const Popularity pop = Popularity::zipf(4, gamma);
    const DemandStats stats = DemandStats::compute(pop, 3);
    for (int m = 0; m <= 4; ++m) {
      const Instance inst(3, 4, static_cast<double>(m), pop);
      const OptResult full = solve_full(inst);
      const OptResult sym = solve_symmetric(inst, stats);
      if (full.status != LpStatus::Optimal || sym.status != LpStatus::Optimal) {
        gate.report(2, "symmetric placement is lossless", false, "solver failure");
        return;
      }
      worst12 = std::max(worst12, std::abs(full.objective - sym.objective));
      if (gamma == 0.0) {
        const OptResult uni = solve_uniform(inst);
        worst23 = std::max(worst23, std::abs(sym.objective - uni.objective));
      }
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os.precision(3);
  os << "max full-vs-symmetric diff " << worst12 << ", uniform-popularity collapse diff "
     << worst23 << ", " << secs << " s";
  gate.report(2, "symmetric placement is lossless", worst12 <= 1e-7 && worst23 <= 1e-7 && secs < 120.0,
              os.str());
}

// 3. Closed-form symmetric objective equals brute-force enumeration.
void criterion_objective_equivalence(Gate& gate) {
  double worst = 0.0;
  std::mt19937_64 rng(2024);
  for (const auto [K, N] : {std::pair{3, 4}, std::pair{4, 3}})
    for (const double gamma : {0.5, 1.5}) {
      const Instance inst(K, N, static_cast<double>(N), Popularity::zipf(N, gamma));
      const DemandStats stats = DemandStats::compute(inst.pop, inst.K);
      for (int trial = 0; trial < 20; ++trial) {
        const SymmetricParam y = random_ordered_y(K, N, rng);
        const double closed = average_load_symmetric(inst, y, stats);
        const double brute = average_load_exact(inst, expand(y));
        worst = std::max(worst, std::abs(closed - brute));
      }
    }
  std::ostringstream os;
  os.precision(3);
  os << "max diff " << worst << " over 80 random placements";
  gate.report(3, "closed-form objective equals enumeration", worst <= 1e-9, os.str());
}

// 4. Leftover-rank probabilities: formula vs enumeration, rank independence.
void criterion_rank_probabilities(Gate& gate) {
  double worst = 0.0, worst_rank = 0.0;
  for (const double gamma : {0.0, 1.0, 2.0})
    for (int K = 2; K <= 4; ++K)
      for (int N = 2; N <= 4; ++N) {
        const Popularity pop = Popularity::zipf(N, gamma);
        for (int u = 1; u <= std::min(K, N); ++u)
          for (int i = 1; i <= K - u; ++i) {
            double mass = 0.0, mass1 = 0.0;
            for (int n = 1; n <= N; ++n) {
              const double f = leftover_rank_prob(i, u, n, pop, K);
              worst = std::max(worst, std::abs(f - leftover_rank_prob_enum(i, u, n, pop, K)));
              mass += f;
              mass1 += leftover_rank_prob(1, u, n, pop, K);
            }
            worst_rank = std::max(worst_rank, std::abs(mass - mass1));
          }
      }
  std::ostringstream os;
  os.precision(3);
  os << "max formula-vs-enumeration diff " << worst << ", max rank dependence " << worst_rank;
  gate.report(4, "leftover-rank probabilities", worst <= 1e-12 && worst_rank <= 1e-12, os.str());
}

// 5. Every demand decodes under optimized and random placements.
void criterion_decodability(Gate& gate) {
  const Popularity pop = Popularity::uniform(4);
  int checked = 0;
  bool all_ok = true;
  auto check_all = [&](const Instance& inst, const PartitionParam& x) {
    for_each_demand(inst.pop, inst.K, [&](const Demand& d, double) {
      all_ok = all_ok && decode_check(inst, x, d);
      ++checked;
    });
  };
  for (const double M : {1.0, 2.0}) {
    const Instance inst(3, 4, M, pop);
    const OptResult sym = solve_symmetric(inst);
    if (sym.status != LpStatus::Optimal) {
      gate.report(5, "decodability of delivered plans", false, "solver failure");
      return;
    }
    check_all(inst, expand(*sym.y));
  }
  std::mt19937_64 rng(77);
  const Instance loose(3, 4, 4.0, pop);
  for (int trial = 0; trial < 10; ++trial) check_all(loose, random_partition(3, 4, rng));
  std::ostringstream os;
  os << checked << " demand/placement pairs";
  gate.report(5, "decodability of delivered plans", all_ok, os.str());
}

// 6. Monte Carlo agrees with enumeration and reproduces bit-for-bit.
void criterion_monte_carlo(Gate& gate) {
  const Instance inst(3, 4, 1.0, Popularity::zipf(4, 1.5));
  const OptResult sym = solve_symmetric(inst);
  if (sym.status != LpStatus::Optimal) {
    gate.report(6, "Monte Carlo consistency", false, "solver failure");
    return;
  }
  const PartitionParam x = expand(*sym.y);
  const double exact = average_load_exact(inst, x);
  const McEstimate a = average_load_mc(inst, x, 100000, 12345);
  const McEstimate b = average_load_mc(inst, x, 100000, 12345);
  const bool within = std::abs(a.mean - exact) <= 3.0 * a.std_error;
  const bool reproducible = a.mean == b.mean && a.std_error == b.std_error;
  std::ostringstream os;
  os.precision(4);
  os << "|mc - exact| " << std::abs(a.mean - exact) << " vs 3*stderr " << 3.0 * a.std_error
     << (reproducible ? ", bit-reproducible" : ", NOT reproducible");
  gate.report(6, "Monte Carlo consistency", within && reproducible, os.str());
}

// 7. Multi-start descent reaches the exhaustive support optimum.
void criterion_descent_vs_oracle(Gate& gate) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  bool caps_ok = true, all_found = true;
  for (const double gamma : {0.0, 1.0}) {
    const Popularity pop = Popularity::zipf(3, gamma);
    const DemandStats stats = DemandStats::compute(pop, 3);
    for (const double M : {1.0, 2.0})
      for (const int f_hat : {2, 4, 6}) {
        const Instance inst(3, 3, M, pop);
        SubpackConfig cfg;
        cfg.f_hat = f_hat;
        cfg.delta = 0.0001;
        cfg.starts = 100;
        cfg.seed = 0;
        const MultiStartResult ms = dc_multi_start(inst, stats, cfg);
        const SupportOracleResult oracle = support_oracle(inst, stats, f_hat);
        if (!ms.found || !oracle.found) {
          all_found = false;
          continue;
        }
        worst = std::max(worst, ms.best.objective - oracle.objective);
        for (int n = 1; n <= inst.N; ++n)
          if (l0_count(expand_file(ms.best.y, n)) > f_hat) caps_ok = false;
      }
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os.precision(3);
  os << "max gap to oracle " << worst << ", caps " << (caps_ok ? "respected" : "violated")
     << ", " << secs << " s";
  gate.report(7, "descent matches the support oracle",
              all_found && worst <= 1e-3 && caps_ok && secs < 300.0, os.str());
}

// 8. Dropping the type-symmetry conditions does not help at two users.
void criterion_full_support_equivalence(Gate& gate) {
  double worst = 0.0;
  bool all_found = true;
  for (const double gamma : {0.0, 1.0}) {
    const Popularity pop = Popularity::zipf(3, gamma);
    const DemandStats stats = DemandStats::compute(pop, 2);
    for (const int f_hat : {2, 3}) {
      const Instance inst(2, 3, 1.0, pop);
      const SupportOracleResult typed = support_oracle(inst, stats, f_hat);
      const FullSupportOracleResult full = full_support_oracle(inst, f_hat);
      if (!typed.found || !full.found) {
        all_found = false;
        continue;
      }
      worst = std::max(worst, std::abs(typed.objective - full.objective));
    }
  }
  std::ostringstream os;
  os.precision(3);
  os << "max diff " << worst;
  gate.report(8, "subset supports reduce to type supports", all_found && worst <= 1e-7, os.str());
}

// 9. Optimized placement dominates both uniform baselines, all nonincreasing.
void criterion_baseline_dominance(Gate& gate) {
  const Popularity pop = Popularity::zipf(10, 1.5);
  const DemandStats stats = DemandStats::compute(pop, 4);
  bool order_ok = true, monotone_ok = true;
  double prev_p2 = 1e300, prev_yu = 1e300, prev_mn = 1e300;
  for (int m = 0; m <= 10; ++m) {
    const Instance inst(4, 10, static_cast<double>(m), pop);
    const OptResult p2 = solve_symmetric(inst, stats);
    if (p2.status != LpStatus::Optimal) {
      gate.report(9, "baseline dominance", false, "solver failure");
      return;
    }
    const double yu = baseline_yu_load(inst);
    const double mn = baseline_mn_load(inst);
    if (p2.objective > yu + 1e-9 || yu > mn + 1e-9) order_ok = false;
    if (p2.objective > prev_p2 + 1e-9 || yu > prev_yu + 1e-9 || mn > prev_mn + 1e-9)
      monotone_ok = false;
    prev_p2 = p2.objective;
    prev_yu = yu;
    prev_mn = mn;
  }
  std::ostringstream os;
  os << "11 memory points, ordering " << (order_ok ? "held" : "broken") << ", curves "
     << (monotone_ok ? "nonincreasing" : "not monotone");
  gate.report(9, "baseline dominance", order_ok && monotone_ok, os.str());
}

// 10. Subgradient of the largest-entries surrogate is a valid subgradient.
void criterion_subgradient(Gate& gate) {
  const int K = 4, N = 4, f_hat = 6;
  std::mt19937_64 rng(555);
  double worst = 0.0;
  bool sums_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const SymmetricParam a = random_ordered_y(K, N, rng);
    const SymmetricParam b = random_ordered_y(K, N, rng);
    for (int n = 1; n <= N; ++n) {
      const double ha = sum_largest(expand_file(a, n), f_hat);
      const double hb = sum_largest(expand_file(b, n), f_hat);
      const std::vector<double> g = sum_largest_subgradient(a, n, f_hat);
      double dot = 0.0, block = 0.0;
      for (int m = 0; m < N; ++m)
        for (int s = 0; s <= K; ++s) dot += g[m * (K + 1) + s] * (b.y[m][s] - a.y[m][s]);
      for (int s = 0; s <= K; ++s) block += g[(n - 1) * (K + 1) + s];
      worst = std::max(worst, ha + dot - hb);  // violation of h(b) >= h(a) + g.(b-a)
      if (block != static_cast<double>(f_hat)) sums_ok = false;
    }
  }
  std::ostringstream os;
  os.precision(3);
  os << "max first-order violation " << worst << ", block sums "
     << (sums_ok ? "exact" : "off");
  gate.report(10, "sparsity surrogate subgradient", worst <= 1e-12 && sums_ok, os.str());
}

}  // namespace

int main() {
  Gate gate;
  criterion_closed_form(gate);
  criterion_lossless(gate);
  criterion_objective_equivalence(gate);
  criterion_rank_probabilities(gate);
  criterion_decodability(gate);
  criterion_monte_carlo(gate);
  criterion_descent_vs_oracle(gate);
  criterion_full_support_equivalence(gate);
  criterion_baseline_dominance(gate);
  criterion_subgradient(gate);
  if (gate.failed == 0)
    std::printf("all %d criteria passed\n", 10);
  else
    std::printf("%d of %d criteria FAILED\n", gate.failed, 10);
  return gate.failed;
}
