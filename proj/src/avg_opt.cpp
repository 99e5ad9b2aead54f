#include "ccopt/avg_opt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace ccopt {

const char* level_name(Level level) {
  switch (level) {
    case Level::Full: return "full-x";
    case Level::Symmetric: return "symmetric-y";
    case Level::Uniform: return "uniform-z";
  }
  return "unknown";
}

LinearProgram build_full_lp(const Instance& inst) {
  const double demands = std::pow(static_cast<double>(inst.N), inst.K);
  const double slots = static_cast<double>(1 << inst.K);
  if (demands * slots > static_cast<double>(max_enumeration()))
    throw std::runtime_error("build_full_lp: N^K * 2^K exceeds the enumeration budget");

  const SubsetIndexer idx(inst.K);
  LinearProgram lp;
  for (int n = 1; n <= inst.N; ++n)
    for (int j = 0; j < idx.count(); ++j) lp.add_variable(0.0, 1.0, 0.0);

  // Per-file partition and per-user memory constraints on the x block.
  for (int n = 1; n <= inst.N; ++n) {
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j < idx.count(); ++j) terms.emplace_back(full_lp_x_index(inst.K, n, j), 1.0);
    lp.add_eq_terms(terms, 1.0);
  }
  for (int k = 1; k <= inst.K; ++k) {
    std::vector<std::pair<int, double>> terms;
    for (int n = 1; n <= inst.N; ++n)
      for (int j = 0; j < idx.count(); ++j)
        if (idx.mask_at(j) & (1u << (k - 1)))
          terms.emplace_back(full_lp_x_index(inst.K, n, j), 1.0);
    lp.add_ub_terms(terms, inst.M);
  }

  // One epigraph variable per (demand, served subset), weighted by the demand
  // probability; x_{d_k, S\{k}} <= t_{d,S} forces t up to the message length.
  for_each_demand(inst.pop, inst.K, [&](const Demand& d, double prob) {
    const uint32_t reps = representatives(d);
    for (uint32_t mask = 1; mask < (1u << inst.K); ++mask) {
      if (!(mask & reps)) continue;
      const int t = lp.add_variable(0.0, kLpInf, prob);
      for (uint32_t rest = mask; rest;) {
        const uint32_t bit = rest & (~rest + 1);
        rest ^= bit;
        const int k = std::countr_zero(bit);
        const int xv = full_lp_x_index(inst.K, d[k], idx.index_of(mask ^ bit));
        lp.add_ub_terms({{xv, 1.0}, {t, -1.0}}, 0.0);
      }
    }
  });
  return lp;
}

LinearProgram build_symmetric_lp(const Instance& inst, const DemandStats& stats) {
  const int K = inst.K, N = inst.N;
  const auto c = symmetric_load_coefficients(inst, stats);
  LinearProgram lp;
  auto var = [K](int n, int s) { return (n - 1) * (K + 1) + s; };
  for (int n = 1; n <= N; ++n)
    for (int s = 0; s <= K; ++s) lp.add_variable(0.0, 1.0, c[n - 1][s]);

  for (int n = 1; n <= N; ++n) {
    std::vector<std::pair<int, double>> terms;
    for (int s = 0; s <= K; ++s) terms.emplace_back(var(n, s), binomial_d(K, s));
    lp.add_eq_terms(terms, 1.0);
  }
  {
    std::vector<std::pair<int, double>> terms;
    for (int n = 1; n <= N; ++n)
      for (int s = 1; s <= K; ++s) terms.emplace_back(var(n, s), binomial_d(K - 1, s - 1));
    lp.add_ub_terms(terms, inst.M);
  }
  // Popularity ordering: a less popular file never gets a larger type size.
  for (int n = 1; n < N; ++n)
    for (int s = 1; s <= K; ++s)
      lp.add_ub_terms({{var(n + 1, s), 1.0}, {var(n, s), -1.0}}, 0.0);
  return lp;
}

LinearProgram build_uniform_lp(const Instance& inst) {
  const int K = inst.K, N = inst.N;
  LinearProgram lp;
  std::vector<double> cost(K + 1, 0.0);
  for (int s = 0; s <= K - 1; ++s) cost[s] = binomial_d(K, s + 1);
  for (int u = 1; u <= std::min(K, N); ++u) {
    const double pu = distinct_files_prob(u, K, N);
    for (int s = 0; s <= K - u - 1; ++s) cost[s] -= pu * binomial_d(K - u, s + 1);
  }
  for (int s = 0; s <= K; ++s) lp.add_variable(0.0, 1.0, cost[s]);

  std::vector<std::pair<int, double>> sum_terms, mem_terms;
  for (int s = 0; s <= K; ++s) {
    sum_terms.emplace_back(s, binomial_d(K, s));
    if (s >= 1) mem_terms.emplace_back(s, binomial_d(K, s) * s);
  }
  lp.add_eq_terms(sum_terms, 1.0);
  lp.add_ub_terms(mem_terms, inst.K * inst.M / inst.N);
  return lp;
}

namespace {

void require_clean(const std::vector<Violation>& violations, const char* what) {
  if (!violations.empty())
    throw std::runtime_error(std::string(what) + ": solver returned an infeasible parameter: " +
                             violations.front().describe());
}

}  // namespace

OptResult solve_full(const Instance& inst) {
  const LinearProgram lp = build_full_lp(inst);
  const LpSolution sol = solve(lp);
  OptResult res;
  res.level = Level::Full;
  res.status = sol.status;
  res.iterations = sol.iterations;
  if (sol.status != LpStatus::Optimal) return res;
  PartitionParam x;
  x.K = inst.K;
  x.N = inst.N;
  x.x.assign(inst.N, std::vector<double>(1 << inst.K, 0.0));
  for (int n = 1; n <= inst.N; ++n) {
    for (int j = 0; j < (1 << inst.K); ++j) x.x[n - 1][j] = sol.x[full_lp_x_index(inst.K, n, j)];
    clamp_small_negatives(x.x[n - 1]);
  }
  require_clean(validate(x, inst), "solve_full");
  res.objective = sol.objective;
  res.x = std::move(x);
  return res;
}

OptResult solve_symmetric(const Instance& inst, const DemandStats& stats) {
  const LinearProgram lp = build_symmetric_lp(inst, stats);
  const LpSolution sol = solve(lp);
  OptResult res;
  res.level = Level::Symmetric;
  res.status = sol.status;
  res.iterations = sol.iterations;
  if (sol.status != LpStatus::Optimal) return res;
  SymmetricParam y;
  y.K = inst.K;
  y.N = inst.N;
  y.y.assign(inst.N, std::vector<double>(inst.K + 1, 0.0));
  for (int n = 0; n < inst.N; ++n) {
    for (int s = 0; s <= inst.K; ++s) y.y[n][s] = sol.x[n * (inst.K + 1) + s];
    clamp_small_negatives(y.y[n]);
  }
  require_clean(validate(y, inst), "solve_symmetric");
  res.objective = sol.objective;
  res.y = std::move(y);
  return res;
}

OptResult solve_symmetric(const Instance& inst) {
  return solve_symmetric(inst, DemandStats::compute(inst.pop, inst.K));
}

OptResult solve_uniform(const Instance& inst) {
  const LinearProgram lp = build_uniform_lp(inst);
  const LpSolution sol = solve(lp);
  OptResult res;
  res.level = Level::Uniform;
  res.status = sol.status;
  res.iterations = sol.iterations;
  if (sol.status != LpStatus::Optimal) return res;
  UniformParam z;
  z.K = inst.K;
  z.z = sol.x;
  clamp_small_negatives(z.z);
  require_clean(validate(z, inst), "solve_uniform");
  res.objective = sol.objective;
  res.z = std::move(z);
  return res;
}

UniformOptimum uniform_closed_form(int K, int N, double M) {
  const double t = static_cast<double>(K) * M / N;
  const int ti = static_cast<int>(std::lround(t));
  if (std::abs(t - ti) > 1e-9)
    throw std::invalid_argument("uniform_closed_form: K*M/N must be an integer");
  UniformOptimum out;
  out.z.K = K;
  out.z.z.assign(K + 1, 0.0);
  out.z.z[ti] = 1.0 / binomial_d(K, ti);
  double load = (K - t) / (1.0 + t);
  for (int u = 1; u <= std::min(K, N); ++u)
    load -= distinct_files_prob(u, K, N) * binomial_d(K - u, ti + 1) / binomial_d(K, ti);
  out.load = load;
  return out;
}

double memory_sharing(const std::vector<std::pair<double, double>>& points, double M) {
  if (points.size() < 2) throw std::invalid_argument("memory_sharing: need at least two points");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].first <= points[i - 1].first)
      throw std::invalid_argument("memory_sharing: memory points must be increasing");
  if (M < points.front().first - 1e-9 || M > points.back().first + 1e-9)
    throw std::invalid_argument("memory_sharing: M outside the covered range");
  M = std::clamp(M, points.front().first, points.back().first);
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (M <= points[i].first + 1e-12) {
      const auto& [m0, r0] = points[i - 1];
      const auto& [m1, r1] = points[i];
      const double lam = (M - m0) / (m1 - m0);
      return (1.0 - lam) * r0 + lam * r1;
    }
  }
  return points.back().second;
}

double baseline_mn_load(const Instance& inst) {
  std::vector<std::pair<double, double>> corners;
  for (int t = 0; t <= inst.K; ++t) {
    const double m = static_cast<double>(t) * inst.N / inst.K;
    corners.emplace_back(m, static_cast<double>(inst.K - t) / (1.0 + t));
  }
  return memory_sharing(corners, inst.M);
}

double baseline_yu_load(const Instance& inst) {
  std::vector<std::pair<double, double>> corners;
  for (int t = 0; t <= inst.K; ++t) {
    UniformParam z;
    z.K = inst.K;
    z.z.assign(inst.K + 1, 0.0);
    z.z[t] = 1.0 / binomial_d(inst.K, t);
    const double m = static_cast<double>(t) * inst.N / inst.K;
    corners.emplace_back(m, average_load_exact(inst, expand(expand(z, inst.N))));
  }
  return memory_sharing(corners, inst.M);
}

}  // namespace ccopt
