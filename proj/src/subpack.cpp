#include "ccopt/subpack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ccopt {

namespace {

void check_config(const Instance& inst, const SubpackConfig& cfg) {
  if (cfg.f_hat < 1 || cfg.f_hat > (1 << inst.K))
    throw std::invalid_argument("subpack: f_hat must lie in [1, 2^K]");
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("subpack: delta must be positive");
  if (cfg.starts < 1) throw std::invalid_argument("subpack: starts must be positive");
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> flatten(const SymmetricParam& y) {
  std::vector<double> f;
  f.reserve(static_cast<std::size_t>(y.N) * (y.K + 1));
  for (const auto& row : y.y) f.insert(f.end(), row.begin(), row.end());
  return f;
}

SymmetricParam unflatten(int K, int N, const std::vector<double>& f) {
  SymmetricParam y;
  y.K = K;
  y.N = N;
  y.y.assign(N, std::vector<double>(K + 1, 0.0));
  for (int n = 0; n < N; ++n)
    for (int s = 0; s <= K; ++s) y.y[n][s] = f[n * (K + 1) + s];
  return y;
}

}  // namespace

int l0_count(const std::vector<double>& v, double tol) {
  int count = 0;
  for (double e : v)
    if (std::abs(e) > tol) ++count;
  return count;
}

double sum_largest(const std::vector<double>& v, int count) {
  if (count < 1 || count > static_cast<int>(v.size()))
    throw std::invalid_argument("sum_largest: count out of range");
  std::vector<double> mag(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mag[i] = std::abs(v[i]);
  std::sort(mag.begin(), mag.end(), std::greater<double>());
  double total = 0.0;
  for (int i = 0; i < count; ++i) total += mag[i];
  return total;
}

std::vector<double> expand_file(const SymmetricParam& y, int file) {
  if (file < 1 || file > y.N) throw std::invalid_argument("expand_file: file out of range");
  const SubsetIndexer idx(y.K);
  std::vector<double> out(idx.count());
  for (int j = 0; j < idx.count(); ++j) out[j] = y.y[file - 1][idx.size_of(j)];
  return out;
}

std::vector<double> sum_largest_subgradient(const SymmetricParam& y, int file, int f_hat) {
  const int K = y.K;
  if (file < 1 || file > y.N) throw std::invalid_argument("subgradient: file out of range");
  if (f_hat < 1 || f_hat > (1 << K)) throw std::invalid_argument("subgradient: f_hat out of range");
  // Order type bands by value (descending), ties toward the smaller type, and
  // hand out band widths until f_hat slots are consumed.
  std::vector<int> order(K + 1);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(y.y[file - 1][a]) > std::abs(y.y[file - 1][b]);
  });
  std::vector<double> g(static_cast<std::size_t>(y.N) * (K + 1), 0.0);
  int remaining = f_hat;
  for (int s : order) {
    if (remaining == 0) break;
    const int width = static_cast<int>(binomial(K, s).convert_to<long long>());
    const int take = std::min(width, remaining);
    g[static_cast<std::size_t>(file - 1) * (K + 1) + s] = static_cast<double>(take);
    remaining -= take;
  }
  return g;
}

LinearProgram build_linearized_lp(const Instance& inst, const DemandStats& stats,
                                  const SymmetricParam& y_t, const SubpackConfig& cfg) {
  check_config(inst, cfg);
  LinearProgram lp = build_symmetric_lp(inst, stats);
  const std::vector<double> flat = flatten(y_t);
  for (int n = 1; n <= inst.N; ++n) {
    const std::vector<double> g = sum_largest_subgradient(y_t, n, cfg.f_hat);
    const double value = sum_largest(expand_file(y_t, n), cfg.f_hat);
    double dot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * flat[i];
    std::vector<double> row(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) row[i] = -g[i];
    lp.add_ub(std::move(row), value - dot - 1.0);
  }
  return lp;
}

SymmetricParam random_feasible(const Instance& inst, const SubpackConfig& cfg,
                               std::mt19937_64& rng) {
  check_config(inst, cfg);
  const int K = inst.K, N = inst.N;
  std::vector<int> eligible;
  for (int s = 1; s <= K; ++s)
    if (1.0 + binomial_d(K, s) <= static_cast<double>(cfg.f_hat)) eligible.push_back(s);

  SymmetricParam y;
  y.K = K;
  y.N = N;
  y.y.assign(N, std::vector<double>(K + 1, 0.0));
  if (eligible.empty()) {  // only single-band placements fit: cache nothing
    for (int n = 0; n < N; ++n) y.y[n][0] = 1.0;
    return y;
  }
  const int t = eligible[static_cast<int>(uniform01(rng) * eligible.size()) % eligible.size()];

  std::vector<double> c(N);
  for (double& v : c) v = uniform01(rng);
  std::sort(c.begin(), c.end(), std::greater<double>());
  const double budget = inst.M * K / t;  // sum c_n * t/K <= M
  const double total = std::accumulate(c.begin(), c.end(), 0.0);
  if (total > budget && total > 0.0) {
    const double scale = budget / total;
    for (double& v : c) v *= scale;
  }
  const double width = binomial_d(K, t);
  for (int n = 0; n < N; ++n) {
    y.y[n][t] = c[n] / width;
    y.y[n][0] = 1.0 - c[n];
  }
  return y;
}

DcResult dc_solve(const Instance& inst, const DemandStats& stats, const SubpackConfig& cfg,
                  const SymmetricParam& y0) {
  check_config(inst, cfg);
  {
    const auto violations = validate(y0, inst);
    if (!violations.empty())
      throw std::invalid_argument("dc_solve: infeasible start: " + violations.front().describe());
  }
  const auto coeff = symmetric_load_coefficients(inst, stats);
  auto objective_of = [&](const SymmetricParam& y) {
    double total = 0.0;
    for (int n = 0; n < inst.N; ++n)
      for (int s = 0; s <= inst.K; ++s) total += coeff[n][s] * y.y[n][s];
    return total;
  };

  DcResult res;
  res.y = y0;
  double prev = objective_of(y0);
  constexpr int kMaxIterations = 500;
  for (int it = 0; it < kMaxIterations; ++it) {
    const LinearProgram lp = build_linearized_lp(inst, stats, res.y, cfg);
    const LpSolution sol = solve(lp);
    if (sol.status != LpStatus::Optimal) {
      res.ok = false;
      res.objective = prev;
      return res;
    }
    SymmetricParam next = unflatten(inst.K, inst.N, sol.x);
    for (auto& row : next.y) clamp_small_negatives(row);
    res.y = std::move(next);
    res.iterations = it + 1;
    const double obj = objective_of(res.y);
    const double drop = prev - obj;
    prev = obj;
    if (drop <= cfg.delta) break;
  }
  res.ok = true;
  res.objective = prev;
  res.margin.resize(inst.N);
  res.l0_per_file.resize(inst.N);
  res.feasible = true;
  for (int n = 1; n <= inst.N; ++n) {
    const auto sizes = expand_file(res.y, n);
    res.margin[n - 1] = sum_largest(sizes, cfg.f_hat) - 1.0;
    res.l0_per_file[n - 1] = l0_count(sizes);
    if (res.margin[n - 1] < -1e-6) res.feasible = false;
  }
  return res;
}

MultiStartResult dc_multi_start(const Instance& inst, const DemandStats& stats,
                                const SubpackConfig& cfg) {
  check_config(inst, cfg);
  MultiStartResult out;
  out.runs = cfg.starts;
  for (int run = 0; run < cfg.starts; ++run) {
    std::mt19937_64 rng(cfg.seed + static_cast<uint64_t>(run));
    SubpackConfig run_cfg = cfg;
    const SymmetricParam y0 = random_feasible(inst, run_cfg, rng);
    const DcResult res = dc_solve(inst, stats, run_cfg, y0);
    if (!res.ok || !res.feasible) continue;
    ++out.feasible_runs;
    if (!out.found || res.objective < out.best.objective) {  // ties keep the earliest run
      out.found = true;
      out.best = res;
    }
  }
  return out;
}

SupportOracleResult support_oracle(const Instance& inst, const DemandStats& stats, int f_hat) {
  if (f_hat < 1 || f_hat > (1 << inst.K))
    throw std::invalid_argument("support_oracle: f_hat out of range");
  const int K = inst.K, N = inst.N;

  // Candidate type sets with total band width within the cap.
  std::vector<uint32_t> patterns;
  for (uint32_t bits = 1; bits < (1u << (K + 1)); ++bits) {
    double width = 0.0;
    for (int s = 0; s <= K; ++s)
      if (bits & (1u << s)) width += binomial_d(K, s);
    if (width <= static_cast<double>(f_hat)) patterns.push_back(bits);
  }

  const LinearProgram base = build_symmetric_lp(inst, stats);
  SupportOracleResult out;
  std::vector<int> pick(N, 0);
  while (true) {
    // The ordering constraint forces supports (over types >= 1) to nest
    // downward with the file index; other joint patterns are redundant.
    bool nested = true;
    for (int n = 0; n + 1 < N && nested; ++n) {
      const uint32_t hi = patterns[pick[n]] >> 1, lo = patterns[pick[n + 1]] >> 1;
      if ((lo & ~hi) != 0) nested = false;
    }
    if (nested) {
      LinearProgram lp = base;
      for (int n = 0; n < N; ++n)
        for (int s = 0; s <= K; ++s)
          if (!(patterns[pick[n]] & (1u << s))) lp.upper[n * (K + 1) + s] = 0.0;
      const LpSolution sol = solve(lp);
      ++out.lp_count;
      if (sol.status == LpStatus::Optimal &&
          (!out.found || sol.objective < out.objective - 0.0)) {
        out.found = true;
        out.objective = sol.objective;
        SymmetricParam y;
        y.K = K;
        y.N = N;
        y.y.assign(N, std::vector<double>(K + 1, 0.0));
        for (int n = 0; n < N; ++n)
          for (int s = 0; s <= K; ++s) y.y[n][s] = sol.x[n * (K + 1) + s];
        for (auto& row : y.y) clamp_small_negatives(row);
        out.y = std::move(y);
        out.support.assign(N, {});
        for (int n = 0; n < N; ++n)
          for (int s = 0; s <= K; ++s)
            if (patterns[pick[n]] & (1u << s)) out.support[n].push_back(s);
      }
    }
    int pos = N - 1;
    while (pos >= 0 && pick[pos] == static_cast<int>(patterns.size()) - 1) pick[pos--] = 0;
    if (pos < 0) break;
    ++pick[pos];
  }
  return out;
}

FullSupportOracleResult full_support_oracle(const Instance& inst, int f_hat) {
  if (inst.K > 2)
    throw std::invalid_argument("full_support_oracle: guarded to K <= 2");
  const int slots = 1 << inst.K;
  if (f_hat < 1 || f_hat > slots)
    throw std::invalid_argument("full_support_oracle: f_hat out of range");

  // Zeroing more variables only shrinks the feasible set, so it suffices to
  // enumerate maximal supports of size exactly f_hat.
  std::vector<int> all(slots);
  std::iota(all.begin(), all.end(), 0);
  const auto supports = subsets_of_size(all, f_hat);

  const LinearProgram base = build_full_lp(inst);
  FullSupportOracleResult out;
  std::vector<int> pick(inst.N, 0);
  while (true) {
    LinearProgram lp = base;
    for (int n = 0; n < inst.N; ++n) {
      std::vector<char> keep(slots, 0);
      for (int j : supports[pick[n]]) keep[j] = 1;
      for (int j = 0; j < slots; ++j)
        if (!keep[j]) lp.upper[full_lp_x_index(inst.K, n + 1, j)] = 0.0;
    }
    const LpSolution sol = solve(lp);
    ++out.lp_count;
    if (sol.status == LpStatus::Optimal && (!out.found || sol.objective < out.objective)) {
      out.found = true;
      out.objective = sol.objective;
      PartitionParam x;
      x.K = inst.K;
      x.N = inst.N;
      x.x.assign(inst.N, std::vector<double>(slots, 0.0));
      for (int n = 1; n <= inst.N; ++n) {
        for (int j = 0; j < slots; ++j) x.x[n - 1][j] = sol.x[full_lp_x_index(inst.K, n, j)];
        clamp_small_negatives(x.x[n - 1]);
      }
      out.x = std::move(x);
    }
    int pos = inst.N - 1;
    while (pos >= 0 && pick[pos] == static_cast<int>(supports.size()) - 1) pick[pos--] = 0;
    if (pos < 0) break;
    ++pick[pos];
  }
  return out;
}

}  // namespace ccopt
