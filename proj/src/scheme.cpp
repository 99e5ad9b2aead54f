#include "ccopt/scheme.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace ccopt {

namespace {

void check_demand(const Instance& inst, const Demand& demand) {
  if (static_cast<int>(demand.size()) != inst.K)
    throw std::invalid_argument("demand: length != K");
  for (int f : demand)
    if (f < 1 || f > inst.N) throw std::invalid_argument("demand: file index out of range");
}

void check_shape(const Instance& inst, const PartitionParam& x) {
  if (x.K != inst.K || x.N != inst.N || static_cast<int>(x.x.size()) != inst.N)
    throw std::invalid_argument("partition parameter shape does not match the instance");
}

// Message length for subset `mask`: longest needed subfile among its users.
double message_length(const SubsetIndexer& idx, const PartitionParam& x, const Demand& demand,
                      uint32_t mask) {
  double len = 0.0;
  for (uint32_t rest = mask; rest;) {
    const uint32_t bit = rest & (~rest + 1);
    rest ^= bit;
    const int k = std::countr_zero(bit);  // 0-based user
    len = std::max(len, x.x[demand[k] - 1][idx.index_of(mask ^ bit)]);
  }
  return len;
}

double demand_load(const SubsetIndexer& idx, const PartitionParam& x, const Demand& demand,
                   uint32_t reps) {
  double sum = 0.0;
  for (uint32_t mask = 1; mask < (1u << idx.users()); ++mask)
    if (mask & reps) sum += message_length(idx, x, demand, mask);
  return sum;
}

}  // namespace

uint32_t representatives(const Demand& demand) {
  uint32_t reps = 0;
  std::vector<int> seen;
  for (std::size_t k = 0; k < demand.size(); ++k) {
    if (std::find(seen.begin(), seen.end(), demand[k]) == seen.end()) {
      seen.push_back(demand[k]);
      reps |= 1u << k;
    }
  }
  return reps;
}

DeliveryPlan delivery(const Instance& inst, const PartitionParam& x, const Demand& demand) {
  check_demand(inst, demand);
  check_shape(inst, x);
  const SubsetIndexer idx(inst.K);
  DeliveryPlan plan;
  plan.representatives = representatives(demand);
  for (int s = inst.K; s >= 1; --s) {
    for (int j = idx.band_start(s); j < idx.band_start(s + 1); ++j) {
      const uint32_t mask = idx.mask_at(j);
      if (mask & plan.representatives)
        plan.messages.push_back({mask, message_length(idx, x, demand, mask)});
    }
  }
  return plan;
}

double load(const Instance& inst, const PartitionParam& x, const Demand& demand) {
  check_demand(inst, demand);
  check_shape(inst, x);
  const SubsetIndexer idx(inst.K);
  return demand_load(idx, x, demand, representatives(demand));
}

double average_load_exact(const Instance& inst, const PartitionParam& x) {
  check_shape(inst, x);
  const SubsetIndexer idx(inst.K);
  double total = 0.0, carry = 0.0;
  for_each_demand(inst.pop, inst.K, [&](const Demand& d, double prob) {
    const double t = prob * demand_load(idx, x, d, representatives(d)) - carry;
    const double s = total + t;
    carry = (s - total) - t;
    total = s;
  });
  return total;
}

McEstimate average_load_mc(const Instance& inst, const PartitionParam& x, long long trials,
                           uint64_t seed) {
  check_shape(inst, x);
  if (trials < 2) throw std::invalid_argument("average_load_mc: need at least 2 trials");
  const SubsetIndexer idx(inst.K);
  // Inverse-CDF sampling from raw generator words keeps the stream identical
  // across standard libraries (std::discrete_distribution is not portable).
  std::vector<double> cdf(inst.N);
  double acc = 0.0;
  for (int n = 0; n < inst.N; ++n) {
    acc += inst.pop.prob(n + 1);
    cdf[n] = acc;
  }
  std::mt19937_64 rng(seed);
  auto draw_file = [&]() {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return it == cdf.end() ? inst.N : static_cast<int>(it - cdf.begin()) + 1;
  };
  Demand d(inst.K);
  double sum = 0.0, sumsq = 0.0;
  for (long long t = 0; t < trials; ++t) {
    for (int k = 0; k < inst.K; ++k) d[k] = draw_file();
    const double v = demand_load(idx, x, d, representatives(d));
    sum += v;
    sumsq += v * v;
  }
  McEstimate est;
  est.trials = trials;
  est.mean = sum / static_cast<double>(trials);
  const double var = std::max(0.0, (sumsq - sum * est.mean) / static_cast<double>(trials - 1));
  est.std_error = std::sqrt(var / static_cast<double>(trials));
  return est;
}

bool decode_check(const Instance& inst, const PartitionParam& x, const Demand& demand) {
  return decode_check(inst, x, demand, delivery(inst, x, demand));
}

bool decode_check(const Instance& inst, const PartitionParam& x, const Demand& demand,
                  const DeliveryPlan& plan) {
  check_demand(inst, demand);
  check_shape(inst, x);
  const SubsetIndexer idx(inst.K);
  const int slots = idx.count();
  const double tol = kFeasTol;

  // known[k][n * slots + j]: user k+1 holds subfile j of file n+1 (cached,
  // zero-sized, or decoded so far).
  std::vector<std::vector<char>> known(inst.K, std::vector<char>(inst.N * slots, 0));
  for (int k = 0; k < inst.K; ++k)
    for (int n = 0; n < inst.N; ++n)
      for (int j = 0; j < slots; ++j)
        if ((idx.mask_at(j) >> k) & 1u || x.x[n][j] <= tol) known[k][n * slots + j] = 1;

  // Peel: a message with exactly one component unknown to a user reveals it
  // (the user strips the known components from the XOR).
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& msg : plan.messages) {
      if (msg.length <= tol) continue;
      for (int k = 0; k < inst.K; ++k) {
        int unknown = -1, count = 0;
        for (uint32_t rest = msg.subset; rest && count < 2;) {
          const uint32_t bit = rest & (~rest + 1);
          rest ^= bit;
          const int j = std::countr_zero(bit);
          const int slot = (demand[j] - 1) * slots + idx.index_of(msg.subset ^ bit);
          if (!known[k][slot]) {
            ++count;
            unknown = slot;
          }
        }
        if (count == 1) {
          known[k][unknown] = 1;
          changed = true;
        }
      }
    }
  }

  for (int k = 0; k < inst.K; ++k) {
    const int n = demand[k] - 1;
    double mass = 0.0;
    for (int j = 0; j < slots; ++j)
      if (known[k][n * slots + j]) mass += x.x[n][j];
    if (std::abs(mass - 1.0) > 1e-9) return false;
  }
  return true;
}

std::vector<std::vector<double>> symmetric_load_coefficients(const Instance& inst,
                                                             const DemandStats& stats) {
  if (stats.K() != inst.K || stats.N() != inst.N)
    throw std::invalid_argument("symmetric_load_coefficients: stats do not match the instance");
  const int K = inst.K, N = inst.N;
  std::vector<std::vector<double>> c(N, std::vector<double>(K + 1, 0.0));
  // A subset of size s+1 needs a type-s subfile of the best-ranked file
  // requested inside it; grouping subsets by that file gives the first term.
  for (int s = 0; s <= K - 1; ++s) {
    const double ways = binomial_d(K, s + 1);
    for (int n = 1; n <= N; ++n) {
      const double all = std::pow(inst.pop.tail(n), s + 1);
      const double tail = std::pow(inst.pop.tail(n + 1), s + 1);
      c[n - 1][s] += ways * (all - tail);
    }
  }
  // Savings from common requests: subsets made only of non-representative
  // users are never served; for each leftover rank i, the remaining users of
  // the subset come from the K-u-i worse-ranked leftovers.
  for (int u = 1; u <= std::min(K, N); ++u)
    for (int i = 1; i <= K - u; ++i)
      for (int s = 0; s <= K - u - 1; ++s) {
        const double ways = binomial_d(K - u - i, s);
        if (ways == 0.0) continue;
        for (int n = 1; n <= N; ++n)
          c[n - 1][s] -= ways * stats.leftover_rank(i, u, n);
      }
  return c;
}

double average_load_symmetric(const Instance& inst, const SymmetricParam& y,
                              const DemandStats& stats) {
  const auto violations = validate(y, inst);
  if (!violations.empty())
    throw std::invalid_argument("average_load_symmetric: infeasible parameter: " +
                                violations.front().describe());
  const auto c = symmetric_load_coefficients(inst, stats);
  double total = 0.0;
  for (int n = 0; n < inst.N; ++n)
    for (int s = 0; s <= inst.K; ++s) total += c[n][s] * y.y[n][s];
  return total;
}

}  // namespace ccopt
