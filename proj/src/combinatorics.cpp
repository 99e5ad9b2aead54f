#include "ccopt/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace ccopt {

BigInt factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

BigInt binomial(int n, int k) {
  if (n < 0 || k < 0) throw std::invalid_argument("binomial: negative argument");
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int j = 1; j <= k; ++j) {
    r *= (n - k + j);
    r /= j;  // exact: r is divisible by j after the multiply
  }
  return r;
}

double binomial_d(int n, int k) { return binomial(n, k).convert_to<double>(); }

BigInt multinomial3(int K, int m1, int m2) {
  if (K < 0 || m1 < 0 || m2 < 0) throw std::invalid_argument("multinomial3: negative argument");
  if (m1 + m2 > K) throw std::invalid_argument("multinomial3: m1 + m2 exceeds K");
  return factorial(K) / (factorial(m1) * factorial(m2) * factorial(K - m1 - m2));
}

BigInt stirling2(int K, int blocks) {
  if (K < 0 || blocks < 0) throw std::invalid_argument("stirling2: negative argument");
  if (blocks > K) return 0;
  // S(k,u) = u*S(k-1,u) + S(k-1,u-1), rolled row by row.
  std::vector<BigInt> row(blocks + 1, 0);
  row[0] = 1;  // S(0,0)
  for (int k = 1; k <= K; ++k) {
    for (int u = std::min(k, blocks); u >= 1; --u) row[u] = u * row[u] + row[u - 1];
    row[0] = 0;  // S(k,0) = 0 for k >= 1
  }
  return row[blocks];
}

std::vector<std::vector<int>> compositions(int total, int parts) {
  if (total < 0 || parts < 0) throw std::invalid_argument("compositions: negative argument");
  std::vector<std::vector<int>> out;
  if (parts == 0) {
    if (total == 0) out.push_back({});
    return out;
  }
  if (total < parts) return out;
  std::vector<int> cur(parts);
  // Recursive descent, first part smallest -> lexicographic order.
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == parts - 1) {
      cur[pos] = remaining;
      out.push_back(cur);
      return;
    }
    const int left = parts - pos - 1;  // parts still to fill after this one
    for (int v = 1; v <= remaining - left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, total);
  return out;
}

std::vector<std::vector<int>> subsets_of_size(const std::vector<int>& ground, int size) {
  const int n = static_cast<int>(ground.size());
  if (size < 0) throw std::invalid_argument("subsets_of_size: negative size");
  std::vector<std::vector<int>> out;
  if (size > n) return out;
  std::vector<int> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    std::vector<int> subset(size);
    for (int j = 0; j < size; ++j) subset[j] = ground[idx[j]];
    out.push_back(std::move(subset));
    // next combination of positions
    int j = size - 1;
    while (j >= 0 && idx[j] == n - size + j) --j;
    if (j < 0) break;  // size == 0 lands here after emitting the empty subset
    ++idx[j];
    for (int l = j + 1; l < size; ++l) idx[l] = idx[l - 1] + 1;
  }
  return out;
}

long long max_enumeration() {
  if (const char* env = std::getenv("CCOPT_MAX_ENUM")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 1'000'000;
}

// ---------------------------------------------------------------------------
// Popularity

Popularity::Popularity(std::vector<double> p) : p_(std::move(p)) {
  tail_.assign(p_.size() + 1, 0.0);
  for (int i = static_cast<int>(p_.size()) - 1; i >= 0; --i) tail_[i] = tail_[i + 1] + p_[i];
}

Popularity Popularity::zipf(int N, double gamma) {
  if (N < 1) throw std::invalid_argument("zipf: N must be positive");
  if (gamma < 0) throw std::invalid_argument("zipf: gamma must be nonnegative");
  std::vector<double> p(N);
  double z = 0.0;
  for (int n = 1; n <= N; ++n) z += std::pow(static_cast<double>(n), -gamma);
  for (int n = 1; n <= N; ++n) p[n - 1] = std::pow(static_cast<double>(n), -gamma) / z;
  return Popularity(std::move(p));
}

Popularity Popularity::uniform(int N) { return zipf(N, 0.0); }

Popularity Popularity::from_probabilities(std::vector<double> p) {
  if (p.empty()) throw std::invalid_argument("popularity: empty vector");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0) throw std::invalid_argument("popularity: negative entry");
    if (i > 0 && p[i] > p[i - 1] + 1e-12)
      throw std::invalid_argument("popularity: entries must be nonincreasing (sort files by popularity)");
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("popularity: entries must sum to 1");
  return Popularity(std::move(p));
}

// ---------------------------------------------------------------------------
// Leftover-rank probabilities

namespace {

// Probability that `balls` tagged i.i.d. requests cover exactly the bins of
// some size-`want` subset of files first..last (every chosen file hit at
// least once, no request outside the subset).
double occupancy_prob(const Popularity& pop, int first, int last, int want, int balls) {
  if (want == 0) return balls == 0 ? 1.0 : 0.0;
  const int avail = last - first + 1;
  if (avail < want || balls < want) return 0.0;
  std::vector<int> ground(avail);
  std::iota(ground.begin(), ground.end(), first);
  const auto splits = compositions(balls, want);
  double total = 0.0;
  for (const auto& files : subsets_of_size(ground, want)) {
    for (const auto& alpha : splits) {
      BigInt ways = factorial(balls);
      for (int a : alpha) ways /= factorial(a);
      double term = ways.convert_to<double>();
      for (int j = 0; j < want; ++j) term *= std::pow(pop.prob(files[j]), alpha[j]);
      total += term;
    }
  }
  return total;
}

void check_leftover_args(int rank, int distinct, int file, int K, int N) {
  if (K < 1) throw std::invalid_argument("leftover_rank_prob: K must be positive");
  if (distinct < 1 || distinct > std::min(K, N))
    throw std::invalid_argument("leftover_rank_prob: distinct out of range");
  if (rank < 1 || rank > K - distinct)
    throw std::invalid_argument("leftover_rank_prob: rank out of range");
  if (file < 1 || file > N) throw std::invalid_argument("leftover_rank_prob: file out of range");
}

}  // namespace

double leftover_rank_prob(int rank, int distinct, int file, const Popularity& pop, int K) {
  const int N = pop.size();
  check_leftover_args(rank, distinct, file, K, N);
  if (K > 8 || N > 12)
    throw std::invalid_argument("leftover_rank_prob: closed form guarded to K <= 8, N <= 12");

  // Split the demand by the size-`distinct` set of requested files: `a` of
  // them below `file`, `distinct-a-1` above, plus `file` itself.  Ball counts
  // (b1 below, b3 on `file`, b2 above) are constrained by the leftover rank:
  // at least `rank` leftovers at or below `file`, at least K-distinct-rank+1
  // at or above it.  The clip on `a` covers all boundary cases at once.
  const int a_lo = std::max(0, distinct - 1 + file - pop.size());
  const int a_hi = std::min(distinct - 1, file - 1);
  double total = 0.0;
  for (int a = a_lo; a <= a_hi; ++a) {
    const int above = distinct - a - 1;
    // Per-ball-count occupancy factors, hoisted out of the double loop.
    std::vector<double> above_prob(K + 1, 0.0);
    for (int b2 = above; b2 <= K - rank - a - 1; ++b2)
      above_prob[b2] = occupancy_prob(pop, file + 1, N, above, b2);
    for (int b1 = a; b1 <= rank + a - 1 && b1 <= K; ++b1) {
      const double below_prob = occupancy_prob(pop, 1, file - 1, a, b1);
      if (below_prob == 0.0) continue;
      for (int b2 = above; b2 <= K - rank - a - 1; ++b2) {
        const int b3 = K - b1 - b2;
        if (b3 < 1) break;
        const double p_mid = std::pow(pop.prob(file), b3);
        total += multinomial3(K, b1, b2).convert_to<double>() * p_mid * below_prob * above_prob[b2];
      }
    }
  }
  return total;
}

double leftover_rank_prob_enum(int rank, int distinct, int file, const Popularity& pop, int K) {
  const int N = pop.size();
  check_leftover_args(rank, distinct, file, K, N);
  double total = 0.0, carry = 0.0;
  std::vector<int> counts(N + 1);
  for_each_demand(pop, K, [&](const std::vector<int>& d, double prob) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int f : d) ++counts[f];
    int u = 0;
    for (int n = 1; n <= N; ++n) u += counts[n] > 0 ? 1 : 0;
    if (u != distinct) return;
    // Leftovers ascend with the file index; locate the rank-th one.
    int cum = 0, hit = 0;
    for (int n = 1; n <= N; ++n) {
      if (counts[n] > 1) cum += counts[n] - 1;
      if (cum >= rank) { hit = n; break; }
    }
    if (hit != file) return;
    const double t = prob - carry;              // Kahan summation
    const double s = total + t;
    carry = (s - total) - t;
    total = s;
  });
  return total;
}

double distinct_files_prob(int distinct, int K, int N) {
  if (K < 1 || N < 1) throw std::invalid_argument("distinct_files_prob: K and N must be positive");
  if (distinct < 1 || distinct > std::min(K, N))
    throw std::invalid_argument("distinct_files_prob: distinct out of range");
  // (#onto maps from K requests to `distinct` chosen files) / N^K, exactly.
  const BigInt numer = stirling2(K, distinct) * binomial(N, distinct) * factorial(distinct);
  BigInt denom = 1;
  for (int i = 0; i < K; ++i) denom *= N;
  return numer.convert_to<double>() / denom.convert_to<double>();
}

// ---------------------------------------------------------------------------
// DemandStats

DemandStats::DemandStats(int K, int N) : K_(K), N_(N) {
  table_.assign(static_cast<std::size_t>(std::min(K, N)) * K * N, 0.0);
  distinct_uniform_.assign(std::min(K, N) + 1, 0.0);
  for (int u = 1; u <= std::min(K, N); ++u) distinct_uniform_[u] = distinct_files_prob(u, K, N);
}

int DemandStats::index(int rank, int distinct, int file) const {
  return ((distinct - 1) * K_ + (rank - 1)) * N_ + (file - 1);
}

double DemandStats::leftover_rank(int rank, int distinct, int file) const {
  if (distinct < 1 || distinct > std::min(K_, N_) || rank < 1 || rank > K_ - distinct || file < 1 ||
      file > N_)
    throw std::invalid_argument("leftover_rank: index out of range");
  return table_[index(rank, distinct, file)];
}

double DemandStats::distinct_prob_uniform(int distinct) const {
  if (distinct < 1 || distinct > std::min(K_, N_))
    throw std::invalid_argument("distinct_prob_uniform: out of range");
  return distinct_uniform_[distinct];
}

DemandStats DemandStats::compute(const Popularity& pop, int K, bool cross_validate) {
  const int N = pop.size();
  DemandStats stats(K, N);
  for (int u = 1; u <= std::min(K, N); ++u)
    for (int i = 1; i <= K - u; ++i)
      for (int n = 1; n <= N; ++n)
        stats.table_[stats.index(i, u, n)] = leftover_rank_prob(i, u, n, pop, K);
  if (cross_validate && std::pow(static_cast<double>(N), K) <= static_cast<double>(max_enumeration())) {
    const DemandStats brute = enumerate(pop, K);
    for (std::size_t i = 0; i < stats.table_.size(); ++i)
      if (std::abs(stats.table_[i] - brute.table_[i]) > 1e-9)
        throw std::runtime_error("DemandStats: closed form disagrees with enumeration");
  }
  return stats;
}

DemandStats DemandStats::enumerate(const Popularity& pop, int K) {
  const int N = pop.size();
  DemandStats stats(K, N);
  std::vector<double> carry(stats.table_.size(), 0.0);
  std::vector<int> counts(N + 1);
  for_each_demand(pop, K, [&](const std::vector<int>& d, double prob) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int f : d) ++counts[f];
    int u = 0;
    for (int n = 1; n <= N; ++n) u += counts[n] > 0 ? 1 : 0;
    if (u == K) return;  // no leftovers
    int rank = 0;
    for (int n = 1; n <= N; ++n) {
      for (int c = 1; c < counts[n]; ++c) {
        ++rank;
        const int slot = stats.index(rank, u, n);
        const double t = prob - carry[slot];
        const double s = stats.table_[slot] + t;
        carry[slot] = (s - stats.table_[slot]) - t;
        stats.table_[slot] = s;
      }
    }
  });
  return stats;
}

}  // namespace ccopt
