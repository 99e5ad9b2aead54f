#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ccopt {

using BigInt = boost::multiprecision::cpp_int;

// Exact binomial coefficient. C(n,k) = 0 for k > n, so truncated sums can run
// over their full nominal index ranges without special-casing the tail.
BigInt binomial(int n, int k);
double binomial_d(int n, int k);

BigInt factorial(int n);

// K! / (m1! * m2! * (K-m1-m2)!). Rejects m1+m2 > K.
BigInt multinomial3(int K, int m1, int m2);

// Stirling number of the second kind: partitions of a K-element set into
// `blocks` nonempty blocks.
BigInt stirling2(int K, int blocks);

// All vectors of `parts` positive integers summing to `total`, in
// lexicographic order. compositions(0, 0) = { () }; empty when impossible.
std::vector<std::vector<int>> compositions(int total, int parts);

// All size-`size` subsets of `ground` (kept in the given order),
// lexicographic by position.
std::vector<std::vector<int>> subsets_of_size(const std::vector<int>& ground, int size);

// Enumeration budget for exhaustive demand walks; defaults to 1e6 and can be
// overridden through the CCOPT_MAX_ENUM environment variable.
long long max_enumeration();

class Popularity;

// Walk all N^K demands (odometer order, each entry 1..N), invoking
// fn(demand, probability). Throws when N^K exceeds max_enumeration().
template <typename Fn>
void for_each_demand(const Popularity& pop, int K, Fn&& fn);

// File popularity: a nonincreasing probability vector over files 1..N.
class Popularity {
 public:
  static Popularity zipf(int N, double gamma);
  static Popularity uniform(int N);
  // Validates: nonnegative, nonincreasing, sums to 1 within 1e-12.
  static Popularity from_probabilities(std::vector<double> p);

  int size() const { return static_cast<int>(p_.size()); }
  double prob(int file) const { return p_[file - 1]; }               // 1-based
  double tail(int file) const { return tail_[file - 1]; }            // sum over files >= file; tail(N+1) = 0
  const std::vector<double>& values() const { return p_; }

 private:
  explicit Popularity(std::vector<double> p);
  std::vector<double> p_;
  std::vector<double> tail_;
};

// Probability that K i.i.d. requests drawn from `pop` hit exactly `distinct`
// different files AND, after removing one request per distinct file, the
// `rank`-th smallest remaining ("leftover") request is `file`. Closed-form
// occupancy evaluation; guarded to K <= 8, N <= 12.
double leftover_rank_prob(int rank, int distinct, int file, const Popularity& pop, int K);

// Same quantity by exhaustive enumeration of all N^K demands (oracle for the
// closed form). Guarded by max_enumeration().
double leftover_rank_prob_enum(int rank, int distinct, int file, const Popularity& pop, int K);

// Probability that K i.i.d. uniform requests over N files hit exactly
// `distinct` different files (exact rational, evaluated in double).
double distinct_files_prob(int distinct, int K, int N);

// Precomputed demand statistics for one (popularity, K) pair.
class DemandStats {
 public:
  // Closed-form table; when cross_validate is set and N^K is within the
  // enumeration budget, the whole table is checked against a brute-force
  // demand walk and a mismatch throws.
  static DemandStats compute(const Popularity& pop, int K, bool cross_validate = true);
  // Brute-force table (single pass over all N^K demands).
  static DemandStats enumerate(const Popularity& pop, int K);

  int K() const { return K_; }
  int N() const { return N_; }
  // Valid for 1 <= distinct <= min(K,N), 1 <= rank <= K-distinct, 1 <= file <= N.
  double leftover_rank(int rank, int distinct, int file) const;
  // Uniform-popularity closed form for the distinct-file count.
  double distinct_prob_uniform(int distinct) const;

 private:
  DemandStats(int K, int N);
  int index(int rank, int distinct, int file) const;
  int K_ = 0, N_ = 0;
  std::vector<double> table_;             // (distinct, rank, file) -> probability
  std::vector<double> distinct_uniform_;  // distinct -> probability under uniform pop
};

template <typename Fn>
void for_each_demand(const Popularity& pop, int K, Fn&& fn) {
  const int N = pop.size();
  if (std::pow(static_cast<double>(N), K) > static_cast<double>(max_enumeration()))
    throw std::runtime_error(
        "demand enumeration: N^K exceeds the enumeration budget (set CCOPT_MAX_ENUM to raise)");
  std::vector<int> d(K, 1);
  while (true) {
    double prob = 1.0;
    for (int k = 0; k < K; ++k) prob *= pop.prob(d[k]);
    fn(d, prob);
    int pos = K - 1;
    while (pos >= 0 && d[pos] == N) d[pos--] = 1;
    if (pos < 0) break;
    ++d[pos];
  }
}

}  // namespace ccopt
