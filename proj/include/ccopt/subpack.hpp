#pragma once

#include <random>

#include "ccopt/avg_opt.hpp"

namespace ccopt {

struct SubpackConfig {
  int f_hat = 1;        // per-file cap on the number of nonzero subfiles
  double delta = 1e-4;  // stop when the objective improves by no more than this
  int starts = 100;
  uint64_t seed = 0;
};

// Number of entries with |v_i| > tol.
int l0_count(const std::vector<double>& v, double tol = 1e-9);

// Sum of the `count` largest absolute entries (1 <= count <= v.size()).
double sum_largest(const std::vector<double>& v, int count);

// Per-subset sizes of one file of a type-symmetric placement, canonical
// subset order (type bands contiguous).
std::vector<double> expand_file(const SymmetricParam& y, int file);

// Subgradient, over the flattened file-major y layout, of
// y -> sum_largest(expand_file(y, file), f_hat). Ties between equal type
// values are broken toward the smaller type index, so picks are deterministic.
std::vector<double> sum_largest_subgradient(const SymmetricParam& y, int file, int f_hat);

// One DC step: the average-load LP plus, per file, the linearized surrogate
//   sum_largest(U_n y_t, f_hat) + g_n(y_t) . (y - y_t) >= 1,
// which keeps every iterate inside the sparsity-feasible region.
LinearProgram build_linearized_lp(const Instance& inst, const DemandStats& stats,
                                  const SymmetricParam& y_t, const SubpackConfig& cfg);

// Random sparsity-feasible start: an eligible cached type t (1 + C(K,t) <=
// f_hat) chosen uniformly, every file split between type 0 and type t with
// nonincreasing weights rescaled into the memory budget. Falls back to the
// cache-nothing placement when no type is eligible.
SymmetricParam random_feasible(const Instance& inst, const SubpackConfig& cfg,
                               std::mt19937_64& rng);

struct DcResult {
  bool ok = false;        // every LP in the descent solved to optimality
  bool feasible = false;  // final point satisfies the sparsity surrogate (1e-6)
  SymmetricParam y;
  double objective = 0.0;
  int iterations = 0;
  std::vector<int> l0_per_file;   // nonzero subfiles per file of the expansion
  std::vector<double> margin;     // sum_largest(U_n y, f_hat) - 1 per file
};

DcResult dc_solve(const Instance& inst, const DemandStats& stats, const SubpackConfig& cfg,
                  const SymmetricParam& y0);

struct MultiStartResult {
  bool found = false;  // at least one run converged to a feasible point
  DcResult best;       // lowest objective; ties go to the earliest run
  int runs = 0;
  int feasible_runs = 0;
};

// Independent descents from starts seeded seed, seed+1, ...; aggregation does
// not depend on execution order, so results are reproducible.
MultiStartResult dc_multi_start(const Instance& inst, const DemandStats& stats,
                                const SubpackConfig& cfg);

struct SupportOracleResult {
  bool found = false;
  double objective = 0.0;
  SymmetricParam y;
  std::vector<std::vector<int>> support;  // winning type set per file
  long long lp_count = 0;
};

// Global optimum over type-sparse placements: exhaustive enumeration of
// per-file type supports whose band widths sum to at most f_hat, solving the
// restricted average-load LP for each joint pattern.
SupportOracleResult support_oracle(const Instance& inst, const DemandStats& stats, int f_hat);

struct FullSupportOracleResult {
  bool found = false;
  double objective = 0.0;
  PartitionParam x;
  long long lp_count = 0;
};

// Global optimum over per-subset-sparse placements with no symmetry imposed.
// Joint support enumeration is exponential in 2^K, so this is guarded to
// K <= 2; it exists to confirm that the type-symmetric restriction is
// lossless at small sizes.
FullSupportOracleResult full_support_oracle(const Instance& inst, int f_hat);

}  // namespace ccopt
