#pragma once

#include <optional>
#include <utility>

#include "ccopt/lp.hpp"
#include "ccopt/scheme.hpp"

namespace ccopt {

enum class Level { Full, Symmetric, Uniform };
const char* level_name(Level level);  // "full-x" | "symmetric-y" | "uniform-z"

struct OptResult {
  Level level = Level::Symmetric;
  LpStatus status = LpStatus::Numerical;
  double objective = 0.0;  // expected load of the returned placement
  int iterations = 0;
  std::optional<PartitionParam> x;
  std::optional<SymmetricParam> y;
  std::optional<UniformParam> z;
};

// Exact expected-load minimization over the full per-subset placement, one
// epigraph variable per (demand, served subset). Guarded: N^K * 2^K within
// the enumeration budget.
LinearProgram build_full_lp(const Instance& inst);
// Variable layout of build_full_lp: x_{file,subset} comes first, file-major.
inline int full_lp_x_index(int K, int file, int subset_index) {
  return (file - 1) * (1 << K) + subset_index;
}

// Same objective restricted to type-symmetric placements (closed form).
LinearProgram build_symmetric_lp(const Instance& inst, const DemandStats& stats);

// Further restricted to file-uniform placements.
LinearProgram build_uniform_lp(const Instance& inst);

OptResult solve_full(const Instance& inst);
OptResult solve_symmetric(const Instance& inst, const DemandStats& stats);
OptResult solve_symmetric(const Instance& inst);
OptResult solve_uniform(const Instance& inst);

struct UniformOptimum {
  UniformParam z;
  double load = 0.0;
};

// Closed-form optimum of the file-uniform problem; requires K*M/N integral
// (within 1e-9). All mass sits on the single type t = K*M/N.
UniformOptimum uniform_closed_form(int K, int N, double M);

// Piecewise-linear interpolation of (memory, load) corner points at M.
double memory_sharing(const std::vector<std::pair<double, double>>& points, double M);

// Uniform placement sized for the worst case with pairwise-coded delivery
// that ignores request overlaps; corner loads memory-shared at M.
double baseline_mn_load(const Instance& inst);

// Same placement family, delivery that skips transmissions made redundant by
// common requests; corner loads by exact enumeration, memory-shared at M.
double baseline_yu_load(const Instance& inst);

}  // namespace ccopt
