#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace ccopt {

inline constexpr double kLpInf = std::numeric_limits<double>::infinity();

// Dense LP: minimize objective . x subject to eq_rows x = eq_rhs,
// ub_rows x <= ub_rhs, lower <= x <= upper (entries may be +-inf).
// Rows may be shorter than num_vars: variables declared after a row was added
// get coefficient zero in it, so constraints can be interleaved with
// add_variable calls.
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> ub_rows;
  std::vector<double> ub_rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  int add_variable(double lo = 0.0, double hi = kLpInf, double cost = 0.0);
  void add_eq(std::vector<double> row, double rhs);
  void add_ub(std::vector<double> row, double rhs);
  void add_eq_terms(const std::vector<std::pair<int, double>>& terms, double rhs);
  void add_ub_terms(const std::vector<std::pair<int, double>>& terms, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, Numerical };
const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Numerical;
  std::vector<double> x;        // empty unless Optimal
  double objective = 0.0;       // NaN unless Optimal
  int iterations = 0;           // simplex pivots over both phases
  double max_residual = 0.0;    // worst constraint violation of the returned x
  double duality_gap = 0.0;     // |primal - dual| from the final basis multipliers
};

// Two-phase dense simplex. Deterministic: Dantzig pricing with fixed
// tie-breaks, falling back to Bland's rule after a degenerate stall; the
// final basis is re-factorized to compute a clean point and its duals.
LpSolution solve(const LinearProgram& lp);

// Human-readable rendering, for debugging and golden-file tests.
std::string dump(const LinearProgram& lp);

}  // namespace ccopt
