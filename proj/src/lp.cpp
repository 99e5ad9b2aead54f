#include "ccopt/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ccopt {

int LinearProgram::add_variable(double lo, double hi, double cost) {
  if (std::isnan(lo) || std::isnan(hi) || std::isnan(cost))
    throw std::invalid_argument("lp: NaN in variable definition");
  if (lo > hi) throw std::invalid_argument("lp: empty variable bound interval");
  lower.push_back(lo);
  upper.push_back(hi);
  objective.push_back(cost);
  return num_vars++;
}

void LinearProgram::add_eq(std::vector<double> row, double rhs) {
  if (static_cast<int>(row.size()) > num_vars)
    throw std::invalid_argument("lp: equality row references undeclared variables");
  eq_rows.push_back(std::move(row));
  eq_rhs.push_back(rhs);
}

void LinearProgram::add_ub(std::vector<double> row, double rhs) {
  if (static_cast<int>(row.size()) > num_vars)
    throw std::invalid_argument("lp: inequality row references undeclared variables");
  ub_rows.push_back(std::move(row));
  ub_rhs.push_back(rhs);
}

void LinearProgram::add_eq_terms(const std::vector<std::pair<int, double>>& terms, double rhs) {
  std::vector<double> row(num_vars, 0.0);
  for (const auto& [j, a] : terms) row.at(j) += a;
  add_eq(std::move(row), rhs);
}

void LinearProgram::add_ub_terms(const std::vector<std::pair<int, double>>& terms, double rhs) {
  std::vector<double> row(num_vars, 0.0);
  for (const auto& [j, a] : terms) row.at(j) += a;
  add_ub(std::move(row), rhs);
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
    case LpStatus::Numerical: return "numerical";
  }
  return "unknown";
}

namespace {

constexpr double kPivTol = 1e-10;   // minimum usable pivot magnitude
constexpr double kCostTol = 1e-10;  // reduced-cost threshold for entering

// Standard-form image of one original variable.
struct VarMap {
  enum Kind { Shift, Mirror, Split } kind;
  int c1 = -1, c2 = -1;
  double offset = 0.0;
};

// Dense LU with partial pivoting; used to re-solve the final basis system.
struct Lu {
  int n = 0;
  std::vector<double> a;  // row-major, factored in place
  std::vector<int> perm;
  bool ok = false;

  explicit Lu(std::vector<double> matrix, int size) : n(size), a(std::move(matrix)) {
    perm.resize(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    ok = true;
    for (int col = 0; col < n; ++col) {
      int best = col;
      double bestv = std::abs(a[perm[col] * n + col]);
      for (int r = col + 1; r < n; ++r) {
        const double v = std::abs(a[perm[r] * n + col]);
        if (v > bestv) { bestv = v; best = r; }
      }
      if (bestv < 1e-12) { ok = false; return; }
      std::swap(perm[col], perm[best]);
      const double piv = a[perm[col] * n + col];
      for (int r = col + 1; r < n; ++r) {
        double* row = &a[perm[r] * n];
        const double f = row[col] / piv;
        row[col] = f;
        if (f != 0.0) {
          const double* prow = &a[perm[col] * n];
          for (int c = col + 1; c < n; ++c) row[c] -= f * prow[c];
        }
      }
    }
  }

  std::vector<double> solve(const std::vector<double>& b) const {
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      double v = b[perm[i]];
      const double* row = &a[perm[i] * n];
      for (int j = 0; j < i; ++j) v -= row[j] * y[j];
      y[i] = v;
    }
    for (int i = n - 1; i >= 0; --i) {
      const double* row = &a[perm[i] * n];
      double v = y[i];
      for (int j = i + 1; j < n; ++j) v -= row[j] * y[j];
      y[i] = v / row[i];
    }
    return y;
  }
};

class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp) : lp_(lp) { build(); }

  LpSolution run() {
    LpSolution sol;
    sol.objective = std::numeric_limits<double>::quiet_NaN();
    if (rows_ > 0 && has_artificials_) {
      set_phase_costs(/*phase1=*/true);
      const Step st = iterate(/*phase1=*/true);
      sol.iterations = iterations_;
      if (st == Step::IterLimit) { sol.status = LpStatus::IterationLimit; return sol; }
      const double bmax = std::max(1.0, max_abs_rhs_);
      if (objective_value() > 1e-8 * bmax) { sol.status = LpStatus::Infeasible; return sol; }
      expel_artificials();
    }
    set_phase_costs(/*phase1=*/false);
    const Step st = iterate(/*phase1=*/false);
    sol.iterations = iterations_;
    if (st == Step::IterLimit) { sol.status = LpStatus::IterationLimit; return sol; }
    if (st == Step::Unbounded) { sol.status = LpStatus::Unbounded; return sol; }
    finish(sol);
    return sol;
  }

 private:
  enum class Step { Done, Unbounded, IterLimit };

  const LinearProgram& lp_;

  int rows_ = 0, nstruct_ = 0, nslack_ = 0, nart_ = 0, cols_ = 0;
  bool has_artificials_ = false;
  std::vector<VarMap> varmap_;
  std::vector<double> tab_;      // (rows_+1) x (cols_+1); last row = reduced costs, last col = rhs
  std::vector<double> a0_;       // untouched standard-form matrix, rows_ x cols_
  std::vector<double> b0_;
  std::vector<double> cost_;     // current phase costs over standard columns
  std::vector<double> cost2_;    // phase-2 costs
  std::vector<int> basis_;
  std::vector<char> in_basis_;
  double max_abs_rhs_ = 0.0;
  int iterations_ = 0;
  int max_iterations_ = 0;
  bool bland_ = false;
  int stall_ = 0;
  double last_obj_ = 0.0;

  double& at(int r, int c) { return tab_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double rhs(int r) const { return tab_[static_cast<std::size_t>(r) * (cols_ + 1) + cols_]; }
  double objective_value() const { return -tab_[static_cast<std::size_t>(rows_) * (cols_ + 1) + cols_]; }

  void build() {
    const int nv = lp_.num_vars;
    if (static_cast<int>(lp_.objective.size()) != nv || static_cast<int>(lp_.lower.size()) != nv ||
        static_cast<int>(lp_.upper.size()) != nv)
      throw std::invalid_argument("lp: inconsistent vector sizes");

    varmap_.resize(nv);
    std::vector<std::pair<int, double>> range_rows;  // (std col, width) from two-sided bounds
    for (int v = 0; v < nv; ++v) {
      const double lo = lp_.lower[v], hi = lp_.upper[v];
      if (std::isfinite(lo)) {
        varmap_[v] = {VarMap::Shift, nstruct_++, -1, lo};
        if (std::isfinite(hi)) range_rows.emplace_back(varmap_[v].c1, hi - lo);
      } else if (std::isfinite(hi)) {
        varmap_[v] = {VarMap::Mirror, nstruct_++, -1, hi};
      } else {
        varmap_[v] = {VarMap::Split, nstruct_, nstruct_ + 1, 0.0};
        nstruct_ += 2;
      }
    }

    const int n_eq = static_cast<int>(lp_.eq_rows.size());
    const int n_ub = static_cast<int>(lp_.ub_rows.size()) + static_cast<int>(range_rows.size());
    rows_ = n_eq + n_ub;
    nslack_ = n_ub;

    // First build rows over structural columns only, then place slacks and
    // artificials once the layout is known.
    std::vector<std::vector<double>> rowdata(rows_, std::vector<double>(nstruct_, 0.0));
    std::vector<double> rowrhs(rows_, 0.0);
    std::vector<char> is_eq(rows_, 0);
    int r = 0;
    auto emit = [&](const std::vector<double>& row, double rhs_in, bool eq) {
      double b = rhs_in;
      const int span = std::min(nv, static_cast<int>(row.size()));
      for (int v = 0; v < span; ++v) {
        const double a = row[v];
        if (a == 0.0) continue;
        const VarMap& m = varmap_[v];
        switch (m.kind) {
          case VarMap::Shift: rowdata[r][m.c1] += a; b -= a * m.offset; break;
          case VarMap::Mirror: rowdata[r][m.c1] -= a; b -= a * m.offset; break;
          case VarMap::Split: rowdata[r][m.c1] += a; rowdata[r][m.c2] -= a; break;
        }
      }
      rowrhs[r] = b;
      is_eq[r] = eq ? 1 : 0;
      ++r;
    };
    for (int i = 0; i < n_eq; ++i) emit(lp_.eq_rows[i], lp_.eq_rhs[i], true);
    for (std::size_t i = 0; i < lp_.ub_rows.size(); ++i) emit(lp_.ub_rows[i], lp_.ub_rhs[i], false);
    for (const auto& [col, width] : range_rows) {
      rowdata[r][col] = 1.0;
      rowrhs[r] = width;
      is_eq[r] = 0;
      ++r;
    }

    // Slack sign becomes -1 when the row is negated to make the rhs
    // nonnegative; such rows need an artificial, as do all equalities.
    std::vector<int> slack_col(rows_, -1), art_col(rows_, -1);
    int next_slack = nstruct_;
    std::vector<double> slack_sign(rows_, 1.0);
    for (int i = 0, s = 0; i < rows_; ++i) {
      if (!is_eq[i]) slack_col[i] = next_slack + s++;
    }
    int art_count = 0;
    for (int i = 0; i < rows_; ++i) {
      const bool neg = rowrhs[i] < 0.0;
      if (neg) {
        for (double& ai : rowdata[i]) ai = -ai;
        rowrhs[i] = -rowrhs[i];
        slack_sign[i] = -1.0;
      }
      if (is_eq[i] || slack_sign[i] < 0.0) ++art_count;
    }
    nart_ = art_count;
    has_artificials_ = nart_ > 0;
    cols_ = nstruct_ + nslack_ + nart_;
    int next_art = nstruct_ + nslack_;
    for (int i = 0; i < rows_; ++i)
      if (is_eq[i] || slack_sign[i] < 0.0) art_col[i] = next_art++;

    tab_.assign(static_cast<std::size_t>(rows_ + 1) * (cols_ + 1), 0.0);
    a0_.assign(static_cast<std::size_t>(rows_) * cols_, 0.0);
    b0_.resize(rows_);
    basis_.resize(rows_);
    in_basis_.assign(cols_, 0);
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < nstruct_; ++j) at(i, j) = rowdata[i][j];
      if (slack_col[i] >= 0) at(i, slack_col[i]) = slack_sign[i];
      if (art_col[i] >= 0) at(i, art_col[i]) = 1.0;
      at(i, cols_) = rowrhs[i];
      max_abs_rhs_ = std::max(max_abs_rhs_, rowrhs[i]);
      basis_[i] = art_col[i] >= 0 ? art_col[i] : slack_col[i];
      in_basis_[basis_[i]] = 1;
      for (int j = 0; j < cols_; ++j) a0_[static_cast<std::size_t>(i) * cols_ + j] = at(i, j);
      b0_[i] = rowrhs[i];
    }

    cost2_.assign(cols_, 0.0);
    for (int v = 0; v < nv; ++v) {
      const double cv = lp_.objective[v];
      const VarMap& m = varmap_[v];
      switch (m.kind) {
        case VarMap::Shift: cost2_[m.c1] += cv; break;
        case VarMap::Mirror: cost2_[m.c1] -= cv; break;
        case VarMap::Split: cost2_[m.c1] += cv; cost2_[m.c2] -= cv; break;
      }
    }

    max_iterations_ = 5000 + 10 * (rows_ + cols_);
  }

  void set_phase_costs(bool phase1) {
    cost_.assign(cols_, 0.0);
    if (phase1) {
      for (int j = nstruct_ + nslack_; j < cols_; ++j) cost_[j] = 1.0;
    } else {
      for (int j = 0; j < nstruct_; ++j) cost_[j] = cost2_[j];
    }
    // Reduced-cost row: c_j - c_B . B^{-1} A_j, with the running objective in
    // the rhs cell (negated).
    for (int j = 0; j <= cols_; ++j) at(rows_, j) = j < cols_ ? cost_[j] : 0.0;
    for (int i = 0; i < rows_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tab_[static_cast<std::size_t>(i) * (cols_ + 1)];
      double* zrow = &tab_[static_cast<std::size_t>(rows_) * (cols_ + 1)];
      for (int j = 0; j <= cols_; ++j) zrow[j] -= cb * row[j];
    }
    bland_ = false;
    stall_ = 0;
    last_obj_ = objective_value();
  }

  void pivot(int prow, int pcol) {
    double* prow_ptr = &tab_[static_cast<std::size_t>(prow) * (cols_ + 1)];
    const double piv = prow_ptr[pcol];
    const double inv = 1.0 / piv;
    for (int j = 0; j <= cols_; ++j) prow_ptr[j] *= inv;
    prow_ptr[pcol] = 1.0;
    for (int i = 0; i <= rows_; ++i) {
      if (i == prow) continue;
      double* row = &tab_[static_cast<std::size_t>(i) * (cols_ + 1)];
      const double f = row[pcol];
      if (f == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) row[j] -= f * prow_ptr[j];
      row[pcol] = 0.0;
    }
    in_basis_[basis_[prow]] = 0;
    in_basis_[pcol] = 1;
    basis_[prow] = pcol;
  }

  // Entering column, or -1 at optimality. Artificial columns never (re-)enter
  // in either phase; once one leaves the basis it is frozen at zero, which
  // preserves the phase-1 optimum for feasible problems.
  int choose_entering() const {
    const int limit = nstruct_ + nslack_;
    const double* zrow = &tab_[static_cast<std::size_t>(rows_) * (cols_ + 1)];
    int best = -1;
    double bestv = -kCostTol;
    for (int j = 0; j < limit; ++j) {
      if (in_basis_[j]) continue;
      const double z = zrow[j];
      if (z >= -kCostTol) continue;
      if (bland_) return j;  // smallest eligible index
      if (z < bestv) {
        bestv = z;
        best = j;
      }
    }
    return best;
  }

  // Leaving row by ratio test, or -1 when the column is unbounded below.
  int choose_leaving(int pcol) const {
    int leave = -1;
    double best_ratio = 0.0;
    int best_var = 0;
    for (int i = 0; i < rows_; ++i) {
      const double a = tab_[static_cast<std::size_t>(i) * (cols_ + 1) + pcol];
      if (a <= kPivTol) continue;
      const double ratio = rhs(i) / a;
      if (leave < 0 || ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 && basis_[i] < best_var)) {
        leave = i;
        best_ratio = ratio;
        best_var = basis_[i];
      }
    }
    return leave;
  }

  Step iterate(bool phase1) {
    while (true) {
      if (iterations_ >= max_iterations_) return Step::IterLimit;
      const int pcol = choose_entering();
      if (pcol < 0) return Step::Done;
      const int prow = choose_leaving(pcol);
      if (prow < 0) return phase1 ? Step::Done : Step::Unbounded;  // phase 1 is bounded below
      pivot(prow, pcol);
      ++iterations_;
      const double obj = objective_value();
      if (obj < last_obj_ - 1e-13 * (1.0 + std::abs(last_obj_))) {
        stall_ = 0;
      } else if (!bland_ && ++stall_ > 2 * (rows_ + cols_)) {
        bland_ = true;  // degenerate stall: switch to Bland's rule for termination
      }
      last_obj_ = obj;
    }
  }

  // After phase 1, pivot basic artificials out where possible; rows that
  // resist are numerically dependent and stay inert (all-zero over
  // non-artificial columns) for the rest of the solve.
  void expel_artificials() {
    const int art_begin = nstruct_ + nslack_;
    for (int i = 0; i < rows_; ++i) {
      if (basis_[i] < art_begin) continue;
      int pcol = -1;
      double bestv = 1e-7;  // stricter than kPivTol: the pivot row has rhs ~ 0
      const double* row = &tab_[static_cast<std::size_t>(i) * (cols_ + 1)];
      for (int j = 0; j < art_begin; ++j) {
        if (in_basis_[j]) continue;
        if (std::abs(row[j]) > bestv) {
          bestv = std::abs(row[j]);
          pcol = j;
        }
      }
      if (pcol >= 0) pivot(i, pcol);
    }
  }

  void finish(LpSolution& sol) {
    // Re-solve the basis system from the pristine standard-form data to wash
    // out drift accumulated in the tableau.
    std::vector<double> u(cols_, 0.0);
    std::vector<double> bmat(static_cast<std::size_t>(rows_) * rows_);
    for (int i = 0; i < rows_; ++i)
      for (int r2 = 0; r2 < rows_; ++r2)
        bmat[static_cast<std::size_t>(r2) * rows_ + i] = a0_[static_cast<std::size_t>(r2) * cols_ + basis_[i]];
    bool repaired = false;
    std::vector<double> duals(rows_, 0.0);
    if (rows_ > 0) {
      const Lu lu(bmat, rows_);
      if (lu.ok) {
        const auto ub = lu.solve(b0_);
        for (int i = 0; i < rows_; ++i) u[basis_[i]] = ub[i];
        repaired = true;
        // Duals from the transposed basis.
        std::vector<double> bt(static_cast<std::size_t>(rows_) * rows_);
        for (int i = 0; i < rows_; ++i)
          for (int j = 0; j < rows_; ++j)
            bt[static_cast<std::size_t>(i) * rows_ + j] = bmat[static_cast<std::size_t>(j) * rows_ + i];
        const Lu lut(bt, rows_);
        if (lut.ok) {
          std::vector<double> cb(rows_);
          for (int i = 0; i < rows_; ++i) cb[i] = cost_[basis_[i]];
          duals = lut.solve(cb);
        }
      }
    }
    if (!repaired) {
      for (int i = 0; i < rows_; ++i) u[basis_[i]] = rhs(i);
    }
    for (double& v : u)
      if (v < 0.0 && v > -1e-9) v = 0.0;  // basis noise

    // Back to original variables.
    sol.x.assign(lp_.num_vars, 0.0);
    for (int v = 0; v < lp_.num_vars; ++v) {
      const VarMap& m = varmap_[v];
      switch (m.kind) {
        case VarMap::Shift: sol.x[v] = m.offset + u[m.c1]; break;
        case VarMap::Mirror: sol.x[v] = m.offset - u[m.c1]; break;
        case VarMap::Split: sol.x[v] = u[m.c1] - u[m.c2]; break;
      }
    }
    double obj = 0.0;
    for (int v = 0; v < lp_.num_vars; ++v) obj += lp_.objective[v] * sol.x[v];
    sol.objective = obj;

    // Residual in the original formulation.
    double res = 0.0;
    for (std::size_t i = 0; i < lp_.eq_rows.size(); ++i) {
      double dot = 0.0;
      for (std::size_t v = 0; v < lp_.eq_rows[i].size(); ++v) dot += lp_.eq_rows[i][v] * sol.x[v];
      res = std::max(res, std::abs(dot - lp_.eq_rhs[i]));
    }
    for (std::size_t i = 0; i < lp_.ub_rows.size(); ++i) {
      double dot = 0.0;
      for (std::size_t v = 0; v < lp_.ub_rows[i].size(); ++v) dot += lp_.ub_rows[i][v] * sol.x[v];
      res = std::max(res, dot - lp_.ub_rhs[i]);
    }
    for (int v = 0; v < lp_.num_vars; ++v) {
      if (std::isfinite(lp_.lower[v])) res = std::max(res, lp_.lower[v] - sol.x[v]);
      if (std::isfinite(lp_.upper[v])) res = std::max(res, sol.x[v] - lp_.upper[v]);
    }
    sol.max_residual = std::max(res, 0.0);

    // Strong duality in standard form: c.u against b.y.
    double primal_std = 0.0;
    for (int j = 0; j < cols_; ++j) primal_std += cost_[j] * u[j];
    double dual_std = 0.0;
    for (int i = 0; i < rows_; ++i) dual_std += b0_[i] * duals[i];
    sol.duality_gap = std::abs(primal_std - dual_std);

    const double scale = std::max(1.0, std::abs(sol.objective));
    sol.status = (sol.max_residual <= 1e-8 * std::max(1.0, max_abs_rhs_) &&
                  sol.duality_gap <= 1e-7 * scale)
                     ? LpStatus::Optimal
                     : LpStatus::Numerical;
  }
};

}  // namespace

LpSolution solve(const LinearProgram& lp) {
  if (lp.num_vars == 0) throw std::invalid_argument("lp: no variables");
  Simplex simplex(lp);
  return simplex.run();
}

std::string dump(const LinearProgram& lp) {
  std::ostringstream os;
  os.precision(12);
  auto term = [&](double a, int v, bool& first) {
    if (a == 0.0) return;
    if (first) {
      first = false;
      if (a < 0) os << "-";
    } else {
      os << (a < 0 ? " - " : " + ");
    }
    const double mag = std::abs(a);
    if (mag != 1.0) os << mag << " ";
    os << "x" << v;
  };
  os << "minimize\n  ";
  bool first = true;
  for (int v = 0; v < lp.num_vars; ++v) term(lp.objective[v], v, first);
  if (first) os << "0";
  os << "\nsubject to\n";
  for (std::size_t i = 0; i < lp.eq_rows.size(); ++i) {
    os << "  ";
    first = true;
    for (std::size_t v = 0; v < lp.eq_rows[i].size(); ++v)
      term(lp.eq_rows[i][v], static_cast<int>(v), first);
    os << " = " << lp.eq_rhs[i] << "\n";
  }
  for (std::size_t i = 0; i < lp.ub_rows.size(); ++i) {
    os << "  ";
    first = true;
    for (std::size_t v = 0; v < lp.ub_rows[i].size(); ++v)
      term(lp.ub_rows[i][v], static_cast<int>(v), first);
    os << " <= " << lp.ub_rhs[i] << "\n";
  }
  os << "bounds\n";
  for (int v = 0; v < lp.num_vars; ++v)
    os << "  " << lp.lower[v] << " <= x" << v << " <= " << lp.upper[v] << "\n";
  return os.str();
}

}  // namespace ccopt
