#pragma once

// Dense two-phase primal simplex with Bland's anti-cycling rule.
//
// The solver is deterministic (fixed pivot order, no randomization) and runs
// unchanged over exact rationals and binary64; in float mode all sign tests
// use an absolute tolerance (default 1e-9). Problem sizes here are small,
// so no effort is spent on sparsity or factorization.

#include <optional>
#include <stdexcept>
#include <vector>

#include "tropoclust/scalar.hpp"

namespace tropo {

enum class Relation { LessEq, Equal, GreaterEq };
enum class LpStatus { Optimal, Infeasible, Unbounded };

template <class S>
struct LinearProgram {
  struct Row {
    std::vector<S> coeffs;
    Relation rel = Relation::LessEq;
    S rhs{};
  };
  struct Bounds {
    std::optional<S> lower, upper;  // absent = unbounded on that side
  };

  std::vector<S> objective;  // minimize objective . x
  std::vector<Row> rows;
  std::vector<Bounds> bounds;  // empty, or one entry per variable (default free)

  std::size_t num_vars() const { return objective.size(); }
};

template <class S>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  S value{};
  std::vector<S> solution;
};

struct LpOptions {
  double tol = 1e-9;  // ignored in exact mode
  std::size_t max_pivots = 2'000'000;
};

// Keeps the standardized tableau alive between solves so the objective can
// be swapped and re-optimized from the current basis (used to trace the
// faces of a Fermat-Weber polytrope without re-running phase 1 each time).
template <class S>
class LpSolver {
 public:
  explicit LpSolver(const LinearProgram<S>& lp, LpOptions opts = {})
      : opts_(opts) {
    build(lp);
  }

  // Two-phase solve with the objective given at construction.
  LpStatus solve() {
    if (trivially_infeasible_) return status_ = LpStatus::Infeasible;
    if (LpStatus s = phase_one(); s != LpStatus::Optimal) return status_ = s;
    set_costs(std_objective_);
    return status_ = phase_two();
  }

  // Replaces the objective (expressed over the original variables) and
  // re-optimizes from the current basis. Requires a prior feasible solve.
  LpStatus reoptimize(const std::vector<S>& objective) {
    if (!basis_valid_) throw std::logic_error("reoptimize before solve");
    if (objective.size() != var_map_.size())
      throw ValidationError("objective width mismatch");
    obj_offset_ = S(0);
    for (std::size_t j = 0; j < objective.size(); ++j)
      obj_offset_ += objective[j] * var_map_[j].offset;
    set_costs(standardize_objective(objective));
    return status_ = phase_two();
  }

  LpStatus status() const { return status_; }
  const S& value() const { return value_; }

  // Values of the original variables at the current basic solution.
  std::vector<S> solution() const {
    std::vector<S> y(num_cols_, S(0));
    for (std::size_t r = 0; r < rows_.size(); ++r)
      if (basis_[r] >= 0) y[static_cast<std::size_t>(basis_[r])] = rhs_[r];
    std::vector<S> x(var_map_.size());
    for (std::size_t j = 0; j < var_map_.size(); ++j) {
      S v = var_map_[j].offset;
      if (var_map_[j].pos_col >= 0) v += y[var_map_[j].pos_col];
      if (var_map_[j].neg_col >= 0) v -= y[var_map_[j].neg_col];
      x[j] = v;
    }
    return x;
  }

 private:
  struct VarMap {
    S offset{};        // x = offset + y_pos - y_neg
    int pos_col = -1;  // column index or -1
    int neg_col = -1;
  };

  LpOptions opts_;
  bool trivially_infeasible_ = false;
  bool basis_valid_ = false;
  LpStatus status_ = LpStatus::Infeasible;
  S value_{};
  S obj_offset_{};  // constant from shifted variables

  std::size_t num_cols_ = 0;             // structural + slack columns
  std::vector<std::vector<S>> rows_;     // tableau rows over the columns
  std::vector<S> rhs_;                   // nonnegative in any basic solution
  std::vector<int> basis_;               // column index, or -(row+1) = artificial
  std::vector<S> std_objective_;         // costs over standardized columns
  std::vector<S> cost_;                  // active phase-2 costs
  std::vector<VarMap> var_map_;

  bool is_neg(const S& v) const {
    if constexpr (is_exact_v<S>) return v < S(0);
    else return v < -opts_.tol;
  }
  bool is_pos(const S& v) const {
    if constexpr (is_exact_v<S>) return v > S(0);
    else return v > opts_.tol;
  }

  std::vector<S> standardize_objective(const std::vector<S>& obj) const {
    std::vector<S> c(num_cols_, S(0));
    for (std::size_t j = 0; j < obj.size(); ++j) {
      if (var_map_[j].pos_col >= 0) c[var_map_[j].pos_col] += obj[j];
      if (var_map_[j].neg_col >= 0) c[var_map_[j].neg_col] -= obj[j];
    }
    return c;
  }

  void build(const LinearProgram<S>& lp) {
    const std::size_t n = lp.num_vars();
    if (!lp.bounds.empty() && lp.bounds.size() != n)
      throw ValidationError("bounds size mismatch");
    for (const auto& row : lp.rows)
      if (row.coeffs.size() != n)
        throw ValidationError("constraint width mismatch");

    // Shift or split variables so every standardized column is >= 0.
    var_map_.resize(n);
    std::size_t next_col = 0;
    struct ExtraRow {
      std::size_t col;
      S rhs;
    };
    std::vector<ExtraRow> range_rows;  // y <= upper - lower for boxed vars
    for (std::size_t j = 0; j < n; ++j) {
      typename LinearProgram<S>::Bounds b;
      if (!lp.bounds.empty()) b = lp.bounds[j];
      auto& vm = var_map_[j];
      if (b.lower && b.upper && *b.upper < *b.lower) {
        trivially_infeasible_ = true;
        return;
      }
      if (b.lower) {
        vm.offset = *b.lower;
        vm.pos_col = static_cast<int>(next_col++);
        if (b.upper) range_rows.push_back({static_cast<std::size_t>(vm.pos_col),
                                           S(*b.upper - *b.lower)});
      } else if (b.upper) {
        vm.offset = *b.upper;
        vm.neg_col = static_cast<int>(next_col++);
      } else {
        vm.pos_col = static_cast<int>(next_col++);
        vm.neg_col = static_cast<int>(next_col++);
      }
    }
    const std::size_t structural = next_col;
    const std::size_t total_rows = lp.rows.size() + range_rows.size();

    // One slack/surplus column per inequality row.
    std::size_t slack_count = 0;
    for (const auto& row : lp.rows)
      if (row.rel != Relation::Equal) ++slack_count;
    num_cols_ = structural + slack_count + range_rows.size();

    rows_.assign(total_rows, std::vector<S>(num_cols_, S(0)));
    rhs_.assign(total_rows, S(0));
    basis_.assign(total_rows, 0);

    std::size_t slack_col = structural;
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
      const auto& row = lp.rows[r];
      S rhs = row.rhs;
      for (std::size_t j = 0; j < n; ++j) {
        const auto& vm = var_map_[j];
        if (vm.pos_col >= 0) rows_[r][vm.pos_col] += row.coeffs[j];
        if (vm.neg_col >= 0) rows_[r][vm.neg_col] -= row.coeffs[j];
        rhs -= row.coeffs[j] * vm.offset;
      }
      Relation rel = row.rel;
      if (is_neg(rhs)) {
        for (auto& v : rows_[r]) v = -v;
        rhs = -rhs;
        if (rel == Relation::LessEq) rel = Relation::GreaterEq;
        else if (rel == Relation::GreaterEq) rel = Relation::LessEq;
      }
      rhs_[r] = rhs;
      if (rel == Relation::Equal) {
        basis_[r] = -static_cast<int>(r) - 1;  // artificial
      } else {
        S dir = rel == Relation::LessEq ? S(1) : S(-1);
        rows_[r][slack_col] = dir;
        basis_[r] = rel == Relation::LessEq ? static_cast<int>(slack_col)
                                            : -static_cast<int>(r) - 1;
        ++slack_col;
      }
    }
    for (std::size_t k = 0; k < range_rows.size(); ++k) {
      std::size_t r = lp.rows.size() + k;
      rows_[r][range_rows[k].col] = S(1);
      rows_[r][slack_col] = S(1);
      rhs_[r] = range_rows[k].rhs;  // upper - lower >= 0 by construction
      basis_[r] = static_cast<int>(slack_col);
      ++slack_col;
    }

    std_objective_ = standardize_objective(lp.objective);
    obj_offset_ = S(0);
    for (std::size_t j = 0; j < n; ++j)
      obj_offset_ += lp.objective[j] * var_map_[j].offset;
  }

  // Pivot so that `col` becomes basic in row `row`.
  void pivot(std::size_t row, std::size_t col) {
    S p = rows_[row][col];
    for (auto& v : rows_[row]) v /= p;
    rhs_[row] /= p;
    rows_[row][col] = S(1);  // kill float residue on the pivot itself
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (r == row) continue;
      S f = rows_[r][col];
      if (f == S(0)) continue;
      for (std::size_t c = 0; c < num_cols_; ++c)
        rows_[r][c] -= f * rows_[row][c];
      rows_[r][col] = S(0);
      rhs_[r] -= f * rhs_[row];
    }
    S f = cost_[col];
    if (f != S(0)) {
      for (std::size_t c = 0; c < num_cols_; ++c)
        cost_[c] -= f * rows_[row][c];
      cost_[col] = S(0);
      value_ += f * rhs_[row];  // entering variable takes value rhs_[row]
    }
    basis_[row] = static_cast<int>(col);
  }

  // Bland's rule: entering = least column with negative reduced cost,
  // leaving = min-ratio row, ties by least basic variable (artificials
  // order below real columns, so they leave first).
  LpStatus run_simplex() {
    for (std::size_t iter = 0; iter < opts_.max_pivots; ++iter) {
      std::size_t enter = num_cols_;
      for (std::size_t c = 0; c < num_cols_; ++c) {
        if (is_neg(cost_[c])) {
          enter = c;
          break;
        }
      }
      if (enter == num_cols_) return LpStatus::Optimal;

      std::size_t leave = rows_.size();
      S best_ratio{};
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (!is_pos(rows_[r][enter])) continue;
        S ratio = rhs_[r] / rows_[r][enter];
        if (leave == rows_.size() || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave == rows_.size()) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex exceeded pivot limit");
  }

  void set_costs(const std::vector<S>& costs) {
    // Reduced costs w.r.t. the current basis: c - c_B B^-1 A, computed from
    // the tableau rows (each row is B^-1 A restricted to its basic variable).
    cost_ = costs;
    value_ = S(0);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (basis_[r] < 0) continue;  // artificial basic: cost 0
      S cb = costs[static_cast<std::size_t>(basis_[r])];
      if (cb == S(0)) continue;
      for (std::size_t c = 0; c < num_cols_; ++c)
        cost_[c] -= cb * rows_[r][c];
      value_ += cb * rhs_[r];
    }
    for (std::size_t r = 0; r < rows_.size(); ++r)
      if (basis_[r] >= 0) cost_[static_cast<std::size_t>(basis_[r])] = S(0);
  }

  LpStatus phase_one() {
    // Artificial columns are implicit: the phase-1 objective is the sum of
    // the rows whose basic variable is artificial.
    cost_.assign(num_cols_, S(0));
    value_ = S(0);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (basis_[r] >= 0) continue;
      for (std::size_t c = 0; c < num_cols_; ++c) cost_[c] -= rows_[r][c];
      value_ += rhs_[r];
    }
    LpStatus s = run_simplex();
    if (s != LpStatus::Optimal) throw std::logic_error("phase 1 unbounded");
    if (is_pos(value_)) return LpStatus::Infeasible;

    // Drive leftover artificials out of the basis; an all-zero row is a
    // redundant constraint and is dropped.
    for (std::size_t r = rows_.size(); r-- > 0;) {
      if (basis_[r] >= 0) continue;
      std::size_t col = num_cols_;
      for (std::size_t c = 0; c < num_cols_; ++c) {
        if (is_pos(rows_[r][c]) || is_neg(rows_[r][c])) {
          col = c;
          break;
        }
      }
      if (col == num_cols_) {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
        rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
      } else {
        pivot(r, col);  // rhs is 0 here, so feasibility is preserved
      }
    }
    basis_valid_ = true;
    return LpStatus::Optimal;
  }

  LpStatus phase_two() {
    LpStatus s = run_simplex();
    if (s == LpStatus::Optimal) value_ += obj_offset_;
    return s;
  }
};

// One-shot interface. status=Optimal guarantees `solution` is feasible
// (within tolerance in float mode) and `value` is the objective there;
// exact mode results are exactly optimal.
template <class S>
LpResult<S> solve_lp(const LinearProgram<S>& lp, LpOptions opts = {}) {
  if (lp.objective.empty()) throw ValidationError("LP with no variables");
  LpSolver<S> solver(lp, opts);
  LpResult<S> res;
  res.status = solver.solve();
  if (res.status == LpStatus::Optimal) {
    res.value = solver.value();
    res.solution = solver.solution();
  }
  return res;
}

}  // namespace tropo
