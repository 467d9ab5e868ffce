#pragma once

// Revised primal simplex for packing-type LPs:  max c'x  s.t.  Ax <= b, x >= 0,
// with b >= 0 so the all-slack basis is feasible and no phase 1 is needed.
//
// The basis is kept as a sparse LU factorization (refactored periodically)
// followed by a product-form eta file. Reduced costs are updated each pivot
// from the pivot row and recomputed from scratch at every refactorization.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "mecsched/error.hpp"

namespace mecsched {

struct LpRow {
  std::vector<std::pair<std::size_t, double>> terms;  // (variable, coefficient)
  double rhs = 1.0;
  std::string label;
};

struct LinearProgram {
  std::vector<double> objective;  // one coefficient per variable (maximized)
  std::vector<LpRow> rows;        // all rows are <= constraints

  std::size_t num_vars() const { return objective.size(); }
};

enum class PivotRule { dantzig, bland };

struct SimplexOptions {
  PivotRule rule = PivotRule::dantzig;
  std::size_t max_rows = 1'000'000;
  std::size_t max_cols = 5'000'000;
  std::size_t max_iterations = 5'000'000;
  std::size_t refactor_interval = 100;
  // Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t stall_limit = 500;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
};

struct FractionalSolution {
  std::vector<double> values;  // clamped into [0, 1]
  double objective = 0.0;      // sum of c_j * values_j
  std::vector<double> duals;   // one per row, >= 0
  double dual_objective = 0.0; // sum of b_i * duals_i
  std::size_t iterations = 0;

  double value(std::size_t j) const { return values.at(j); }
};

namespace detail {

class RevisedSimplex {
 public:
  RevisedSimplex(const LinearProgram& lp, const SimplexOptions& opt) : opt_(opt) {
    m_ = lp.rows.size();
    n_ = lp.num_vars();
    if (m_ > opt.max_rows || n_ > opt.max_cols)
      throw LpError("LP dimensions " + std::to_string(m_) + "x" + std::to_string(n_) +
                    " exceed the configured limits");
    std::vector<std::size_t> col_count(n_, 0);
    b_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const LpRow& row = lp.rows[i];
      if (!std::isfinite(row.rhs) || row.rhs < 0.0)
        throw LpError("row " + std::to_string(i) + " has a negative or non-finite right-hand side");
      b_[i] = row.rhs;
      for (const auto& [j, a] : row.terms) {
        if (j >= n_) throw LpError("row " + std::to_string(i) + " references unknown variable");
        if (!std::isfinite(a)) throw LpError("row " + std::to_string(i) + " has a non-finite coefficient");
        ++col_count[j];
      }
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (!std::isfinite(lp.objective[j])) throw LpError("non-finite objective coefficient");
      if (col_count[j] == 0) throw LpError("variable " + std::to_string(j) + " appears in no row");
    }

    // CSR copy of A.
    row_ptr_.assign(m_ + 1, 0);
    for (std::size_t i = 0; i < m_; ++i) row_ptr_[i + 1] = row_ptr_[i] + lp.rows[i].terms.size();
    row_col_.resize(row_ptr_[m_]);
    row_val_.resize(row_ptr_[m_]);
    for (std::size_t i = 0; i < m_; ++i) {
      std::size_t k = row_ptr_[i];
      for (const auto& [j, a] : lp.rows[i].terms) {
        row_col_[k] = j;
        row_val_[k] = a;
        ++k;
      }
    }
    // CSC copy of A.
    col_ptr_.assign(n_ + 1, 0);
    for (std::size_t j = 0; j < n_; ++j) col_ptr_[j + 1] = col_ptr_[j] + col_count[j];
    col_row_.resize(col_ptr_[n_]);
    col_val_.resize(col_ptr_[n_]);
    std::vector<std::size_t> fill(col_ptr_.begin(), col_ptr_.end() - 1);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        const std::size_t j = row_col_[k];
        col_row_[fill[j]] = i;
        col_val_[fill[j]] = row_val_[k];
        ++fill[j];
      }

    cost_.assign(n_ + m_, 0.0);
    std::copy(lp.objective.begin(), lp.objective.end(), cost_.begin());
    basis_.resize(m_);
    pos_.assign(n_ + m_, kNonbasic);
    for (std::size_t i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      pos_[n_ + i] = static_cast<long>(i);
    }
    row_acc_.assign(n_, 0.0);
    row_mark_.assign(n_, 0);
  }

  FractionalSolution run() {
    FractionalSolution sol;
    if (n_ == 0) {
      sol.duals.assign(m_, 0.0);
      return sol;
    }
    refactor();
    std::size_t degenerate_run = 0;
    bool bland = opt_.rule == PivotRule::bland;
    for (;;) {
      if (iterations_ >= opt_.max_iterations) throw LpError("simplex iteration limit reached");
      std::size_t q = choose_entering(bland);
      if (q == kNone) {
        // Confirm optimality on a fresh factorization before stopping.
        if (!etas_.empty()) {
          refactor();
          q = choose_entering(bland);
        }
        if (q == kNone) break;
      }
      const std::vector<double> alpha = ftran_column(q);
      const std::size_t r = ratio_test(alpha, bland);
      if (r == kNone) throw LpError("LP is unbounded (cannot happen for packing rows)");
      const double step = std::max(0.0, x_basic_[r] / alpha[r]);
      if (step * d_[q] <= 1e-15) {
        if (++degenerate_run >= opt_.stall_limit) bland = true;
      } else {
        degenerate_run = 0;
        bland = opt_.rule == PivotRule::bland;
      }
      pivot(q, r, alpha, step);
      ++iterations_;
      if (etas_.size() >= opt_.refactor_interval) refactor();
    }

    sol.iterations = iterations_;
    sol.values.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) sol.values[basis_[i]] = std::clamp(x_basic_[i], 0.0, 1.0);
    for (std::size_t j = 0; j < n_; ++j) sol.objective += cost_[j] * sol.values[j];
    sol.duals.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      sol.duals[i] = std::max(0.0, y_[i]);
      sol.dual_objective += b_[i] * sol.duals[i];
    }
    return sol;
  }

 private:
  static constexpr long kNonbasic = -1;
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  struct Eta {
    std::size_t row;
    double pivot;
    std::vector<std::pair<std::size_t, double>> others;
  };

  void refactor() {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(m_ * 4);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t v = basis_[i];
      if (v >= n_) {
        trip.emplace_back(static_cast<int>(v - n_), static_cast<int>(i), 1.0);
      } else {
        for (std::size_t k = col_ptr_[v]; k < col_ptr_[v + 1]; ++k)
          trip.emplace_back(static_cast<int>(col_row_[k]), static_cast<int>(i), col_val_[k]);
      }
    }
    Eigen::SparseMatrix<double> basis_matrix(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    basis_matrix.setFromTriplets(trip.begin(), trip.end());
    basis_matrix.makeCompressed();
    lu_.analyzePattern(basis_matrix);
    lu_.factorize(basis_matrix);
    if (lu_.info() != Eigen::Success) throw InternalError("simplex basis became singular");
    etas_.clear();

    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b_.data(), static_cast<Eigen::Index>(m_));
    Eigen::VectorXd xb = lu_.solve(rhs);
    x_basic_.assign(xb.data(), xb.data() + m_);
    for (double& v : x_basic_)
      if (v < 0.0 && v > -opt_.feasibility_tol) v = 0.0;

    std::vector<double> cb(m_);
    for (std::size_t i = 0; i < m_; ++i) cb[i] = cost_[basis_[i]];
    y_ = btran(std::move(cb));
    d_.assign(n_ + m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (pos_[j] != kNonbasic) continue;
      double s = cost_[j];
      for (std::size_t k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) s -= y_[col_row_[k]] * col_val_[k];
      d_[j] = s;
    }
    for (std::size_t i = 0; i < m_; ++i)
      if (pos_[n_ + i] == kNonbasic) d_[n_ + i] = -y_[i];
  }

  std::vector<double> ftran_column(std::size_t v) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    if (v >= n_) {
      rhs[static_cast<Eigen::Index>(v - n_)] = 1.0;
    } else {
      for (std::size_t k = col_ptr_[v]; k < col_ptr_[v + 1]; ++k)
        rhs[static_cast<Eigen::Index>(col_row_[k])] = col_val_[k];
    }
    Eigen::VectorXd w = lu_.solve(rhs);
    std::vector<double> out(w.data(), w.data() + m_);
    for (const Eta& e : etas_) {
      const double wr = out[e.row] / e.pivot;
      if (wr != 0.0)
        for (const auto& [i, a] : e.others) out[i] -= a * wr;
      out[e.row] = wr;
    }
    return out;
  }

  // Row vector u (basis positions) times B^{-1}.
  std::vector<double> btran(std::vector<double> u) {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = u[it->row];
      for (const auto& [i, a] : it->others) s -= u[i] * a;
      u[it->row] = s / it->pivot;
    }
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(m_));
    Eigen::VectorXd y = lu_.transpose().solve(rhs);
    return std::vector<double>(y.data(), y.data() + m_);
  }

  std::size_t choose_entering(bool bland) const {
    std::size_t best = kNone;
    double best_d = opt_.optimality_tol;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (pos_[j] != kNonbasic) continue;
      if (d_[j] > best_d) {
        best = j;
        if (bland) return j;
        best_d = d_[j];
      }
    }
    return best;
  }

  std::size_t ratio_test(const std::vector<double>& alpha, bool bland) const {
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_; ++i)
      if (alpha[i] > opt_.pivot_tol)
        bound = std::min(bound, (bland ? x_basic_[i] : x_basic_[i] + opt_.feasibility_tol) / alpha[i]);
    if (!std::isfinite(bound)) return kNone;
    std::size_t r = kNone;
    for (std::size_t i = 0; i < m_; ++i) {
      if (alpha[i] <= opt_.pivot_tol) continue;
      const double ratio = x_basic_[i] / alpha[i];
      if (bland) {
        if (ratio <= bound + 1e-12 && (r == kNone || basis_[i] < basis_[r])) r = i;
      } else if (ratio <= bound && (r == kNone || alpha[i] > alpha[r])) {
        r = i;
      }
    }
    return r;
  }

  void pivot(std::size_t q, std::size_t r, const std::vector<double>& alpha, double step) {
    // Pivot row of B^{-1}A drives the reduced-cost update.
    std::vector<double> unit(m_, 0.0);
    unit[r] = 1.0;
    const std::vector<double> rho = btran(std::move(unit));
    const double ratio = d_[q] / alpha[r];
    touched_.clear();
    for (std::size_t i = 0; i < m_; ++i) {
      const double ri = rho[i];
      if (std::abs(ri) < 1e-13) continue;
      if (pos_[n_ + i] == kNonbasic) d_[n_ + i] -= ratio * ri;
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        const std::size_t j = row_col_[k];
        if (!row_mark_[j]) {
          row_mark_[j] = 1;
          touched_.push_back(j);
        }
        row_acc_[j] += ri * row_val_[k];
      }
    }
    for (std::size_t j : touched_) {
      if (pos_[j] == kNonbasic) d_[j] -= ratio * row_acc_[j];
      row_acc_[j] = 0.0;
      row_mark_[j] = 0;
    }

    const std::size_t leaving = basis_[r];
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || alpha[i] == 0.0) continue;
      x_basic_[i] -= step * alpha[i];
      if (x_basic_[i] < 0.0 && x_basic_[i] > -opt_.feasibility_tol) x_basic_[i] = 0.0;
    }
    x_basic_[r] = step;
    d_[q] = 0.0;
    d_[leaving] = -ratio;

    Eta eta{r, alpha[r], {}};
    for (std::size_t i = 0; i < m_; ++i)
      if (i != r && alpha[i] != 0.0) eta.others.emplace_back(i, alpha[i]);
    etas_.push_back(std::move(eta));

    basis_[r] = q;
    pos_[q] = static_cast<long>(r);
    pos_[leaving] = kNonbasic;
  }

  SimplexOptions opt_;
  std::size_t m_ = 0, n_ = 0;
  std::vector<double> b_, cost_;
  std::vector<std::size_t> row_ptr_, row_col_, col_ptr_, col_row_;
  std::vector<double> row_val_, col_val_;
  std::vector<std::size_t> basis_;
  std::vector<long> pos_;
  std::vector<double> x_basic_, y_, d_;
  std::vector<Eta> etas_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<double> row_acc_;
  std::vector<char> row_mark_;
  std::vector<std::size_t> touched_;
  std::size_t iterations_ = 0;
};

}  // namespace detail

// Solves the LP to optimality. Values are clamped into [0, 1]; every LP built
// by this library bounds each variable by 1 through its job row.
inline FractionalSolution solve(const LinearProgram& lp, PivotRule rule = PivotRule::dantzig,
                                SimplexOptions opt = {}) {
  opt.rule = rule;
  detail::RevisedSimplex simplex(lp, opt);
  return simplex.run();
}

}  // namespace mecsched
