#pragma once

#include <cstddef>
#include <vector>

#include "c00kit/errors.hpp"
#include "c00kit/rational.hpp"

namespace c00 {

enum class LPStatus { optimal, infeasible, unbounded };

template <class T>
struct LPResult {
  LPStatus status = LPStatus::optimal;
  T objective{};
  std::vector<T> x;
};

namespace lpdetail {

template <class T>
bool pos(const T& v) {
  if constexpr (scalar_traits<T>::exact)
    return v > T(0);
  else
    return v > 1e-11;
}

template <class T>
bool neg(const T& v) {
  if constexpr (scalar_traits<T>::exact)
    return v < T(0);
  else
    return v < -1e-11;
}

} // namespace lpdetail

// minimize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0.
// Dense two-phase tableau simplex with Bland's rule: slow but cycle-free,
// which is all the few-dozen-variable problems here require. Works over
// exact rationals (pivots stay exact, the optimum is exact) and doubles.
template <class T>
class SimplexSolver {
public:
  LPResult<T> solve(const std::vector<std::vector<T>>& a_ub, const std::vector<T>& b_ub,
                    const std::vector<std::vector<T>>& a_eq, const std::vector<T>& b_eq,
                    const std::vector<T>& c) {
    n_ = c.size();
    const std::size_t m_ub = a_ub.size(), m_eq = a_eq.size();
    m_ = m_ub + m_eq;
    if (b_ub.size() != m_ub || b_eq.size() != m_eq) throw InternalError("lp: shape mismatch");
    for (const auto& r : a_ub)
      if (r.size() != n_) throw InternalError("lp: shape mismatch");
    for (const auto& r : a_eq)
      if (r.size() != n_) throw InternalError("lp: shape mismatch");

    // columns: n structurals, m_ub slacks, then artificials as needed, then rhs
    cols_ = n_ + m_ub;
    rows_.assign(m_, {});
    basis_.assign(m_, 0);
    std::vector<std::size_t> artificial_rows;
    for (std::size_t r = 0; r < m_; ++r) {
      const bool ub = r < m_ub;
      const std::vector<T>& src = ub ? a_ub[r] : a_eq[r - m_ub];
      const T& b = ub ? b_ub[r] : b_eq[r - m_ub];
      std::vector<T> row(cols_ + 1, T(0));
      for (std::size_t j = 0; j < n_; ++j) row[j] = src[j];
      if (ub) row[n_ + r] = T(1);
      row[cols_] = b;
      if (lpdetail::neg(row[cols_]))
        for (auto& v : row) v = -v;
      rows_[r] = std::move(row);
      if (ub && !lpdetail::neg(rows_[r][n_ + r]) && lpdetail::pos(rows_[r][n_ + r])) {
        basis_[r] = n_ + r; // slack still +1: usable as the initial basis
      } else {
        artificial_rows.push_back(r);
      }
    }
    for (std::size_t k = 0; k < artificial_rows.size(); ++k) {
      for (auto& row : rows_) row.insert(row.end() - 1, T(0));
      rows_[artificial_rows[k]][cols_] = T(1);
      basis_[artificial_rows[k]] = cols_;
      ++cols_;
    }
    const std::size_t first_artificial = n_ + m_ub;

    if (!artificial_rows.empty()) {
      // phase 1: minimize the sum of artificials
      std::vector<T> cost(cols_, T(0));
      for (std::size_t j = first_artificial; j < cols_; ++j) cost[j] = T(1);
      T val = run(cost, cols_);
      if (lpdetail::pos(val)) return {LPStatus::infeasible, T(0), {}};
      // pivot any artificial that lingers in the basis out of it (its value
      // is zero); if the whole row is zero it is redundant and stays inert
      for (std::size_t r = 0; r < m_; ++r) {
        if (basis_[r] < first_artificial) continue;
        for (std::size_t j = 0; j < first_artificial; ++j)
          if (lpdetail::pos(rows_[r][j]) || lpdetail::neg(rows_[r][j])) {
            pivot(r, j);
            break;
          }
      }
    }

    // phase 2 over the structural + slack columns only
    std::vector<T> cost(cols_, T(0));
    for (std::size_t j = 0; j < n_; ++j) cost[j] = c[j];
    T val = run(cost, first_artificial);
    if (unbounded_) return {LPStatus::unbounded, T(0), {}};

    LPResult<T> res;
    res.status = LPStatus::optimal;
    res.objective = val;
    res.x.assign(n_, T(0));
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] < n_) res.x[basis_[r]] = rows_[r][cols_];
    return res;
  }

private:
  std::size_t n_ = 0, m_ = 0, cols_ = 0;
  std::vector<std::vector<T>> rows_; // m_ rows of cols_+1 entries (rhs last)
  std::vector<std::size_t> basis_;
  bool unbounded_ = false;

  void pivot(std::size_t pr, std::size_t pc) {
    std::vector<T>& prow = rows_[pr];
    const T piv = prow[pc];
    for (auto& v : prow) v /= piv;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == pr) continue;
      const T f = rows_[r][pc];
      if (f == T(0)) continue;
      for (std::size_t j = 0; j <= cols_; ++j) rows_[r][j] -= f * prow[j];
    }
    basis_[pr] = pc;
  }

  // Bland's rule: entering column = smallest index with negative reduced
  // cost, leaving row = smallest ratio with smallest basis index on ties
  T run(const std::vector<T>& cost, std::size_t usable_cols) {
    unbounded_ = false;
    for (std::size_t iter = 0; iter < 200000; ++iter) {
      std::vector<T> y(m_); // basic cost multipliers
      for (std::size_t r = 0; r < m_; ++r) y[r] = cost[basis_[r]];
      std::size_t enter = usable_cols;
      for (std::size_t j = 0; j < usable_cols; ++j) {
        T red = cost[j];
        for (std::size_t r = 0; r < m_; ++r) red -= y[r] * rows_[r][j];
        if (lpdetail::neg(red)) {
          enter = j;
          break;
        }
      }
      if (enter == usable_cols) {
        T val(0);
        for (std::size_t r = 0; r < m_; ++r) val += cost[basis_[r]] * rows_[r][cols_];
        return val;
      }
      std::size_t leave = m_;
      T best_ratio(0);
      for (std::size_t r = 0; r < m_; ++r) {
        if (!lpdetail::pos(rows_[r][enter])) continue;
        T ratio = rows_[r][cols_] / rows_[r][enter];
        if (leave == m_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave == m_) {
        unbounded_ = true;
        return T(0);
      }
      pivot(leave, enter);
    }
    throw InternalError("lp: iteration budget exhausted");
  }
};

template <class T>
LPResult<T> solve_lp(const std::vector<std::vector<T>>& a_ub, const std::vector<T>& b_ub,
                     const std::vector<std::vector<T>>& a_eq, const std::vector<T>& b_eq,
                     const std::vector<T>& c) {
  SimplexSolver<T> s;
  return s.solve(a_ub, b_ub, a_eq, b_eq, c);
}

} // namespace c00
