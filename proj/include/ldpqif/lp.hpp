// Copyright 2026 The ldpqif Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <vector>

#include "ldpqif/matrix.hpp"

namespace ldpqif {

enum class LpStatus { optimal, infeasible, iteration_limit };

template <typename T>
struct LpResult {
  LpStatus status;
  T objective{};
  std::vector<T> x;  // structural variables only
};

// Dense two-phase primal simplex with Bland's rule, generic over the scalar.
// Instances here are small (a few hundred variables); owning the solver keeps
// verdicts reproducible and allows exact-rational runs.
//
// Solves: min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.
template <typename T>
class SimplexSolver {
 public:
  explicit SimplexSolver(T tol = T(0)) : tol_(tol) {}

  LpResult<T> solve(const std::vector<T>& c, const Mat<T>& a_ub,
                    const std::vector<T>& b_ub, const Mat<T>& a_eq,
                    const std::vector<T>& b_eq,
                    std::size_t max_iter = 200000) {
    n_ = c.size();
    const std::size_t m_ub = a_ub.size(), m_eq = a_eq.size();
    m_ = m_ub + m_eq;
    slack_start_ = n_;
    art_start_ = n_ + m_ub;
    const std::size_t width = art_start_ + m_ + 1;  // worst case: all artificial

    rows_.assign(m_, std::vector<T>(width, T(0)));
    basis_.assign(m_, 0);
    rhs_col_ = width - 1;

    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      const bool is_ub = i < m_ub;
      const auto& src = is_ub ? a_ub[i] : a_eq[i - m_ub];
      const T& b = is_ub ? b_ub[i] : b_eq[i - m_ub];
      for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = src[j];
      if (is_ub) rows_[i][slack_start_ + i] = T(1);
      rows_[i][rhs_col_] = b;
      if (rows_[i][rhs_col_] < T(0))
        for (std::size_t j = 0; j < width; ++j) rows_[i][j] = -rows_[i][j];
      if (is_ub && rows_[i][slack_start_ + i] == T(1)) {
        basis_[i] = slack_start_ + i;  // slack survives when b >= 0
      } else {
        const std::size_t art = art_start_ + n_art++;
        rows_[i][art] = T(1);
        basis_[i] = art;
      }
    }

    // Phase 1: minimize the sum of artificials.
    obj_.assign(width, T(0));
    for (std::size_t j = art_start_; j < art_start_ + n_art; ++j) obj_[j] = T(1);
    price_out();
    if (!iterate(max_iter, /*allow_artificial=*/false))
      return {LpStatus::iteration_limit, T(0), {}};
    if (obj_[rhs_col_] < -tol_ || obj_[rhs_col_] > tol_) {
      // -obj rhs holds the phase objective value; nonzero means infeasible
      return {LpStatus::infeasible, T(0), {}};
    }
    evict_artificials();

    // Phase 2: the real objective, artificials barred from entering.
    obj_.assign(width, T(0));
    for (std::size_t j = 0; j < n_; ++j) obj_[j] = c[j];
    price_out();
    const bool finished = iterate(max_iter, /*allow_artificial=*/false);

    LpResult<T> res;
    res.status = finished ? LpStatus::optimal : LpStatus::iteration_limit;
    res.x.assign(n_, T(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.x[basis_[i]] = rows_[i][rhs_col_];
    res.objective = T(0);
    for (std::size_t j = 0; j < n_; ++j) res.objective += c[j] * res.x[j];
    return res;  // at an iteration limit this is the best point reached
  }

 private:
  // Subtract basic-variable rows so the objective row has zero reduced cost
  // on the current basis.
  void price_out() {
    for (std::size_t i = 0; i < m_; ++i) {
      const T coeff = obj_[basis_[i]];
      if (coeff == T(0)) continue;
      for (std::size_t j = 0; j < obj_.size(); ++j)
        obj_[j] -= coeff * rows_[i][j];
    }
  }

  // Bland's rule: lowest-index entering and leaving candidates; terminates
  // without cycling in both float and rational modes.
  bool iterate(std::size_t max_iter, bool allow_artificial) {
    const std::size_t enter_limit = allow_artificial ? rhs_col_ : art_start_;
    for (std::size_t it = 0; it < max_iter; ++it) {
      std::size_t enter = enter_limit;
      for (std::size_t j = 0; j < enter_limit; ++j)
        if (obj_[j] < -tol_) {
          enter = j;
          break;
        }
      if (enter == enter_limit) return true;  // optimal
      std::size_t leave = m_;
      for (std::size_t i = 0; i < m_; ++i) {
        if (rows_[i][enter] <= tol_) continue;
        if (leave == m_) {
          leave = i;
          continue;
        }
        const T lhs = rows_[i][rhs_col_] * rows_[leave][enter];
        const T rhs = rows_[leave][rhs_col_] * rows_[i][enter];
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[leave])) leave = i;
      }
      if (leave == m_) return true;  // unbounded; cannot occur for our LPs
      pivot(leave, enter);
    }
    return false;
  }

  void pivot(std::size_t r, std::size_t c) {
    const T p = rows_[r][c];
    for (auto& v : rows_[r]) v /= p;
    rows_[r][c] = T(1);  // kill residual round-off on the pivot itself
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const T f = rows_[i][c];
      if (f == T(0)) continue;
      for (std::size_t j = 0; j < rows_[i].size(); ++j)
        rows_[i][j] -= f * rows_[r][j];
      rows_[i][c] = T(0);
    }
    const T f = obj_[c];
    if (f != T(0)) {
      for (std::size_t j = 0; j < obj_.size(); ++j)
        obj_[j] -= f * rows_[r][j];
      obj_[c] = T(0);
    }
    basis_[r] = c;
  }

  // After phase 1, pivot zero-level artificials out of the basis where a
  // nonzero non-artificial column exists; rows that offer none are redundant
  // and harmless with the artificial barred from re-entering.
  void evict_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < art_start_) continue;
      for (std::size_t j = 0; j < art_start_; ++j) {
        if (rows_[i][j] > tol_ || rows_[i][j] < -tol_) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  T tol_;
  std::size_t n_ = 0, m_ = 0, slack_start_ = 0, art_start_ = 0, rhs_col_ = 0;
  Mat<T> rows_;
  std::vector<T> obj_;
  std::vector<std::size_t> basis_;
};

}  // namespace ldpqif
