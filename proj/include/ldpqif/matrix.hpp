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

#include "ldpqif/errors.hpp"

namespace ldpqif {

// Dense row-major matrix, generic over the scalar type so the same algebra
// runs in double and in exact-rational mode.
template <typename T>
using Mat = std::vector<std::vector<T>>;

template <typename T>
std::size_t row_count(const Mat<T>& m) {
  return m.size();
}

template <typename T>
std::size_t col_count(const Mat<T>& m) {
  return m.empty() ? 0 : m.front().size();
}

template <typename T>
bool rectangular(const Mat<T>& m) {
  for (const auto& row : m)
    if (row.size() != col_count(m)) return false;
  return true;
}

template <typename T>
Mat<T> matmul(const Mat<T>& a, const Mat<T>& b) {
  if (col_count(a) != row_count(b))
    throw DimensionMismatch("matmul: inner dimensions disagree");
  const std::size_t n = row_count(a), m = col_count(b), inner = row_count(b);
  Mat<T> out(n, std::vector<T>(m, T(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < inner; ++k) {
      const T& aik = a[i][k];
      if (aik == T(0)) continue;
      for (std::size_t j = 0; j < m; ++j) out[i][j] += aik * b[k][j];
    }
  return out;
}

template <typename T>
Mat<T> kron(const Mat<T>& a, const Mat<T>& b) {
  const std::size_t ra = row_count(a), ca = col_count(a);
  const std::size_t rb = row_count(b), cb = col_count(b);
  Mat<T> out(ra * rb, std::vector<T>(ca * cb, T(0)));
  for (std::size_t i = 0; i < ra; ++i)
    for (std::size_t j = 0; j < ca; ++j)
      for (std::size_t u = 0; u < rb; ++u)
        for (std::size_t v = 0; v < cb; ++v)
          out[i * rb + u][j * cb + v] = a[i][j] * b[u][v];
  return out;
}

// Sum over columns of the column maximum; the Bayes capacity of a
// row-stochastic matrix. Columns that are entirely zero contribute zero.
template <typename T>
T column_max_sum(const Mat<T>& m) {
  T total(0);
  for (std::size_t j = 0; j < col_count(m); ++j) {
    T best = m[0][j];
    for (std::size_t i = 1; i < row_count(m); ++i)
      if (m[i][j] > best) best = m[i][j];
    total += best;
  }
  return total;
}

template <typename T>
Mat<T> identity_matrix(std::size_t n) {
  Mat<T> out(n, std::vector<T>(n, T(0)));
  for (std::size_t i = 0; i < n; ++i) out[i][i] = T(1);
  return out;
}

}  // namespace ldpqif
