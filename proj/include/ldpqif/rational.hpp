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

#include <boost/multiprecision/cpp_int.hpp>

#include "ldpqif/matrix.hpp"

namespace ldpqif {

// Exact rational scalar for the oracle/exact verdict paths. Doubles convert
// losslessly (they are dyadic rationals), so exact mode can check floating
// constructions without tolerance arguments.
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat_from_double(double v) { return Rat(v); }

inline Mat<Rat> rat_matrix(const Mat<double>& m) {
  Mat<Rat> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    out[i].reserve(m[i].size());
    for (double v : m[i]) out[i].push_back(rat_from_double(v));
  }
  return out;
}

}  // namespace ldpqif
