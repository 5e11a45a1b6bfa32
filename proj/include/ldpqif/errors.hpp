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
#include <stdexcept>
#include <string>

namespace ldpqif {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct NonStochasticRow : Error {
  std::size_t row;
  double residual;
  NonStochasticRow(std::size_t r, double res)
      : Error("row " + std::to_string(r) + " sums to 1 with residual " +
              std::to_string(res)),
        row(r),
        residual(res) {}
};

struct NegativeEntry : Error {
  using Error::Error;
};

struct SizeCapExceeded : Error {
  using Error::Error;
};

struct NotPowerOfTwoRows : Error {
  using Error::Error;
};

struct InvalidDomainSize : Error {
  using Error::Error;
};

struct NegativeEpsilon : Error {
  using Error::Error;
};

struct OmegaOutOfRange : Error {
  using Error::Error;
};

struct ThetaRequired : Error {
  using Error::Error;
};

struct ThetaOutOfRange : Error {
  using Error::Error;
};

struct UnsupportedSpec : Error {
  using Error::Error;
};

struct NotTwoByTwo : Error {
  using Error::Error;
};

struct SolverIterationLimit : Error {
  double best_residual;
  explicit SolverIterationLimit(double res)
      : Error("simplex iteration limit reached, best residual " +
              std::to_string(res)),
        best_residual(res) {}
};

struct AscendingGridRequired : Error {
  using Error::Error;
};

struct ParseError : Error {
  std::size_t line;
  ParseError(const std::string& what, std::size_t l)
      : Error(what + " (line " + std::to_string(l) + ")"), line(l) {}
};

struct EmptyDataset : Error {
  using Error::Error;
};

struct ValueOutOfRange : Error {
  using Error::Error;
};

struct ShapeMismatch : Error {
  using Error::Error;
};

struct DegenerateEstimator : Error {
  using Error::Error;
};

}  // namespace ldpqif
