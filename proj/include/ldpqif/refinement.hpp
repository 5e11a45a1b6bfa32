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

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldpqif/channel.hpp"
#include "ldpqif/lp.hpp"
#include "ldpqif/mechanisms.hpp"
#include "ldpqif/rational.hpp"

namespace ldpqif {

inline constexpr double kRefineTol = 1e-8;

// Normalized hypothesis-testing operating point of a 2x2 channel:
// alpha = false-positive rate, beta = false-negative rate, with columns
// swapped when needed so that beta <= 1 - alpha.
struct TradeoffPoint {
  double alpha;
  double beta;
  bool column_swapped;
};

inline TradeoffPoint tradeoff_point(const ChannelMatrix& c) {
  if (c.rows() != 2 || c.cols() != 2)
    throw NotTwoByTwo("tradeoff_point requires a 2x2 channel");
  double alpha = c.at(0, 1), beta = c.at(1, 0);
  bool swapped = false;
  if (beta > 1.0 - alpha) {
    alpha = c.at(0, 0);
    beta = c.at(1, 1);
    swapped = true;
  }
  return {alpha, beta, swapped};
}

// Piecewise-linear curve through (0,1), (alpha,beta), (1,0); convex and
// nonincreasing for any valid operating point.
struct TradeoffFunction {
  std::vector<std::pair<double, double>> breakpoints;

  static TradeoffFunction from_point(const TradeoffPoint& p) {
    return {{{0.0, 1.0}, {p.alpha, p.beta}, {1.0, 0.0}}};
  }

  double operator()(double x) const {
    if (x <= breakpoints.front().first) return breakpoints.front().second;
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
      const auto& [x0, y0] = breakpoints[i - 1];
      const auto& [x1, y1] = breakpoints[i];
      if (x <= x1) {
        if (x1 == x0) return std::min(y0, y1);
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
      }
    }
    return breakpoints.back().second;
  }
};

// Pointwise T1 <= T2; for piecewise-linear convex curves it suffices to
// compare at every breakpoint abscissa of either curve.
inline bool tradeoff_leq(const TradeoffFunction& t1, const TradeoffFunction& t2,
                         double tol = 1e-12) {
  std::vector<double> xs;
  for (const auto& [x, y] : t1.breakpoints) xs.push_back(x);
  for (const auto& [x, y] : t2.breakpoints) xs.push_back(x);
  for (double x : xs)
    if (t1(x) > t2(x) + tol) return false;
  return true;
}

enum class RefineMethod { tradeoff_2x2, lp_witness, exact_rational };

inline const char* refine_method_name(RefineMethod m) {
  switch (m) {
    case RefineMethod::tradeoff_2x2:
      return "tradeoff_2x2";
    case RefineMethod::lp_witness:
      return "lp_witness";
    case RefineMethod::exact_rational:
      return "exact_rational";
  }
  return "?";
}

struct RefinementVerdict {
  bool relation_holds;
  std::optional<ChannelMatrix> witness;
  double residual;
  RefineMethod method;
};

// C refined-by D via the operating-point criterion, written with cross
// multiplication so that alpha or 1-alpha equal to zero follows the
// extended-real reading (x/0 = +infinity for x > 0, and 0/0 ties resolve
// consistently with the witness LP).
inline RefinementVerdict refines_2x2(const ChannelMatrix& c,
                                     const ChannelMatrix& d) {
  const TradeoffPoint pc = tradeoff_point(c), pd = tradeoff_point(d);
  const bool cond1 =
      pc.beta * (1.0 - pd.alpha) <= pd.beta * (1.0 - pc.alpha);
  const bool cond2 =
      (1.0 - pc.beta) * pd.alpha >= (1.0 - pd.beta) * pc.alpha;
  return {cond1 && cond2, std::nullopt, 0.0, RefineMethod::tradeoff_2x2};
}

// Max-case refinement on 2x2 channels coincides with average-case
// refinement; exposed separately so the coincidence stays a tested identity.
inline bool max_case_refines_2x2(const ChannelMatrix& c,
                                 const ChannelMatrix& d) {
  return refines_2x2(c, d).relation_holds;
}

namespace detail {

// Assemble min t s.t. -t <= (B W - A)_ij <= t, W >= 0, W rows sum to 1.
// Variables: W in row-major order, then t.
template <typename T>
LpResult<T> refinement_lp(const Mat<T>& b, const Mat<T>& a, T tol) {
  const std::size_t n = row_count(b), nb = col_count(b), ma = col_count(a);
  const std::size_t nvars = nb * ma + 1, t_col = nb * ma;

  std::vector<T> c(nvars, T(0));
  c[t_col] = T(1);

  Mat<T> a_eq(nb, std::vector<T>(nvars, T(0)));
  std::vector<T> b_eq(nb, T(1));
  for (std::size_t r = 0; r < nb; ++r)
    for (std::size_t j = 0; j < ma; ++j) a_eq[r][r * ma + j] = T(1);

  Mat<T> a_ub;
  std::vector<T> b_ub;
  a_ub.reserve(2 * n * ma);
  b_ub.reserve(2 * n * ma);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < ma; ++j) {
      std::vector<T> up(nvars, T(0)), lo(nvars, T(0));
      for (std::size_t r = 0; r < nb; ++r) {
        up[r * ma + j] = b[i][r];
        lo[r * ma + j] = -b[i][r];
      }
      up[t_col] = T(-1);
      lo[t_col] = T(-1);
      a_ub.push_back(std::move(up));
      b_ub.push_back(a[i][j]);
      a_ub.push_back(std::move(lo));
      b_ub.push_back(-a[i][j]);
    }

  SimplexSolver<T> solver(tol);
  return solver.solve(c, a_ub, b_ub, a_eq, b_eq);
}

template <typename T>
Mat<double> witness_entries(const std::vector<T>& x, std::size_t nb,
                            std::size_t ma) {
  Mat<double> w(nb, std::vector<double>(ma, 0.0));
  for (std::size_t r = 0; r < nb; ++r)
    for (std::size_t j = 0; j < ma; ++j)
      w[r][j] = static_cast<double>(x[r * ma + j]);
  return w;
}

}  // namespace detail

// General refinement B refined-by A: search for a row-stochastic W with
// B W = A. `exact` switches the solve to rational arithmetic (intended for
// channels of at most 64 columns), where the optimal residual is exact.
inline RefinementVerdict refines_lp(const ChannelMatrix& b,
                                    const ChannelMatrix& a,
                                    double tolerance = kRefineTol,
                                    bool exact = false) {
  if (b.rows() != a.rows())
    throw DimensionMismatch("refines_lp: channels must share the input set");
  const std::size_t nb = b.cols(), ma = a.cols();

  double residual;
  Mat<double> w;
  RefineMethod method;
  if (exact) {
    auto res = detail::refinement_lp<Rat>(rat_matrix(b.entries()),
                                          rat_matrix(a.entries()), Rat(0));
    if (res.status == LpStatus::iteration_limit)
      throw SolverIterationLimit(static_cast<double>(res.objective));
    if (res.status == LpStatus::infeasible)
      throw UnsupportedSpec("refinement LP cannot be infeasible");
    residual = static_cast<double>(res.objective);
    w = detail::witness_entries(res.x, nb, ma);
    method = RefineMethod::exact_rational;
  } else {
    auto res = detail::refinement_lp<double>(b.entries(), a.entries(), 1e-11);
    if (res.status == LpStatus::iteration_limit)
      throw SolverIterationLimit(res.objective);
    if (res.status == LpStatus::infeasible)
      throw UnsupportedSpec("refinement LP cannot be infeasible");
    residual = res.objective;
    w = detail::witness_entries(res.x, nb, ma);
    method = RefineMethod::lp_witness;
  }

  const bool holds = residual <= tolerance;
  std::optional<ChannelMatrix> witness;
  if (holds)
    witness = validate_channel(std::move(w), b.output_labels(),
                               a.output_labels());
  return {holds, std::move(witness), residual, method};
}

// Threshold on theta above which bitwise OUE is refined by bitwise THE at a
// given epsilon; below epsilon = 1e-8 the 0/0 form is replaced by its limit.
inline double theta_threshold(double epsilon) {
  if (epsilon < 0) throw NegativeEpsilon("epsilon must be >= 0");
  if (epsilon < 1e-8) return 1.0 / std::sqrt(2.0);
  const double e = std::exp(epsilon), eh = std::exp(epsilon / 2.0);
  return (2.0 * std::log(e + 1.0 + (eh - 1.0) * std::sqrt(e + 1.0)) - epsilon -
          2.0 * std::log(2.0)) /
         epsilon;
}

// Companion lower root of the same quadratic; reported for diagnostics only,
// never used to assert refinement.
inline std::optional<double> theta_threshold_other(double epsilon) {
  if (epsilon < 0) throw NegativeEpsilon("epsilon must be >= 0");
  if (epsilon < 1e-8) return std::nullopt;
  const double e = std::exp(epsilon), eh = std::exp(epsilon / 2.0);
  const double arg = e + 1.0 - (eh - 1.0) * std::sqrt(e + 1.0);
  if (arg <= 0.0) return std::nullopt;
  return (2.0 * std::log(arg) - epsilon - 2.0 * std::log(2.0)) / epsilon;
}

struct FamilySpec {
  Protocol protocol;
  int k = 2;                       // used by GRR and one-hot families
  std::optional<double> theta;     // THE only
  bool one_hot = false;            // lift SUE/OUE/THE to the one-hot channel
};

struct FamilyPair {
  double epsilon_low;
  double epsilon_high;
  bool holds;
  double residual;
};

struct FamilyReport {
  FamilySpec family;
  std::vector<FamilyPair> pairs;
  bool all_hold;
};

// For each adjacent grid pair eps' <= eps, check M_eps refined-by M_eps'.
// Bitwise families use the 2x2 criterion; GRR and one-hot families use the
// LP witness search.
inline FamilyReport verify_refinement_family(const FamilySpec& fam,
                                             const std::vector<double>& grid) {
  if (grid.size() < 2)
    throw AscendingGridRequired("epsilon grid needs at least 2 points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i - 1] < grid[i]))
      throw AscendingGridRequired("epsilon grid must be strictly ascending");

  const bool bitwise_family = is_bitwise(fam.protocol) && !fam.one_hot;
  auto make = [&](double eps) -> ChannelMatrix {
    if (fam.protocol == Protocol::GRR) return grr_channel(fam.k, eps);
    if (bitwise_family) return bitwise(fam.protocol, eps, fam.theta);
    if (is_bitwise(fam.protocol))
      return onehot_channel(fam.protocol, fam.k, eps, fam.theta);
    throw UnsupportedSpec("no refinement family for this protocol");
  };

  FamilyReport rep{fam, {}, true};
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double lo = grid[i - 1], hi = grid[i];
    const ChannelMatrix c_hi = make(hi), c_lo = make(lo);
    FamilyPair pr{lo, hi, false, 0.0};
    if (bitwise_family) {
      pr.holds = refines_2x2(c_hi, c_lo).relation_holds;
    } else {
      auto v = refines_lp(c_hi, c_lo);
      pr.holds = v.relation_holds;
      pr.residual = v.residual;
    }
    rep.all_hold = rep.all_hold && pr.holds;
    rep.pairs.push_back(pr);
  }
  return rep;
}

inline nlohmann::json verdict_to_json(const RefinementVerdict& v) {
  nlohmann::json j{{"holds", v.relation_holds},
                   {"residual", v.residual},
                   {"method", refine_method_name(v.method)}};
  if (v.witness) j["witness"] = channel_to_json(*v.witness);
  return j;
}

inline std::string family_report_to_csv(const FamilyReport& r) {
  std::ostringstream out;
  out << "epsilon_low,epsilon_high,holds,residual\n";
  for (const auto& p : r.pairs)
    out << format_double_17(p.epsilon_low) << ','
        << format_double_17(p.epsilon_high) << ','
        << (p.holds ? "true" : "false") << ','
        << format_double_17(p.residual) << '\n';
  return out.str();
}

}  // namespace ldpqif
