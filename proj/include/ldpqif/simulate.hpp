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
#include <cstdint>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "ldpqif/dataset.hpp"
#include "ldpqif/errors.hpp"
#include "ldpqif/mechanisms.hpp"
#include "ldpqif/rng.hpp"

namespace ldpqif {

// Above this domain size the random hash function is not materialized as a
// table; per-value outputs come from a seed-keyed substream instead. Both
// representations draw every queried value i.i.d. uniform over [g].
inline constexpr int kLhMaterializeCap = 1 << 20;

// A uniformly random function [k] -> [g]. The idealized full function
// family; deployed universal-hash families are a strict subset and would
// not match the complete-family channel.
struct LhHash {
  int g = 2;
  bool materialized = true;
  std::vector<int> table;      // materialized form
  std::uint64_t seed = 0;      // expanded form

  int at(int v) const {
    if (materialized) return table[v];
    return static_cast<int>(RngStream::derive(seed, {static_cast<std::uint64_t>(v)})
                                .next_below(g));
  }
};

// One perturbed user report; the active fields depend on the protocol.
struct Report {
  Protocol protocol;
  int k = 0;
  int value = 0;                  // GRR
  std::vector<int> subset;        // SS, sorted
  LhHash hash;                    // BLH/OLH
  int perturbed = 0;              // BLH/OLH, in [g]
  std::vector<std::uint8_t> bits; // SUE/OUE/THE
};

struct TrialConfig {
  MechanismSpec spec;
  int n_trials = 1;
  std::uint64_t master_seed = 0;
  int parallel_lanes = 1;
};

enum class ThePath { bernoulli, laplace };

// Sample one report. Bitwise protocols consume exactly one draw per bit in
// bit order, so paired runs that share a stream see common random numbers.
inline Report perturb(const MechanismSpec& spec, int value, RngStream& rng,
                      ThePath the_path = ThePath::bernoulli) {
  if (value < 0 || value >= spec.k)
    throw ValueOutOfRange("value outside [0, k)");
  const AnalyticParams ap = analytic_params(spec);
  Report rep;
  rep.protocol = spec.protocol;
  rep.k = spec.k;
  switch (spec.protocol) {
    case Protocol::GRR: {
      if (rng.bernoulli(ap.p)) {
        rep.value = value;
      } else {
        const int other = static_cast<int>(rng.next_below(spec.k - 1));
        rep.value = other < value ? other : other + 1;
      }
      return rep;
    }
    case Protocol::SS: {
      const int w = *spec.omega;
      const bool include_true = rng.bernoulli(ap.p);
      std::vector<int> others;
      others.reserve(spec.k - 1);
      for (int v = 0; v < spec.k; ++v)
        if (v != value) others.push_back(v);
      const int need = include_true ? w - 1 : w;
      for (int i = 0; i < need; ++i) {  // partial Fisher-Yates
        const auto j = i + rng.next_below(others.size() - i);
        std::swap(others[i], others[j]);
      }
      rep.subset.assign(others.begin(), others.begin() + need);
      if (include_true) rep.subset.push_back(value);
      std::sort(rep.subset.begin(), rep.subset.end());
      return rep;
    }
    case Protocol::BLH:
    case Protocol::OLH: {
      const int g = *spec.g;
      rep.hash.g = g;
      if (spec.k <= kLhMaterializeCap) {
        rep.hash.materialized = true;
        rep.hash.table.resize(spec.k);
        for (int v = 0; v < spec.k; ++v)
          rep.hash.table[v] = static_cast<int>(rng.next_below(g));
      } else {
        rep.hash.materialized = false;
        rep.hash.seed = rng.next_u64();
      }
      const int h = rep.hash.at(value);
      if (rng.bernoulli(ap.p)) {
        rep.perturbed = h;
      } else {
        const int other = static_cast<int>(rng.next_below(g - 1));
        rep.perturbed = other < h ? other : other + 1;
      }
      return rep;
    }
    case Protocol::SUE:
    case Protocol::OUE:
    case Protocol::THE: {
      rep.bits.resize(spec.k);
      if (spec.protocol == Protocol::THE && the_path == ThePath::laplace) {
        const double scale = 2.0 / spec.epsilon;
        for (int j = 0; j < spec.k; ++j) {
          const double signal = (j == value) ? 1.0 : 0.0;
          rep.bits[j] = (signal + rng.laplace(scale) >= *spec.theta) ? 1 : 0;
        }
      } else {
        for (int j = 0; j < spec.k; ++j) {
          const double pr = (j == value) ? ap.p : ap.q;
          rep.bits[j] = rng.bernoulli(pr) ? 1 : 0;
        }
      }
      return rep;
    }
  }
  throw UnsupportedSpec("unreachable");
}

// Posterior-max guess under a uniform prior; ties broken uniformly at
// random. For the bit-vector protocols every row's likelihood differs from a
// baseline only at the row's own bit, so argmax reduces to comparing the
// per-bit likelihood ratio at set vs unset positions.
inline int reconstruct(const MechanismSpec& spec, const Report& report,
                       RngStream& rng) {
  if (report.protocol != spec.protocol || report.k != spec.k)
    throw ShapeMismatch("report does not match mechanism spec");
  const AnalyticParams ap = analytic_params(spec);
  auto uniform_over = [&](const std::vector<int>& xs) {
    return xs[rng.next_below(xs.size())];
  };
  switch (spec.protocol) {
    case Protocol::GRR:
      if (report.value < 0 || report.value >= spec.k)
        throw ShapeMismatch("GRR report value outside domain");
      return report.value;
    case Protocol::SS:
      if (report.subset.empty() ||
          static_cast<int>(report.subset.size()) != *spec.omega)
        throw ShapeMismatch("SS report subset has wrong size");
      return uniform_over(report.subset);
    case Protocol::BLH:
    case Protocol::OLH: {
      std::vector<int> support;
      for (int v = 0; v < spec.k; ++v)
        if (report.hash.at(v) == report.perturbed) support.push_back(v);
      if (support.empty())
        return static_cast<int>(rng.next_below(spec.k));
      return uniform_over(support);
    }
    case Protocol::SUE:
    case Protocol::OUE:
    case Protocol::THE: {
      if (static_cast<int>(report.bits.size()) != spec.k)
        throw ShapeMismatch("bit vector has wrong length");
      const double set_ratio = ap.q > 0.0
                                   ? ap.p / ap.q
                                   : std::numeric_limits<double>::infinity();
      const double unset_ratio = (1.0 - ap.p) / (1.0 - ap.q);
      std::vector<int> best;
      double best_score = -1.0;
      for (int v = 0; v < spec.k; ++v) {
        const double score = report.bits[v] ? set_ratio : unset_ratio;
        if (score > best_score) {
          best_score = score;
          best.clear();
        }
        if (score == best_score) best.push_back(v);
      }
      return uniform_over(best);
    }
  }
  throw UnsupportedSpec("unreachable");
}

struct AsrResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> per_trial;
};

namespace detail {

// Run one closure per trial on `lanes` threads; results land in a vector
// indexed by trial, so any later reduction is order-fixed and lane-count
// independent.
template <typename F>
void run_trials(int n_trials, int lanes, F&& per_trial) {
  if (lanes <= 1) {
    for (int t = 0; t < n_trials; ++t) per_trial(t);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(lanes);
  for (int lane = 0; lane < lanes; ++lane)
    pool.emplace_back([&, lane] {
      for (int t = lane; t < n_trials; t += lanes) per_trial(t);
    });
  for (auto& th : pool) th.join();
}

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return s / static_cast<double>(xs.size() - 1);
}

}  // namespace detail

// Fraction of users whose value the posterior-max adversary recovers,
// averaged over trials. Streams are keyed by (master_seed, trial, user,
// phase), so results are a pure function of the config and dataset.
inline AsrResult empirical_asr(const MechanismSpec& spec,
                               const Dataset& dataset,
                               const TrialConfig& config) {
  if (dataset.domain_size != spec.k)
    throw ShapeMismatch("dataset domain does not match spec");
  if (dataset.values.empty()) throw EmptyDataset("dataset has no values");
  if (config.n_trials < 1) throw ValueOutOfRange("need at least one trial");

  const auto n_users = dataset.values.size();
  AsrResult res;
  res.per_trial.assign(config.n_trials, 0.0);
  detail::run_trials(config.n_trials, config.parallel_lanes, [&](int t) {
    const auto tu = static_cast<std::uint64_t>(t);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n_users; ++i) {
      const int v = dataset.values[i];
      RngStream sp = RngStream::derive(config.master_seed, {tu, i, 0});
      RngStream sr = RngStream::derive(config.master_seed, {tu, i, 1});
      const Report rep = perturb(spec, v, sp);
      if (reconstruct(spec, rep, sr) == v) ++correct;
    }
    res.per_trial[t] =
        static_cast<double>(correct) / static_cast<double>(n_users);
  });

  res.mean = detail::mean_of(res.per_trial);
  if (config.n_trials >= 2) {
    res.std_error = std::sqrt(
        detail::sample_variance(res.per_trial, res.mean) / config.n_trials);
  } else {
    res.std_error = std::sqrt(res.mean * (1.0 - res.mean) /
                              static_cast<double>(n_users));
  }
  return res;
}

namespace detail {

inline bool report_supports(const Report& rep, int v) {
  switch (rep.protocol) {
    case Protocol::GRR:
      return rep.value == v;
    case Protocol::SS:
      return std::binary_search(rep.subset.begin(), rep.subset.end(), v);
    case Protocol::BLH:
    case Protocol::OLH:
      return rep.hash.at(v) == rep.perturbed;
    case Protocol::SUE:
    case Protocol::OUE:
    case Protocol::THE:
      return rep.bits[v] != 0;
  }
  return false;
}

// Euclidean projection onto the probability simplex.
inline void project_to_simplex(std::vector<double>& f) {
  std::vector<double> u(f);
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, tau = 0.0;
  int rho = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = static_cast<int>(i + 1);
      tau = t;
    }
  }
  (void)rho;
  for (double& x : f) x = std::max(0.0, x - tau);
}

}  // namespace detail

// Standard unbiased frequency estimator
// f_hat_v = (count_v / n - q_star) / (p_star - q_star),
// where count_v tallies reports whose support contains v.
inline std::vector<double> estimate_frequencies(
    const MechanismSpec& spec, const std::vector<Report>& reports,
    bool project = false) {
  if (reports.empty()) throw EmptyDataset("no reports to estimate from");
  const AnalyticParams ap = analytic_params(spec);
  if (std::abs(ap.p_star - ap.q_star) < 1e-12)
    throw DegenerateEstimator("p_star equals q_star (epsilon = 0?)");
  std::vector<double> f(spec.k, 0.0);
  for (const Report& rep : reports) {
    if (rep.protocol != spec.protocol || rep.k != spec.k)
      throw ShapeMismatch("report does not match mechanism spec");
    for (int v = 0; v < spec.k; ++v)
      if (detail::report_supports(rep, v)) f[v] += 1.0;
  }
  const double n = static_cast<double>(reports.size());
  for (double& x : f) x = (x / n - ap.q_star) / (ap.p_star - ap.q_star);
  if (project) detail::project_to_simplex(f);
  return f;
}

struct MseRow {
  MechanismSpec spec;
  double mean_mse = 0.0;
  double variance = 0.0;
};

// Per-spec mean squared error of the frequency estimate against the true
// dataset frequencies. Perturbation streams are keyed by (trial, user) only,
// so every spec sees the same underlying uniforms — paired comparisons
// across protocols use common random numbers.
inline std::vector<MseRow> mse_experiment(
    const std::vector<MechanismSpec>& specs, const Dataset& dataset,
    const TrialConfig& config) {
  if (config.n_trials < 1) throw ValueOutOfRange("need at least one trial");
  for (const auto& s : specs)
    if (s.k != dataset.domain_size)
      throw ShapeMismatch("all specs must share the dataset domain");
  const std::vector<double> truth = dataset.frequencies();
  const auto n_users = dataset.values.size();

  std::vector<MseRow> rows;
  rows.reserve(specs.size());
  for (const auto& spec : specs) {
    std::vector<double> per_trial(config.n_trials, 0.0);
    detail::run_trials(config.n_trials, config.parallel_lanes, [&](int t) {
      const auto tu = static_cast<std::uint64_t>(t);
      std::vector<Report> reports;
      reports.reserve(n_users);
      for (std::size_t i = 0; i < n_users; ++i) {
        RngStream sp = RngStream::derive(config.master_seed, {tu, i, 0});
        reports.push_back(perturb(spec, dataset.values[i], sp));
      }
      const std::vector<double> f = estimate_frequencies(spec, reports);
      double mse = 0.0;
      for (int v = 0; v < spec.k; ++v)
        mse += (f[v] - truth[v]) * (f[v] - truth[v]);
      per_trial[t] = mse / static_cast<double>(spec.k);
    });
    MseRow row{spec, 0.0, 0.0};
    row.mean_mse = detail::mean_of(per_trial);
    row.variance = detail::sample_variance(per_trial, row.mean_mse);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ldpqif
