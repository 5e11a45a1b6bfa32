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

#include <cmath>
#include <limits>

#include "ldpqif/channel.hpp"
#include "ldpqif/mechanisms.hpp"

namespace ldpqif {

enum class MeasureTag { g_average, g_max_case, bayes, min_entropy };

struct LeakageReport {
  double prior_vulnerability;
  double posterior_vulnerability;
  double multiplicative_leakage;
  MeasureTag measure_tag;
};

// V_g(pi) = max_w sum_x pi_x g(w, x)
inline double prior_vulnerability(const GainFunction& g, const Prior& prior) {
  if (g.secrets() != prior.size())
    throw DimensionMismatch("gain secrets must match prior length");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < g.actions(); ++w) {
    double v = 0.0;
    for (std::size_t x = 0; x < prior.size(); ++x)
      v += prior[x] * g.at(w, x);
    if (v > best) best = v;
  }
  return best;
}

// V_g(pi, C) = sum_y max_w sum_x pi_x C_{x,y} g(w, x)
inline double posterior_vulnerability(const GainFunction& g, const Prior& prior,
                                      const ChannelMatrix& c) {
  if (prior.size() != c.rows())
    throw DimensionMismatch("prior length must equal channel rows");
  if (g.secrets() != c.rows())
    throw DimensionMismatch("gain secrets must equal channel rows");
  double total = 0.0;
  for (std::size_t y = 0; y < c.cols(); ++y) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < g.actions(); ++w) {
      double v = 0.0;
      for (std::size_t x = 0; x < c.rows(); ++x)
        v += prior[x] * c.at(x, y) * g.at(w, x);
      if (v > best) best = v;
    }
    total += best;
  }
  return total;
}

// Max-case vulnerability: posterior form max_{y,x,w} pi_x C_{x,y} g(w,x),
// prior form max_{w,x} pi_x g(w,x).
inline double max_case_vulnerability(const GainFunction& g, const Prior& prior,
                                     const ChannelMatrix& c, bool posterior) {
  if (prior.size() != c.rows())
    throw DimensionMismatch("prior length must equal channel rows");
  if (g.secrets() != c.rows())
    throw DimensionMismatch("gain secrets must equal channel rows");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < g.actions(); ++w)
    for (std::size_t x = 0; x < c.rows(); ++x) {
      if (posterior) {
        for (std::size_t y = 0; y < c.cols(); ++y)
          best = std::max(best, prior[x] * c.at(x, y) * g.at(w, x));
      } else {
        best = std::max(best, prior[x] * g.at(w, x));
      }
    }
  return best;
}

inline LeakageReport leakage_report(const GainFunction& g, const Prior& prior,
                                    const ChannelMatrix& c,
                                    MeasureTag tag = MeasureTag::g_average) {
  double pv, qv;
  if (tag == MeasureTag::g_max_case) {
    pv = max_case_vulnerability(g, prior, c, false);
    qv = max_case_vulnerability(g, prior, c, true);
  } else {
    pv = prior_vulnerability(g, prior);
    qv = posterior_vulnerability(g, prior, c);
  }
  return {pv, qv, pv > 0 ? qv / pv : std::numeric_limits<double>::infinity(),
          tag};
}

// Bayes capacity: the sum of column maxima.
inline double bayes_capacity(const ChannelMatrix& c) {
  return column_max_sum(c.entries());
}

// Adversarial success rate of the posterior-max adversary under a uniform
// prior; equals bayes_capacity / k.
inline double asr(const ChannelMatrix& c) {
  return bayes_capacity(c) / static_cast<double>(c.rows());
}

// Uniform-prior min-entropy leakage, natural log.
inline double min_entropy_leakage(const ChannelMatrix& c) {
  return std::log(bayes_capacity(c));
}

// ln of the worst column likelihood ratio; the channel's tightest LDP
// epsilon. +infinity when some column mixes zero and nonzero entries.
inline double epsilon_of(const ChannelMatrix& c) {
  double worst = 1.0;
  for (std::size_t y = 0; y < c.cols(); ++y) {
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < c.rows(); ++x) {
      mx = std::max(mx, c.at(x, y));
      mn = std::min(mn, c.at(x, y));
    }
    if (mx == 0.0) continue;  // all-zero column carries no observation
    if (mn == 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, mx / mn);
  }
  return std::log(worst);
}

// Closed-form ASR of the LH channel over the complete hash family,
// (e^eps g^k + (g-1)^k (1-e^eps)) / ((e^eps + g - 1) k g^{k-1}),
// evaluated in an overflow-safe rearrangement.
inline double lh_asr_closed(int k, int g, double epsilon) {
  if (k < 2 || g < 2) throw InvalidDomainSize("LH requires k, g >= 2");
  if (epsilon < 0) throw NegativeEpsilon("epsilon must be >= 0");
  const double e = std::exp(epsilon);
  const double shrink = std::pow(1.0 - 1.0 / g, k);  // ((g-1)/g)^k
  return g * (e - (e - 1.0) * shrink) / ((e + g - 1.0) * k);
}

inline double lh_bayes_capacity_closed(int k, int g, double epsilon) {
  return lh_asr_closed(k, g, epsilon) * k;
}

// The earlier published LH ASR formula, kept only for comparison plots;
// diverges from lh_asr_closed at small k.
inline double lh_asr_prior_work(int k, int g, double epsilon) {
  if (k < 2 || g < 2) throw InvalidDomainSize("LH requires k, g >= 2");
  if (epsilon < 0) throw NegativeEpsilon("epsilon must be >= 0");
  const double e = std::exp(epsilon);
  const double denom_ratio = std::max(static_cast<double>(k) / g, 1.0);
  return e / ((e + g - 1.0) * denom_ratio);
}

// Closed-form Bayes capacity per protocol. SUE and SS use the
// column-max-sum-consistent forms (see README notes on the printed
// simplifications).
inline double bayes_capacity_closed(const MechanismSpec& s) {
  const double e = std::exp(s.epsilon);
  switch (s.protocol) {
    case Protocol::GRR:
      return s.k * e / (e + s.k - 1);
    case Protocol::SS: {
      const int w = *s.omega;
      const double p = w * e / (w * e + s.k - w);
      const double in_col = p / static_cast<double>(binomial(s.k - 1, w - 1));
      const double out_col =
          (1.0 - p) / static_cast<double>(binomial(s.k - 1, w));
      return static_cast<double>(binomial(s.k, w)) * std::max(in_col, out_col);
    }
    case Protocol::BLH:
    case Protocol::OLH:
      return lh_bayes_capacity_closed(s.k, *s.g, s.epsilon);
    case Protocol::SUE: {
      const auto [p, q] = bitwise_params(Protocol::SUE, s.epsilon);
      return (p / q) * (1.0 - std::pow(p, s.k)) + std::pow(p, s.k - 1) * q;
    }
    case Protocol::OUE: {
      const double q = 1.0 / (e + 1.0);
      return (std::pow(1.0 - q, s.k - 1) * (2.0 * q - 1.0) + 1.0) / (2.0 * q);
    }
    case Protocol::THE: {
      const auto [p, q] = bitwise_params(Protocol::THE, s.epsilon, s.theta);
      return std::pow(1.0 - q, s.k - 1) * (1.0 - p / q) + p / q;
    }
  }
  throw UnsupportedSpec("unreachable");
}

}  // namespace ldpqif
