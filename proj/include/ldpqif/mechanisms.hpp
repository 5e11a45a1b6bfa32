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

#include <cfenv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldpqif/channel.hpp"
#include "ldpqif/errors.hpp"

namespace ldpqif {

enum class Protocol { GRR, SS, BLH, OLH, SUE, OUE, THE };

inline const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::GRR: return "GRR";
    case Protocol::SS: return "SS";
    case Protocol::BLH: return "BLH";
    case Protocol::OLH: return "OLH";
    case Protocol::SUE: return "SUE";
    case Protocol::OUE: return "OUE";
    case Protocol::THE: return "THE";
  }
  return "?";
}

inline Protocol protocol_from_name(const std::string& s) {
  for (Protocol p : {Protocol::GRR, Protocol::SS, Protocol::BLH, Protocol::OLH,
                     Protocol::SUE, Protocol::OUE, Protocol::THE})
    if (s == protocol_name(p)) return p;
  throw UnsupportedSpec("unknown protocol '" + s + "'");
}

inline bool is_lh(Protocol p) {
  return p == Protocol::BLH || p == Protocol::OLH;
}
inline bool is_bitwise(Protocol p) {
  return p == Protocol::SUE || p == Protocol::OUE || p == Protocol::THE;
}

// Round-half-to-even; pins down the "closest integer" notation used by the
// SS and OLH parameter choices.
inline long round_half_even(double x) {
  // nearbyint honours the default FE_TONEAREST mode, which breaks ties to even
  return std::lround(std::nearbyint(x));
}

// Per-bit retention/false-positive probabilities of the bitwise channels.
struct BitwiseParams {
  double p;
  double q;
};

inline int ss_optimal_omega(int k, double epsilon) {
  if (k < 2) throw InvalidDomainSize("SS requires k >= 2");
  if (epsilon < 0) throw NegativeEpsilon("epsilon must be >= 0");
  long w = round_half_even(static_cast<double>(k) / (std::exp(epsilon) + 1.0));
  if (w < 1) w = 1;
  if (w > k) w = k;
  return static_cast<int>(w);
}

// Symbolic description of a protocol instance. Protocol-specific parameters
// are filled with their standard defaults on construction.
struct MechanismSpec {
  Protocol protocol;
  int k;
  double epsilon;
  std::optional<int> omega;     // SS only
  std::optional<int> g;         // LH family only
  std::optional<double> theta;  // THE only

  MechanismSpec(Protocol proto, int k_, double eps,
                std::optional<int> omega_ = std::nullopt,
                std::optional<int> g_ = std::nullopt,
                std::optional<double> theta_ = std::nullopt)
      : protocol(proto), k(k_), epsilon(eps), omega(omega_), g(g_),
        theta(theta_) {
    if (k < 2) throw InvalidDomainSize("k must be >= 2");
    if (epsilon < 0) throw NegativeEpsilon("epsilon must be >= 0");
    if (omega && protocol != Protocol::SS)
      throw UnsupportedSpec("omega only applies to SS");
    if (g && !is_lh(protocol)) throw UnsupportedSpec("g only applies to LH");
    if (theta && protocol != Protocol::THE)
      throw UnsupportedSpec("theta only applies to THE");
    switch (protocol) {
      case Protocol::SS:
        if (!omega) omega = ss_optimal_omega(k, epsilon);
        if (*omega < 1 || *omega > k - 1)
          throw OmegaOutOfRange("omega must lie in [1, k-1]");
        break;
      case Protocol::BLH:
        if (g && *g != 2) throw UnsupportedSpec("BLH forces g = 2");
        g = 2;
        break;
      case Protocol::OLH:
        if (!g) g = static_cast<int>(round_half_even(std::exp(epsilon) + 1.0));
        if (*g < 2) throw UnsupportedSpec("LH requires g >= 2");
        break;
      case Protocol::THE:
        if (!theta) throw ThetaRequired("THE requires theta");
        if (!(*theta > 0.5 && *theta < 1.0))
          throw ThetaOutOfRange("theta must lie in (0.5, 1)");
        break;
      default:
        break;
    }
  }
};

inline nlohmann::json spec_to_json(const MechanismSpec& s) {
  nlohmann::json j{{"protocol", protocol_name(s.protocol)},
                   {"k", s.k},
                   {"epsilon", s.epsilon}};
  if (s.omega) j["omega"] = *s.omega;
  if (s.g) j["g"] = *s.g;
  if (s.theta) j["theta"] = *s.theta;
  return j;
}

inline MechanismSpec spec_from_json(const nlohmann::json& j) {
  auto opt_int = [&](const char* key) -> std::optional<int> {
    if (j.contains(key)) return j.at(key).get<int>();
    return std::nullopt;
  };
  std::optional<double> theta;
  if (j.contains("theta")) theta = j.at("theta").get<double>();
  return MechanismSpec(protocol_from_name(j.at("protocol").get<std::string>()),
                       j.at("k").get<int>(), j.at("epsilon").get<double>(),
                       opt_int("omega"), opt_int("g"), theta);
}

// ---- Channel builders ----

inline ChannelMatrix grr_channel(int k, double epsilon) {
  if (k < 2) throw InvalidDomainSize("GRR requires k >= 2");
  if (epsilon < 0) throw NegativeEpsilon("epsilon must be >= 0");
  const double e = std::exp(epsilon);
  const double p = e / (e + k - 1), q = 1.0 / (e + k - 1);
  Mat<double> m(k, std::vector<double>(k, q));
  for (int i = 0; i < k; ++i) m[i][i] = p;
  auto labels = default_labels("", static_cast<std::size_t>(k));
  return validate_channel(std::move(m), labels, labels);
}

inline std::uint64_t binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  std::uint64_t out = 1;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

namespace detail {
inline void enumerate_subsets(int k, int w,
                              std::vector<std::vector<int>>& out) {
  std::vector<int> cur(w);
  for (int i = 0; i < w; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    int i = w - 1;
    while (i >= 0 && cur[i] == k - w + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < w; ++j) cur[j] = cur[j - 1] + 1;
  }
}
}  // namespace detail

inline ChannelMatrix ss_channel(int k, double epsilon,
                                std::optional<int> omega = std::nullopt,
                                std::size_t size_cap = kDefaultSizeCap) {
  if (k < 2) throw InvalidDomainSize("SS requires k >= 2");
  if (epsilon < 0) throw NegativeEpsilon("epsilon must be >= 0");
  const int w = omega ? *omega : ss_optimal_omega(k, epsilon);
  if (w < 1 || w > k - 1) throw OmegaOutOfRange("omega must lie in [1, k-1]");
  const std::uint64_t ncols = binomial(k, w);
  if (ncols * static_cast<std::uint64_t>(k) > size_cap)
    throw SizeCapExceeded("SS channel with C(k, omega) = " +
                          std::to_string(ncols) + " columns exceeds size cap");
  const double e = std::exp(epsilon);
  const double p = w * e / (w * e + k - w);
  const double in_entry = p / static_cast<double>(binomial(k - 1, w - 1));
  const double out_entry = (1.0 - p) / static_cast<double>(binomial(k - 1, w));
  std::vector<std::vector<int>> subsets;
  detail::enumerate_subsets(k, w, subsets);
  Mat<double> m(k, std::vector<double>(subsets.size(), out_entry));
  std::vector<std::string> out_labels;
  out_labels.reserve(subsets.size());
  for (std::size_t j = 0; j < subsets.size(); ++j) {
    std::string label = "{";
    for (std::size_t t = 0; t < subsets[j].size(); ++t) {
      if (t) label += ',';
      label += std::to_string(subsets[j][t]);
      m[subsets[j][t]][j] = in_entry;
    }
    label += '}';
    out_labels.push_back(std::move(label));
  }
  return validate_channel(std::move(m),
                          default_labels("", static_cast<std::size_t>(k)),
                          std::move(out_labels));
}

// Explicit LH channel over the complete function family [k] -> [g] of size
// g^k. Outputs are (hash tuple, perturbed value) pairs; the hash tuple index
// varies slowest, enumerated lexicographically.
inline ChannelMatrix lh_channel(int k, int g, double epsilon,
                                std::size_t size_cap = kDefaultSizeCap) {
  if (k < 2 || g < 2) throw InvalidDomainSize("LH requires k, g >= 2");
  if (epsilon < 0) throw NegativeEpsilon("epsilon must be >= 0");
  double fam = 1.0;
  for (int i = 0; i < k; ++i) fam *= g;
  const double total = fam * g * k;
  if (total > static_cast<double>(size_cap))
    throw SizeCapExceeded("LH channel with g^k*g = " +
                          std::to_string(fam * g) + " columns exceeds cap");
  const std::uint64_t nfun = static_cast<std::uint64_t>(fam);
  const double e = std::exp(epsilon);
  const double p = e / (e + g - 1) / fam, q = 1.0 / (e + g - 1) / fam;
  Mat<double> m(k, std::vector<double>(nfun * g));
  std::vector<std::string> out_labels(nfun * g);
  std::vector<int> h(k, 0);
  for (std::uint64_t hi = 0; hi < nfun; ++hi) {
    std::string hlabel = "h=(";
    for (int x = 0; x < k; ++x) {
      if (x) hlabel += ',';
      hlabel += std::to_string(h[x]);
    }
    hlabel += ")";
    for (int yp = 0; yp < g; ++yp) {
      const std::uint64_t col = hi * g + yp;
      out_labels[col] = hlabel + ";yp=" + std::to_string(yp);
      for (int x = 0; x < k; ++x) m[x][col] = (h[x] == yp) ? p : q;
    }
    // next hash tuple, lexicographic with the last coordinate fastest
    for (int x = k - 1; x >= 0; --x) {
      if (++h[x] < g) break;
      h[x] = 0;
    }
  }
  return validate_channel(std::move(m),
                          default_labels("", static_cast<std::size_t>(k)),
                          std::move(out_labels));
}

inline BitwiseParams bitwise_params(Protocol proto, double epsilon,
                                    std::optional<double> theta = std::nullopt) {
  if (epsilon < 0) throw NegativeEpsilon("epsilon must be >= 0");
  switch (proto) {
    case Protocol::SUE: {
      const double p = std::exp(epsilon / 2) / (std::exp(epsilon / 2) + 1);
      return {p, 1.0 - p};
    }
    case Protocol::OUE:
      return {0.5, 1.0 / (std::exp(epsilon) + 1.0)};
    case Protocol::THE: {
      if (!theta) throw ThetaRequired("THE requires theta");
      if (!(*theta > 0.5 && *theta < 1.0))
        throw ThetaOutOfRange("theta must lie in (0.5, 1)");
      return {1.0 - 0.5 * std::exp(epsilon * (*theta - 1.0) / 2.0),
              0.5 * std::exp(-epsilon * *theta / 2.0)};
    }
    default:
      throw UnsupportedSpec("bitwise core only exists for SUE, OUE, THE");
  }
}

// 2x2 per-bit channel; rows are input bit 0, 1 and columns output bit 0, 1.
inline ChannelMatrix bitwise(Protocol proto, double epsilon,
                             std::optional<double> theta = std::nullopt) {
  const auto [p, q] = bitwise_params(proto, epsilon, theta);
  Mat<double> m{{1.0 - q, q}, {1.0 - p, p}};
  return validate_channel(std::move(m), std::vector<std::string>{"0", "1"},
                          std::vector<std::string>{"0", "1"});
}

inline ChannelMatrix onehot_channel(Protocol proto, int k, double epsilon,
                                    std::optional<double> theta = std::nullopt,
                                    std::size_t size_cap = kDefaultSizeCap) {
  if (k < 2) throw InvalidDomainSize("one-hot construction requires k >= 2");
  return restrict_to_one_hot(
      kronecker_power(bitwise(proto, epsilon, theta),
                      static_cast<std::size_t>(k), size_cap));
}

// The 2x3 channel that is the maximum element refined by both bitwise SUE
// and bitwise OUE at the same epsilon.
inline ChannelMatrix sue_oue_min(double epsilon) {
  if (epsilon < 0) throw NegativeEpsilon("epsilon must be >= 0");
  const double e = std::exp(epsilon), eh = std::exp(epsilon / 2);
  Mat<double> m{{eh / (eh + 1), 1 / (eh + 1) - 1 / (e + 1), 1 / (e + 1)},
                {1 / (eh + 1), eh / (eh + 1) - 0.5, 0.5}};
  return validate_channel(std::move(m), std::vector<std::string>{"0", "1"},
                          std::vector<std::string>{"m0", "m1", "m2"});
}

// Per-protocol channel parameters plus the per-value support probabilities
// (p_star, q_star) used by the standard unbiased frequency estimator.
struct AnalyticParams {
  double p;
  double q;
  double p_star;
  double q_star;
};

inline AnalyticParams analytic_params(const MechanismSpec& s) {
  const double e = std::exp(s.epsilon);
  switch (s.protocol) {
    case Protocol::GRR: {
      const double p = e / (e + s.k - 1), q = 1.0 / (e + s.k - 1);
      return {p, q, p, q};
    }
    case Protocol::SS: {
      const int w = *s.omega;
      const double p = w * e / (w * e + s.k - w);
      const double qs = (w - p) / static_cast<double>(s.k - 1);
      return {p, qs, p, qs};
    }
    case Protocol::BLH:
    case Protocol::OLH: {
      const int g = *s.g;
      const double p = e / (e + g - 1), q = 1.0 / (e + g - 1);
      return {p, q, p, 1.0 / g};
    }
    case Protocol::SUE:
    case Protocol::OUE:
    case Protocol::THE: {
      const auto [p, q] = bitwise_params(s.protocol, s.epsilon, s.theta);
      return {p, q, p, q};
    }
  }
  throw UnsupportedSpec("unreachable");
}

// Explicit channel for any spec, within the size cap.
inline ChannelMatrix build_channel(const MechanismSpec& s,
                                   std::size_t size_cap = kDefaultSizeCap) {
  switch (s.protocol) {
    case Protocol::GRR:
      return grr_channel(s.k, s.epsilon);
    case Protocol::SS:
      return ss_channel(s.k, s.epsilon, s.omega, size_cap);
    case Protocol::BLH:
    case Protocol::OLH:
      return lh_channel(s.k, *s.g, s.epsilon, size_cap);
    case Protocol::SUE:
    case Protocol::OUE:
    case Protocol::THE:
      return onehot_channel(s.protocol, s.k, s.epsilon, s.theta, size_cap);
  }
  throw UnsupportedSpec("unreachable");
}

}  // namespace ldpqif
