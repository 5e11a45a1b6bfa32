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
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ldpqif/errors.hpp"
#include "ldpqif/matrix.hpp"

namespace ldpqif {

// Tolerance for stochasticity checks. Row residuals at or below this are
// treated as float round-off and renormalized away; anything larger is a
// construction bug and rejected.
inline constexpr double kStochasticTol = 1e-9;

// Default cap on rows*cols for explicitly materialized channels.
inline constexpr std::size_t kDefaultSizeCap = std::size_t{1} << 22;

// Row-stochastic channel matrix with labeled input/output domains.
// Immutable after construction; construct through validate_channel or the
// mechanism builders.
class ChannelMatrix {
 public:
  std::size_t rows() const { return row_count(entries_); }
  std::size_t cols() const { return col_count(entries_); }
  const Mat<double>& entries() const { return entries_; }
  double at(std::size_t i, std::size_t j) const { return entries_[i][j]; }
  const std::vector<std::string>& input_labels() const { return in_labels_; }
  const std::vector<std::string>& output_labels() const { return out_labels_; }

  friend ChannelMatrix validate_channel(Mat<double> raw,
                                        std::optional<std::vector<std::string>> in,
                                        std::optional<std::vector<std::string>> out);

 private:
  ChannelMatrix(Mat<double> e, std::vector<std::string> in,
                std::vector<std::string> out)
      : entries_(std::move(e)),
        in_labels_(std::move(in)),
        out_labels_(std::move(out)) {}

  Mat<double> entries_;
  std::vector<std::string> in_labels_;
  std::vector<std::string> out_labels_;
};

inline std::vector<std::string> default_labels(const char* prefix,
                                               std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(prefix + std::to_string(i));
  return out;
}

// Validates entries and row sums against kStochasticTol, then renormalizes
// each row exactly to 1.
inline ChannelMatrix validate_channel(
    Mat<double> raw, std::optional<std::vector<std::string>> in = std::nullopt,
    std::optional<std::vector<std::string>> out = std::nullopt) {
  if (raw.empty() || raw.front().empty())
    throw DimensionMismatch("channel must be non-empty");
  if (!rectangular(raw))
    throw DimensionMismatch("channel matrix must be rectangular");
  const std::size_t n = row_count(raw), m = col_count(raw);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (double v : raw[i]) {
      if (v < -kStochasticTol)
        throw NegativeEntry("negative entry in row " + std::to_string(i));
      if (v > 1.0 + kStochasticTol)
        throw NegativeEntry("entry above 1 in row " + std::to_string(i));
      sum += v;
    }
    if (std::abs(sum - 1.0) > kStochasticTol)
      throw NonStochasticRow(i, sum - 1.0);
    for (double& v : raw[i]) {
      if (v < 0.0) v = 0.0;
      v /= sum;
    }
  }
  std::vector<std::string> in_l = in ? std::move(*in) : default_labels("x", n);
  std::vector<std::string> out_l =
      out ? std::move(*out) : default_labels("y", m);
  if (in_l.size() != n || out_l.size() != m)
    throw DimensionMismatch("label list lengths must match dimensions");
  return ChannelMatrix(std::move(raw), std::move(in_l), std::move(out_l));
}

// Prior distribution over the input domain.
class Prior {
 public:
  explicit Prior(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw DimensionMismatch("prior must be non-empty");
    double sum = 0.0;
    for (double v : w_) {
      if (v < -kStochasticTol) throw NegativeEntry("negative prior weight");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kStochasticTol)
      throw NonStochasticRow(0, sum - 1.0);
    for (double& v : w_) {
      if (v < 0.0) v = 0.0;
      v /= sum;
    }
  }

  static Prior uniform(std::size_t k) {
    return Prior(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }
  static Prior point(std::size_t k, std::size_t at) {
    std::vector<double> w(k, 0.0);
    w.at(at) = 1.0;
    return Prior(std::move(w));
  }

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& weights() const { return w_; }

 private:
  std::vector<double> w_;
};

// Gain function g(w, x): rows index adversary actions, columns secrets.
class GainFunction {
 public:
  explicit GainFunction(Mat<double> gains) : g_(std::move(gains)) {
    if (g_.empty() || g_.front().empty())
      throw DimensionMismatch("gain function needs at least one action");
    if (!rectangular(g_))
      throw DimensionMismatch("gain matrix must be rectangular");
    for (const auto& row : g_)
      for (double v : row)
        if (!std::isfinite(v)) throw NegativeEntry("non-finite gain entry");
  }

  // One-try guessing gain: g(w, x) = 1 iff w = x.
  static GainFunction bayes(std::size_t k) {
    return GainFunction(identity_matrix<double>(k));
  }

  std::size_t actions() const { return row_count(g_); }
  std::size_t secrets() const { return col_count(g_); }
  double at(std::size_t w, std::size_t x) const { return g_[w][x]; }

 private:
  Mat<double> g_;
};

// Hyper-distribution: outer distribution on realized outputs plus one
// posterior over inputs per realized output. Zero-probability outputs are
// dropped.
struct Hyper {
  std::vector<double> outer;
  Mat<double> posteriors;               // posteriors[i] is a distribution on X
  std::vector<std::string> output_labels;  // labels of the retained outputs
};

inline ChannelMatrix cascade(const ChannelMatrix& a, const ChannelMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionMismatch("cascade: A.cols must equal B.rows");
  return validate_channel(matmul(a.entries(), b.entries()),
                          a.input_labels(), b.output_labels());
}

// k-fold Kronecker power. Composite labels are concatenations of the base
// labels; for a bitwise base this yields bit strings ordered
// lexicographically, most-significant bit first.
inline ChannelMatrix kronecker_power(const ChannelMatrix& b, std::size_t k,
                                     std::size_t size_cap = kDefaultSizeCap) {
  if (k < 1) throw DimensionMismatch("kronecker_power requires k >= 1");
  double total = 1.0;
  for (std::size_t i = 0; i < k; ++i)
    total *= static_cast<double>(b.rows()) * static_cast<double>(b.cols());
  if (total > static_cast<double>(size_cap))
    throw SizeCapExceeded("kronecker power of " + std::to_string(b.rows()) +
                          "x" + std::to_string(b.cols()) + " channel at k=" +
                          std::to_string(k) + " exceeds size cap");
  Mat<double> m = b.entries();
  std::vector<std::string> in = b.input_labels(), out = b.output_labels();
  for (std::size_t i = 1; i < k; ++i) {
    m = kron(m, b.entries());
    std::vector<std::string> in2, out2;
    in2.reserve(in.size() * b.rows());
    out2.reserve(out.size() * b.cols());
    for (const auto& a : in)
      for (const auto& c : b.input_labels()) in2.push_back(a + c);
    for (const auto& a : out)
      for (const auto& c : b.output_labels()) out2.push_back(a + c);
    in = std::move(in2);
    out = std::move(out2);
  }
  return validate_channel(std::move(m), std::move(in), std::move(out));
}

// Keeps only the rows of a 2^k-row channel whose input is a one-hot bit
// vector. Row order: one-hot position 1 (vector 10...0) first, descending
// to position k (vector 0...01).
inline ChannelMatrix restrict_to_one_hot(const ChannelMatrix& c) {
  std::size_t n = c.rows(), k = 0;
  while (n > 1 && n % 2 == 0) {
    n /= 2;
    ++k;
  }
  if (n != 1 || k < 2)
    throw NotPowerOfTwoRows("one-hot restriction needs 2^k rows, k >= 2");
  Mat<double> out;
  std::vector<std::string> labels;
  out.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t idx = std::size_t{1} << (k - 1 - r);
    out.push_back(c.entries()[idx]);
    labels.push_back(c.input_labels()[idx]);
  }
  return validate_channel(std::move(out), std::move(labels),
                          c.output_labels());
}

inline Hyper posterior_hyper(const Prior& prior, const ChannelMatrix& c) {
  if (prior.size() != c.rows())
    throw DimensionMismatch("prior length must equal channel rows");
  Hyper h;
  for (std::size_t y = 0; y < c.cols(); ++y) {
    double marginal = 0.0;
    for (std::size_t x = 0; x < c.rows(); ++x)
      marginal += prior[x] * c.at(x, y);
    if (marginal == 0.0) continue;
    std::vector<double> post(c.rows());
    for (std::size_t x = 0; x < c.rows(); ++x)
      post[x] = prior[x] * c.at(x, y) / marginal;
    h.outer.push_back(marginal);
    h.posteriors.push_back(std::move(post));
    h.output_labels.push_back(c.output_labels()[y]);
  }
  return h;
}

// ---- Serialization ----

inline nlohmann::json channel_to_json(const ChannelMatrix& c) {
  return nlohmann::json{{"input_labels", c.input_labels()},
                        {"output_labels", c.output_labels()},
                        {"entries", c.entries()}};
}

inline ChannelMatrix channel_from_json(const nlohmann::json& j) {
  return validate_channel(j.at("entries").get<Mat<double>>(),
                          j.at("input_labels").get<std::vector<std::string>>(),
                          j.at("output_labels").get<std::vector<std::string>>());
}

inline std::string format_double_17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Labels may contain commas (subset labels do), so they are quoted in the
// RFC-4180 style when needed.
inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

// CSV: header row = output labels, first column = input labels, entries with
// 17 significant digits.
inline std::string channel_to_csv(const ChannelMatrix& c) {
  std::ostringstream os;
  os << "input";
  for (const auto& l : c.output_labels()) os << ',' << csv_quote(l);
  os << '\n';
  for (std::size_t i = 0; i < c.rows(); ++i) {
    os << csv_quote(c.input_labels()[i]);
    for (std::size_t j = 0; j < c.cols(); ++j)
      os << ',' << format_double_17(c.at(i, j));
    os << '\n';
  }
  return os.str();
}

inline ChannelMatrix channel_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty channel CSV", 0);
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char ch = s[i];
      if (quoted) {
        if (ch == '"') {
          if (i + 1 < s.size() && s[i + 1] == '"') {
            cur.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          cur.push_back(ch);
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur.push_back(ch);
      }
    }
    out.push_back(cur);
    return out;
  };
  auto header = split(line);
  if (header.size() < 2) throw ParseError("channel CSV header too short", 1);
  std::vector<std::string> out_labels(header.begin() + 1, header.end());
  std::vector<std::string> in_labels;
  Mat<double> entries;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != out_labels.size() + 1)
      throw ParseError("wrong number of cells", lineno);
    in_labels.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t j = 1; j < cells.size(); ++j) {
      try {
        row.push_back(std::stod(cells[j]));
      } catch (const std::exception&) {
        throw ParseError("bad float '" + cells[j] + "'", lineno);
      }
    }
    entries.push_back(std::move(row));
  }
  return validate_channel(std::move(entries), std::move(in_labels),
                          std::move(out_labels));
}

}  // namespace ldpqif
