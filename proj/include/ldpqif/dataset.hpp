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
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ldpqif/errors.hpp"
#include "ldpqif/rng.hpp"

namespace ldpqif {

enum class Provenance { file, synthetic };

struct Dataset {
  int domain_size = 0;
  std::vector<int> values;  // each in [0, domain_size)
  Provenance provenance = Provenance::synthetic;
  std::string source;
  // original item id for each dense index; empty for synthetic data
  std::vector<long long> mapping;

  std::vector<double> frequencies() const {
    if (values.empty()) throw EmptyDataset("dataset has no values");
    std::vector<double> f(domain_size, 0.0);
    for (int v : values) f[v] += 1.0;
    for (double& x : f) x /= static_cast<double>(values.size());
    return f;
  }
};

enum class FileFormat { transactions, value_per_line };

enum class RemapKind { identity, top_n, subsample };

struct Remap {
  RemapKind kind = RemapKind::identity;
  int n = 0;                // top_n: item budget; subsample: draw count
  std::uint64_t seed = 0;   // subsample only
};

namespace detail {

inline std::vector<long long> parse_value_file(const std::string& path,
                                               FileFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  std::vector<long long> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    long long v;
    std::size_t on_line = 0;
    while (ls >> v) {
      raw.push_back(v);
      ++on_line;
    }
    if (!ls.eof()) throw ParseError("non-integer token", lineno);
    if (format == FileFormat::value_per_line && on_line > 1)
      throw ParseError("expected one value per line", lineno);
  }
  return raw;
}

// Dense remap: distinct ids sorted ascending become indices 0..k-1.
inline Dataset densify(std::vector<long long> raw, std::string source) {
  std::map<long long, int> index;
  for (long long v : raw) index.emplace(v, 0);
  Dataset d;
  d.provenance = Provenance::file;
  d.source = std::move(source);
  d.mapping.reserve(index.size());
  for (auto& [id, idx] : index) {
    idx = static_cast<int>(d.mapping.size());
    d.mapping.push_back(id);
  }
  d.domain_size = static_cast<int>(d.mapping.size());
  d.values.reserve(raw.size());
  for (long long v : raw) d.values.push_back(index[v]);
  return d;
}

}  // namespace detail

// Load a click-stream style file. `transactions` treats each line as a
// whitespace-separated item list and flattens it; `value_per_line` expects
// one integer per line. Items are remapped to a dense domain [k]; top_n
// keeps only the n most frequent items (indices ordered by descending
// count, ties to the smaller id) and subsample draws n values independently
// and uniformly from the flattened list.
inline Dataset load_dataset(const std::string& path, FileFormat format,
                            Remap remap = {}) {
  std::vector<long long> raw = detail::parse_value_file(path, format);
  if (raw.empty()) throw EmptyDataset(path + " contains no values");

  if (remap.kind == RemapKind::subsample) {
    if (remap.n < 1) throw ValueOutOfRange("subsample size must be >= 1");
    RngStream rng = RngStream::derive(remap.seed, {1});
    std::vector<long long> picked;
    picked.reserve(remap.n);
    for (int i = 0; i < remap.n; ++i)
      picked.push_back(raw[rng.next_below(raw.size())]);
    raw = std::move(picked);
  }

  if (remap.kind == RemapKind::top_n) {
    if (remap.n < 1) throw ValueOutOfRange("top_n budget must be >= 1");
    std::map<long long, std::size_t> counts;
    for (long long v : raw) ++counts[v];
    std::vector<std::pair<long long, std::size_t>> ranked(counts.begin(),
                                                          counts.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) {
                       if (a.second != b.second) return a.second > b.second;
                       return a.first < b.first;
                     });
    if (ranked.size() > static_cast<std::size_t>(remap.n))
      ranked.resize(remap.n);
    std::map<long long, int> index;
    Dataset d;
    d.provenance = Provenance::file;
    d.source = path;
    for (const auto& [id, cnt] : ranked) {
      index.emplace(id, static_cast<int>(d.mapping.size()));
      d.mapping.push_back(id);
    }
    d.domain_size = static_cast<int>(d.mapping.size());
    for (long long v : raw) {
      auto it = index.find(v);
      if (it != index.end()) d.values.push_back(it->second);
    }
    if (d.values.empty()) throw EmptyDataset("top_n kept no values");
    return d;
  }

  return detail::densify(std::move(raw), path);
}

struct Dist {
  enum class Kind { uniform, zipf } kind = Kind::uniform;
  double s = 1.0;  // zipf exponent

  static Dist uniform() { return {Kind::uniform, 0.0}; }
  static Dist zipf(double s) { return {Kind::zipf, s}; }
};

// Synthetic dataset: n i.i.d. draws, deterministic in the seed.
inline Dataset synth_dataset(Dist dist, int k, int n, std::uint64_t seed) {
  if (k < 2) throw InvalidDomainSize("synthetic domain needs k >= 2");
  if (n < 1) throw ValueOutOfRange("need at least one draw");
  Dataset d;
  d.domain_size = k;
  d.provenance = Provenance::synthetic;
  d.source = dist.kind == Dist::Kind::uniform
                 ? "uniform"
                 : "zipf(s=" + std::to_string(dist.s) + ")";
  d.values.reserve(n);
  RngStream rng = RngStream::derive(seed, {0});
  if (dist.kind == Dist::Kind::uniform) {
    for (int i = 0; i < n; ++i)
      d.values.push_back(static_cast<int>(rng.next_below(k)));
  } else {
    std::vector<double> cdf(k);
    double acc = 0.0;
    for (int r = 0; r < k; ++r) {
      acc += std::pow(static_cast<double>(r + 1), -dist.s);
      cdf[r] = acc;
    }
    for (double& c : cdf) c /= acc;
    for (int i = 0; i < n; ++i) {
      const double u = rng.next_double();
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
      d.values.push_back(static_cast<int>(it - cdf.begin()));
    }
  }
  return d;
}

}  // namespace ldpqif
