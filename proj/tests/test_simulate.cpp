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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>

#include "ldpqif/leakage.hpp"
#include "ldpqif/simulate.hpp"
#include "oracles.hpp"

using namespace ldpqif;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/ldpqif_test_" + name;
  std::ofstream out(path);
  out << body;
  return path;
}

std::string report_label(const Report& rep) {
  switch (rep.protocol) {
    case Protocol::GRR:
      return std::to_string(rep.value);
    case Protocol::SS: {
      std::string l = "{";
      for (std::size_t i = 0; i < rep.subset.size(); ++i) {
        if (i) l += ",";
        l += std::to_string(rep.subset[i]);
      }
      return l + "}";
    }
    case Protocol::SUE:
    case Protocol::OUE:
    case Protocol::THE: {
      std::string l;
      for (auto b : rep.bits) l += b ? '1' : '0';
      return l;
    }
    default:
      return "";
  }
}

}  // namespace

TEST_CASE("load_dataset: transactions format flattens and densifies") {
  const std::string path = write_temp("tx.txt", "1 2\n2\n3 1\n");
  const Dataset d = load_dataset(path, FileFormat::transactions);
  CHECK(d.domain_size == 3);
  CHECK(d.values.size() == 5);
  CHECK(d.mapping == std::vector<long long>{1, 2, 3});
  CHECK(d.values == std::vector<int>{0, 1, 1, 2, 0});
  const auto f = d.frequencies();
  CHECK(f[0] == doctest::Approx(0.4));
  CHECK(f[1] == doctest::Approx(0.4));
  CHECK(f[2] == doctest::Approx(0.2));
}

TEST_CASE("load_dataset: value_per_line format and its errors") {
  const std::string ok = write_temp("vpl.txt", "5\n7\n5\n");
  const Dataset d = load_dataset(ok, FileFormat::value_per_line);
  CHECK(d.domain_size == 2);
  CHECK(d.values == std::vector<int>{0, 1, 0});

  const std::string multi = write_temp("vpl_bad.txt", "5 7\n");
  CHECK_THROWS_AS(load_dataset(multi, FileFormat::value_per_line), ParseError);
  const std::string junk = write_temp("vpl_junk.txt", "5\nxyz\n");
  CHECK_THROWS_AS(load_dataset(junk, FileFormat::transactions), ParseError);
  CHECK_THROWS_AS(load_dataset("/tmp/ldpqif_does_not_exist", FileFormat::transactions),
                  ParseError);
  const std::string empty = write_temp("vpl_empty.txt", "\n\n");
  CHECK_THROWS_AS(load_dataset(empty, FileFormat::transactions), EmptyDataset);
}

TEST_CASE("load_dataset: top_n keeps the most frequent items") {
  const std::string path =
      write_temp("topn.txt", "9\n9\n9\n4\n4\n8\n8\n1\n");
  Remap remap{RemapKind::top_n, 2, 0};
  const Dataset d = load_dataset(path, FileFormat::value_per_line, remap);
  CHECK(d.domain_size == 2);
  // 9 has count 3; the tie between 4 and 8 goes to the smaller id
  CHECK(d.mapping == std::vector<long long>{9, 4});
  CHECK(d.values.size() == 5);
}

TEST_CASE("load_dataset: subsample is seed-deterministic") {
  const std::string path = write_temp("sub.txt", "1\n2\n3\n4\n5\n6\n7\n8\n");
  Remap remap{RemapKind::subsample, 5, 42};
  const Dataset a = load_dataset(path, FileFormat::value_per_line, remap);
  const Dataset b = load_dataset(path, FileFormat::value_per_line, remap);
  CHECK(a.values == b.values);
  CHECK(a.values.size() == 5);
  remap.seed = 43;
  const Dataset c = load_dataset(path, FileFormat::value_per_line, remap);
  CHECK(a.mapping != c.mapping);  // different draw, overwhelmingly likely
}

TEST_CASE("synth_dataset: determinism and distribution shape") {
  const Dataset a = synth_dataset(Dist::uniform(), 4, 1000, 7);
  const Dataset b = synth_dataset(Dist::uniform(), 4, 1000, 7);
  CHECK(a.values == b.values);
  CHECK(a.values != synth_dataset(Dist::uniform(), 4, 1000, 8).values);

  // uniform: each bucket within 4 sigma of n/k
  const Dataset u = synth_dataset(Dist::uniform(), 5, 50000, 11);
  const auto fu = u.frequencies();
  const double sigma = std::sqrt(0.2 * 0.8 / 50000);
  for (double f : fu) CHECK(std::abs(f - 0.2) < 4 * sigma);

  // zipf: frequencies strictly nonincreasing in rank at this sample size
  const Dataset z = synth_dataset(Dist::zipf(1.2), 6, 200000, 13);
  const auto fz = z.frequencies();
  for (std::size_t i = 1; i < fz.size(); ++i) CHECK(fz[i] <= fz[i - 1] + 0.01);
  CHECK(fz[0] > 2 * fz[1] * 0.8);  // head is heavy
}

TEST_CASE("perturb: GRR at epsilon 0 is uniform over the domain") {
  const MechanismSpec spec(Protocol::GRR, 4, 0.0);
  RngStream rng(1);
  std::vector<int> counts(4, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[perturb(spec, 2, rng).value];
  const double sigma = std::sqrt(0.25 * 0.75 * n);
  for (int c : counts) CHECK(std::abs(c - n / 4.0) < 4 * sigma);
}

TEST_CASE("perturb: SS includes the true value with probability p") {
  const MechanismSpec spec(Protocol::SS, 5, 1.5, 2);
  const AnalyticParams ap = analytic_params(spec);
  RngStream rng(2);
  const int n = 50000;
  int included = 0;
  for (int i = 0; i < n; ++i) {
    const Report rep = perturb(spec, 3, rng);
    REQUIRE(rep.subset.size() == 2);
    REQUIRE(std::is_sorted(rep.subset.begin(), rep.subset.end()));
    if (std::binary_search(rep.subset.begin(), rep.subset.end(), 3)) ++included;
  }
  const double sigma = std::sqrt(ap.p * (1 - ap.p) / n);
  CHECK(std::abs(included / static_cast<double>(n) - ap.p) < 3 * sigma);
}

TEST_CASE("perturb: THE Laplace path matches the Bernoulli marginals") {
  const MechanismSpec spec(Protocol::THE, 3, 2.0, std::nullopt, std::nullopt,
                           0.75);
  const AnalyticParams ap = analytic_params(spec);
  const int n = 60000;
  for (ThePath path : {ThePath::bernoulli, ThePath::laplace}) {
    RngStream rng(3);
    std::vector<int> set_counts(3, 0);
    for (int i = 0; i < n; ++i) {
      const Report rep = perturb(spec, 1, rng, path);
      for (int j = 0; j < 3; ++j) set_counts[j] += rep.bits[j];
    }
    for (int j = 0; j < 3; ++j) {
      const double want = j == 1 ? ap.p : ap.q;
      const double sigma = std::sqrt(want * (1 - want) / n);
      CHECK(std::abs(set_counts[j] / static_cast<double>(n) - want) <
            4 * sigma);
    }
  }
}

TEST_CASE("empirical report distribution matches the explicit channel row") {
  RngStream seed_src(99);
  const int n = 100000;
  std::vector<MechanismSpec> specs;
  specs.emplace_back(Protocol::GRR, 4, 1.0);
  specs.emplace_back(Protocol::SS, 4, 1.0, 2);
  specs.emplace_back(Protocol::SUE, 3, 1.0);
  specs.emplace_back(Protocol::OUE, 3, 1.0);
  specs.emplace_back(Protocol::THE, 3, 1.0, std::nullopt, std::nullopt, 0.75);
  for (const auto& spec : specs) {
    const ChannelMatrix chan = build_channel(spec);
    const int value = 1;
    std::map<std::string, int> counts;
    RngStream rng(seed_src.next_u64());
    for (int i = 0; i < n; ++i)
      ++counts[report_label(perturb(spec, value, rng))];
    double tv = 0.0;
    for (std::size_t y = 0; y < chan.cols(); ++y) {
      const auto it = counts.find(chan.output_labels()[y]);
      const double emp =
          it == counts.end() ? 0.0 : it->second / static_cast<double>(n);
      tv += std::abs(emp - chan.at(value, y));
    }
    CAPTURE(static_cast<int>(spec.protocol));
    CHECK(tv / 2 < 0.01);
  }
}

TEST_CASE("empirical LH report distribution matches the full-family channel") {
  const MechanismSpec spec(Protocol::BLH, 2, std::log(2.0));
  const ChannelMatrix chan = build_channel(spec);  // 2 x 8
  REQUIRE(chan.cols() == 8);
  const int n = 200000, value = 0;
  std::vector<int> counts(8, 0);
  RngStream rng(314);
  for (int i = 0; i < n; ++i) {
    const Report rep = perturb(spec, value, rng);
    // hash tuples enumerated with the last coordinate fastest
    const int hi = rep.hash.table[0] * 2 + rep.hash.table[1];
    ++counts[hi * 2 + rep.perturbed];
  }
  double tv = 0.0;
  for (int y = 0; y < 8; ++y)
    tv += std::abs(counts[y] / static_cast<double>(n) - chan.at(value, y));
  CHECK(tv / 2 < 0.01);
}

TEST_CASE("reconstruct on handmade reports") {
  RngStream rng(5);
  const MechanismSpec grr(Protocol::GRR, 4, 1.0);
  Report r1{Protocol::GRR, 4, 2, {}, {}, 0, {}};
  CHECK(reconstruct(grr, r1, rng) == 2);

  const MechanismSpec ss(Protocol::SS, 4, 1.0, 2);
  Report r2{Protocol::SS, 4, 0, {1, 3}, {}, 0, {}};
  for (int i = 0; i < 50; ++i) {
    const int guess = reconstruct(ss, r2, rng);
    CHECK((guess == 1 || guess == 3));
  }

  // LH singleton support: only value 2 hashes to the report
  const MechanismSpec blh(Protocol::BLH, 3, 1.0);
  Report r3{Protocol::BLH, 3, 0, {}, {2, true, {0, 0, 1}, 0}, 1, {}};
  CHECK(reconstruct(blh, r3, rng) == 2);

  // LH empty support: guess is uniform over the whole domain
  Report r4{Protocol::BLH, 3, 0, {}, {2, true, {0, 0, 0}, 0}, 1, {}};
  std::vector<int> seen(3, 0);
  for (int i = 0; i < 3000; ++i) ++seen[reconstruct(blh, r4, rng)];
  for (int c : seen) CHECK(c > 800);

  // bit vector: a set bit always wins (p/q > (1-p)/(1-q))
  const MechanismSpec sue(Protocol::SUE, 4, 2.0);
  Report r5{Protocol::SUE, 4, 0, {}, {}, 0, {0, 0, 1, 0}};
  CHECK(reconstruct(sue, r5, rng) == 2);

  Report bad{Protocol::GRR, 3, 0, {}, {}, 0, {}};
  CHECK_THROWS_AS(reconstruct(grr, bad, rng), ShapeMismatch);
}

TEST_CASE("empirical_asr agrees with the analytic ASR") {
  const Dataset data = synth_dataset(Dist::uniform(), 4, 100000, 21);
  for (const MechanismSpec& spec :
       {MechanismSpec(Protocol::GRR, 4, 1.0),
        MechanismSpec(Protocol::SUE, 4, 1.0),
        MechanismSpec(Protocol::OUE, 4, 1.0)}) {
    const AsrResult res = empirical_asr(spec, data, {spec, 4, 1234, 1});
    const double want = asr(build_channel(spec));
    CAPTURE(static_cast<int>(spec.protocol));
    const double slack = 3 * std::max(res.std_error, 1e-3);
    CHECK(std::abs(res.mean - want) < slack);
  }
}

TEST_CASE("empirical LH ASR rejects the prior-work value at (2,2,ln 2)") {
  const Dataset data = synth_dataset(Dist::uniform(), 2, 200000, 5);
  const MechanismSpec spec(Protocol::BLH, 2, std::log(2.0));
  const AsrResult res = empirical_asr(spec, data, {spec, 4, 99, 1});
  const double se = std::max(res.std_error, 1e-3);
  CHECK(std::abs(res.mean - 7.0 / 12) < 3 * se);
  CHECK(std::abs(res.mean - 2.0 / 3) > 5 * se);
}

TEST_CASE("simulation results are independent of the lane count") {
  const Dataset data = synth_dataset(Dist::zipf(1.1), 5, 2000, 17);
  const MechanismSpec spec(Protocol::OUE, 5, 1.0);
  const AsrResult one = empirical_asr(spec, data, {spec, 8, 777, 1});
  const AsrResult four = empirical_asr(spec, data, {spec, 8, 777, 4});
  CHECK(one.per_trial == four.per_trial);
  CHECK(one.mean == four.mean);

  const std::vector<MechanismSpec> specs{spec, MechanismSpec(Protocol::SUE, 5, 1.0)};
  const auto m1 = mse_experiment(specs, data, {spec, 6, 777, 1});
  const auto m4 = mse_experiment(specs, data, {spec, 6, 777, 4});
  REQUIRE(m1.size() == m4.size());
  for (std::size_t i = 0; i < m1.size(); ++i) {
    CHECK(m1[i].mean_mse == m4[i].mean_mse);
    CHECK(m1[i].variance == m4[i].variance);
  }
}

TEST_CASE("estimate_frequencies is consistent in the noiseless limit") {
  const Dataset data = synth_dataset(Dist::zipf(1.0), 4, 5000, 3);
  const MechanismSpec spec(Protocol::GRR, 4, 30.0);  // e^30: virtually no noise
  std::vector<Report> reports;
  RngStream rng(8);
  for (int v : data.values) reports.push_back(perturb(spec, v, rng));
  const auto f = estimate_frequencies(spec, reports);
  const auto truth = data.frequencies();
  for (int v = 0; v < 4; ++v) CHECK(f[v] == doctest::Approx(truth[v]).epsilon(1e-6));
}

TEST_CASE("estimate_frequencies is unbiased under real noise") {
  const Dataset data = synth_dataset(Dist::zipf(1.0), 5, 20000, 9);
  const auto truth = data.frequencies();
  for (const MechanismSpec& spec :
       {MechanismSpec(Protocol::SUE, 5, 1.0),
        MechanismSpec(Protocol::SS, 5, 1.0, 2),
        MechanismSpec(Protocol::OLH, 5, 1.0)}) {
    std::vector<double> acc(5, 0.0);
    const int trials = 30;
    for (int t = 0; t < trials; ++t) {
      RngStream rng = RngStream::derive(1000 + t, {0});
      std::vector<Report> reports;
      for (int v : data.values) reports.push_back(perturb(spec, v, rng));
      const auto f = estimate_frequencies(spec, reports);
      for (int v = 0; v < 5; ++v) acc[v] += f[v];
    }
    for (int v = 0; v < 5; ++v) {
      CAPTURE(static_cast<int>(spec.protocol));
      CHECK(acc[v] / trials == doctest::Approx(truth[v]).epsilon(0.15));
    }
  }
}

TEST_CASE("estimate_frequencies rejects the degenerate epsilon-0 estimator") {
  const MechanismSpec spec(Protocol::GRR, 3, 0.0);
  RngStream rng(4);
  std::vector<Report> reports{perturb(spec, 0, rng)};
  CHECK_THROWS_AS(estimate_frequencies(spec, reports), DegenerateEstimator);
  CHECK_THROWS_AS(
      estimate_frequencies(MechanismSpec(Protocol::GRR, 3, 1.0), {}),
      EmptyDataset);
}

TEST_CASE("simplex projection returns a distribution dominated pointwise") {
  const MechanismSpec spec(Protocol::OUE, 6, 0.5);
  const Dataset data = synth_dataset(Dist::zipf(1.5), 6, 500, 77);
  RngStream rng(6);
  std::vector<Report> reports;
  for (int v : data.values) reports.push_back(perturb(spec, v, rng));
  const auto f = estimate_frequencies(spec, reports, true);
  double sum = 0.0;
  for (double x : f) {
    CHECK(x >= 0.0);
    sum += x;
  }
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("MSE decreases when the user count doubles") {
  const MechanismSpec spec(Protocol::SUE, 8, 1.0);
  const Dataset small = synth_dataset(Dist::zipf(1.0), 8, 4000, 12);
  const Dataset big = synth_dataset(Dist::zipf(1.0), 8, 8000, 12);
  const auto ms = mse_experiment({spec}, small, {spec, 30, 2023, 2});
  const auto mb = mse_experiment({spec}, big, {spec, 30, 2023, 2});
  // estimation error dominates the floor here, so the ratio is near 2
  CHECK(ms[0].mean_mse / mb[0].mean_mse > 1.5);
  CHECK(ms[0].mean_mse / mb[0].mean_mse < 2.7);
}

TEST_CASE("MSE has a floor set by the dataset, not the mechanism, at huge epsilon") {
  const MechanismSpec spec(Protocol::GRR, 4, 30.0);
  const Dataset data = synth_dataset(Dist::zipf(1.0), 4, 3000, 14);
  const auto rows = mse_experiment({spec}, data, {spec, 5, 1, 1});
  CHECK(rows[0].mean_mse < 1e-12);  // the estimate recovers the data exactly
}
