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

// Batch front-end: capacity and ASR sweeps, refinement verdicts, trade-off
// exports, family checks, and simulation experiments, all emitted as CSV or
// JSON data files. Exit codes: 0 success, 2 usage/config error, 3
// computation failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldpqif/channel.hpp"
#include "ldpqif/dataset.hpp"
#include "ldpqif/leakage.hpp"
#include "ldpqif/mechanisms.hpp"
#include "ldpqif/refinement.hpp"
#include "ldpqif/simulate.hpp"

namespace {

using nlohmann::json;
using namespace ldpqif;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;

// Raised for problems that are the caller's fault (bad flags or config
// files) as opposed to failures inside a computation.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("cannot parse number '" + tok + "'");
    }
  }
  return out;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_doubles(s)) out.push_back(static_cast<int>(v));
  return out;
}

std::vector<Protocol> parse_protocols(const std::string& s) {
  std::vector<Protocol> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(protocol_from_name(tok));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

// All file outputs go through a temp-file rename so a failed run never
// leaves a partial data file behind.
void atomic_write(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("cannot rename " + tmp + " to " + path);
}

std::string fmt(double v) { return format_double_17(v); }

// Minimal dependency-free SVG line chart; one polyline per series.
struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

std::string svg_chart(const std::vector<Series>& series,
                      const std::string& x_label,
                      const std::string& y_label) {
  const double w = 640, h = 400, pad = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto sx = [&](double x) { return pad + (x - xmin) / (xmax - xmin) * (w - 2 * pad); };
  auto sy = [&](double y) { return h - pad - (y - ymin) / (ymax - ymin) * (h - 2 * pad); };
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                 "#9467bd", "#8c564b", "#e377c2"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
     << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad
     << "\" y2=\"" << h - pad << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad
     << "\" y2=\"" << h - pad << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 10
     << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  os << "<text x=\"15\" y=\"" << h / 2
     << "\" font-size=\"12\" transform=\"rotate(-90 15 " << h / 2 << ")\">"
     << y_label << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[i % 7]
       << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : series[i].points) os << sx(x) << ',' << sy(y) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << w - pad + 4 << "\" y=\"" << 20 + 14 * i
       << "\" font-size=\"11\" fill=\"" << colors[i % 7] << "\">"
       << series[i].name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  bool exact = false;
  bool svg = false;
  int lanes = 1;
};

std::string opt_field(const std::optional<int>& v) {
  return v ? std::to_string(*v) : "";
}

MechanismSpec spec_for(Protocol p, int k, double eps,
                       std::optional<double> theta, std::optional<int> g_blh) {
  std::optional<int> g;
  if (p == Protocol::BLH && g_blh) g = g_blh;
  std::optional<double> th;
  if (p == Protocol::THE) th = theta;
  return MechanismSpec(p, k, eps, std::nullopt, g, th);
}

// ---- capacity ----

int cmd_capacity(const GlobalOpts& go, int k, const std::string& protocols,
                 const std::string& epsilons, double theta) {
  const auto protos = parse_protocols(protocols);
  const auto eps = parse_doubles(epsilons);
  if (protos.empty()) throw ConfigError("empty protocol list");
  if (eps.empty()) throw ConfigError("empty epsilon grid");

  std::ostringstream csv;
  csv << "# ldpqif-csv v1 capacity\n";
  csv << "protocol,k,epsilon,theta,g,omega,capacity_closed,capacity_explicit,"
         "epsilon_of\n";
  json rows = json::array();
  std::vector<Series> series;
  for (Protocol p : protos) {
    Series s{protocol_name(p), {}};
    for (double e : eps) {
      const MechanismSpec spec = spec_for(p, k, e, theta, 2);
      const double closed = bayes_capacity_closed(spec);
      std::optional<double> explicit_cap, eps_of;
      try {
        const ChannelMatrix c = build_channel(spec);
        explicit_cap = bayes_capacity(c);
        eps_of = epsilon_of(c);
      } catch (const SizeCapExceeded&) {
        // closed form only for oversized channels
      }
      csv << protocol_name(p) << ',' << k << ',' << fmt(e) << ','
          << (spec.theta ? fmt(*spec.theta) : "") << ',' << opt_field(spec.g)
          << ',' << opt_field(spec.omega) << ',' << fmt(closed) << ','
          << (explicit_cap ? fmt(*explicit_cap) : "") << ','
          << (eps_of ? fmt(*eps_of) : "") << '\n';
      json r{{"protocol", protocol_name(p)}, {"k", k},      {"epsilon", e},
             {"capacity_closed", closed}};
      if (spec.theta) r["theta"] = *spec.theta;
      if (spec.g) r["g"] = *spec.g;
      if (spec.omega) r["omega"] = *spec.omega;
      if (explicit_cap) r["capacity_explicit"] = *explicit_cap;
      if (eps_of) r["epsilon_of"] = *eps_of;
      rows.push_back(std::move(r));
      s.points.emplace_back(e, closed);
    }
    series.push_back(std::move(s));
  }
  atomic_write(go.out, go.format == "json" ? rows.dump(2) + "\n" : csv.str());
  if (go.svg && !go.out.empty())
    atomic_write(go.out + ".svg",
                 svg_chart(series, "epsilon", "Bayes capacity"));
  return kExitOk;
}

// ---- asr-lh-compare ----

int cmd_asr_lh_compare(const GlobalOpts& go, const std::string& k_grid,
                       const std::string& epsilons, int g, int trials,
                       int users) {
  const auto ks = parse_ints(k_grid);
  const auto eps = parse_doubles(epsilons);
  if (ks.empty() || eps.empty()) throw ConfigError("empty sweep grid");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (users < 1) throw ConfigError("users must be >= 1");
  if (g < 2) throw ConfigError("g must be >= 2");

  std::ostringstream csv;
  csv << "# ldpqif-csv v1 asr-lh-compare\n";
  csv << "k,epsilon,g,users,trials,seed,asr_closed,asr_prior_work,"
         "asr_empirical,std_error\n";
  json rows = json::array();
  std::vector<Series> closed_s{{"closed", {}}, {"prior_work", {}},
                               {"empirical", {}}};
  for (int k : ks)
    for (double e : eps) {
      const MechanismSpec spec =
          g == 2 ? MechanismSpec(Protocol::BLH, k, e)
                 : MechanismSpec(Protocol::OLH, k, e, std::nullopt, g);
      const Dataset data = synth_dataset(
          Dist::uniform(), k, users, mix64(go.seed ^ static_cast<std::uint64_t>(k)));
      const TrialConfig cfg{spec, trials, go.seed, go.lanes};
      const AsrResult r = empirical_asr(spec, data, cfg);
      const double closed = lh_asr_closed(k, g, e);
      const double prior = lh_asr_prior_work(k, g, e);
      csv << k << ',' << fmt(e) << ',' << g << ',' << users << ',' << trials
          << ',' << go.seed << ',' << fmt(closed) << ',' << fmt(prior) << ','
          << fmt(r.mean) << ',' << fmt(r.std_error) << '\n';
      rows.push_back(json{{"k", k},
                          {"epsilon", e},
                          {"g", g},
                          {"users", users},
                          {"trials", trials},
                          {"seed", go.seed},
                          {"asr_closed", closed},
                          {"asr_prior_work", prior},
                          {"asr_empirical", r.mean},
                          {"std_error", r.std_error}});
      closed_s[0].points.emplace_back(k, closed);
      closed_s[1].points.emplace_back(k, prior);
      closed_s[2].points.emplace_back(k, r.mean);
    }
  atomic_write(go.out, go.format == "json" ? rows.dump(2) + "\n" : csv.str());
  if (go.svg && !go.out.empty())
    atomic_write(go.out + ".svg", svg_chart(closed_s, "k", "ASR"));
  return kExitOk;
}

// ---- refine ----

// A side of a refinement query: either a channel file
// ({input_labels, output_labels, entries}) or a mechanism spec
// ({protocol, k, epsilon, ...}); specs of bitwise protocols take an
// optional "form": "bitwise" | "onehot" (default onehot).
ChannelMatrix load_side(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad JSON in ") + path + ": " + e.what());
  }
  if (j.contains("entries")) return channel_from_json(j);
  if (!j.contains("protocol"))
    throw ConfigError(path + ": neither a channel nor a mechanism spec");
  const std::string form = j.value("form", "onehot");
  json spec_json = j;
  spec_json.erase("form");
  const MechanismSpec spec = spec_from_json(spec_json);
  if (form == "bitwise") {
    if (!is_bitwise(spec.protocol))
      throw ConfigError("form=bitwise needs SUE, OUE, or THE");
    return bitwise(spec.protocol, spec.epsilon, spec.theta);
  }
  return build_channel(spec);
}

int cmd_refine(const GlobalOpts& go, const std::string& left,
               const std::string& right, const std::string& mode) {
  const ChannelMatrix b = load_side(left), a = load_side(right);
  const bool both_2x2 =
      b.rows() == 2 && b.cols() == 2 && a.rows() == 2 && a.cols() == 2;
  RefinementVerdict v{false, std::nullopt, 0.0, RefineMethod::lp_witness};
  if (mode == "tradeoff" || (mode == "auto" && both_2x2 && !go.exact)) {
    if (!both_2x2) throw ConfigError("tradeoff mode needs two 2x2 channels");
    v = refines_2x2(b, a);
  } else {
    v = refines_lp(b, a, kRefineTol, go.exact);
  }
  atomic_write(go.out, verdict_to_json(v).dump(2) + "\n");
  return kExitOk;
}

// ---- tradeoff-export ----

int cmd_tradeoff_export(const GlobalOpts& go, const std::string& protocols,
                        const std::string& epsilons,
                        const std::string& thetas) {
  const auto protos = parse_protocols(protocols);
  const auto eps = parse_doubles(epsilons);
  const auto ths = parse_doubles(thetas);
  if (protos.empty() || eps.empty()) throw ConfigError("empty sweep grid");

  std::ostringstream csv;
  csv << "# ldpqif-csv v1 tradeoff-export\n";
  csv << "protocol,epsilon,theta,point_index,alpha,beta\n";
  json rows = json::array();
  for (Protocol p : protos) {
    if (!is_bitwise(p))
      throw ConfigError("tradeoff-export covers SUE, OUE, THE only");
    const std::vector<double> local_ths =
        p == Protocol::THE ? ths : std::vector<double>{0.0};
    if (p == Protocol::THE && ths.empty())
      throw ConfigError("THE needs a theta grid");
    for (double e : eps)
      for (double th : local_ths) {
        std::optional<double> theta;
        if (p == Protocol::THE) theta = th;
        const TradeoffFunction t =
            TradeoffFunction::from_point(tradeoff_point(bitwise(p, e, theta)));
        for (std::size_t i = 0; i < t.breakpoints.size(); ++i) {
          csv << protocol_name(p) << ',' << fmt(e) << ','
              << (theta ? fmt(*theta) : "") << ',' << i << ','
              << fmt(t.breakpoints[i].first) << ','
              << fmt(t.breakpoints[i].second) << '\n';
          json r{{"protocol", protocol_name(p)},
                 {"epsilon", e},
                 {"point_index", i},
                 {"alpha", t.breakpoints[i].first},
                 {"beta", t.breakpoints[i].second}};
          if (theta) r["theta"] = *theta;
          rows.push_back(std::move(r));
        }
      }
  }
  atomic_write(go.out, go.format == "json" ? rows.dump(2) + "\n" : csv.str());
  return kExitOk;
}

// ---- family-check ----

int cmd_family_check(const GlobalOpts& go, const std::string& family, int k,
                     double theta, bool one_hot, const std::string& epsilons) {
  const auto eps = parse_doubles(epsilons);
  Protocol p;
  try {
    p = protocol_from_name(family);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  FamilySpec fam{p, k, std::nullopt, one_hot};
  if (p == Protocol::THE) fam.theta = theta;
  FamilyReport rep;
  try {
    rep = verify_refinement_family(fam, eps);
  } catch (const AscendingGridRequired& e) {
    throw ConfigError(e.what());
  } catch (const UnsupportedSpec& e) {
    throw ConfigError(e.what());
  }
  if (go.format == "json") {
    json rows = json::array();
    for (const auto& pr : rep.pairs)
      rows.push_back(json{{"epsilon_low", pr.epsilon_low},
                          {"epsilon_high", pr.epsilon_high},
                          {"holds", pr.holds},
                          {"residual", pr.residual}});
    atomic_write(go.out,
                 json{{"family", protocol_name(p)},
                      {"all_hold", rep.all_hold},
                      {"pairs", rows}}
                         .dump(2) +
                     "\n");
  } else {
    atomic_write(go.out,
                 "# ldpqif-csv v1 family-check\n" + family_report_to_csv(rep));
  }
  return kExitOk;
}

// ---- simulate ----

Dataset dataset_from_config(const json& cfg, std::uint64_t seed) {
  if (cfg.contains("synthetic")) {
    const json& s = cfg.at("synthetic");
    const std::string dist = s.value("dist", "uniform");
    const Dist d = dist == "zipf" ? Dist::zipf(s.value("s", 1.0))
                                  : Dist::uniform();
    return synth_dataset(d, s.at("k").get<int>(), s.at("n").get<int>(),
                         s.value("seed", seed));
  }
  if (!cfg.contains("dataset") || !cfg.at("dataset").contains("path"))
    throw ConfigError("config needs a dataset path or a synthetic block");
  const json& ds = cfg.at("dataset");
  const std::string fmt_name = ds.value("format", "transactions");
  const FileFormat ff = fmt_name == "value_per_line"
                            ? FileFormat::value_per_line
                            : FileFormat::transactions;
  Remap remap;
  if (ds.contains("remap")) {
    const json& r = ds.at("remap");
    const std::string kind = r.value("kind", "identity");
    if (kind == "top_n") remap = {RemapKind::top_n, r.at("n").get<int>(), 0};
    else if (kind == "subsample")
      remap = {RemapKind::subsample, r.at("n").get<int>(),
               r.value("seed", seed)};
  }
  try {
    return load_dataset(ds.at("path").get<std::string>(), ff, remap);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  } catch (const EmptyDataset& e) {
    throw ConfigError(e.what());
  }
}

int cmd_simulate(const GlobalOpts& go, const std::string& config_path,
                 bool seed_flag_given) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open " + config_path);
  json cfg;
  try {
    in >> cfg;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad JSON config: ") + e.what());
  }

  const std::string metric = cfg.value("metric", "asr");
  if (metric != "asr" && metric != "mse")
    throw ConfigError("metric must be asr or mse");
  // flags win over config values
  const std::uint64_t seed =
      seed_flag_given ? go.seed : cfg.value("seed", go.seed);
  const int trials = cfg.value("trials", 50);
  if (trials < 1) throw ConfigError("trials must be >= 1");

  const Dataset data = dataset_from_config(cfg, seed);
  const int k = data.domain_size;

  std::vector<MechanismSpec> specs;
  std::vector<double> thresholds;
  if (cfg.contains("specs")) {
    for (const json& sj : cfg.at("specs")) {
      try {
        specs.push_back(spec_from_json(sj));
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
      thresholds.push_back(theta_threshold(specs.back().epsilon));
    }
  } else {
    if (!cfg.contains("protocols") || !cfg.contains("epsilon_grid"))
      throw ConfigError("config needs specs, or protocols + epsilon_grid");
    std::vector<double> theta_grid;
    if (cfg.contains("theta_grid"))
      theta_grid = cfg.at("theta_grid").get<std::vector<double>>();
    for (const json& pn : cfg.at("protocols")) {
      Protocol p;
      try {
        p = protocol_from_name(pn.get<std::string>());
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
      for (double e : cfg.at("epsilon_grid").get<std::vector<double>>()) {
        if (p == Protocol::THE) {
          if (theta_grid.empty())
            throw ConfigError("THE sweep needs theta_grid");
          for (double th : theta_grid) {
            specs.push_back(spec_for(p, k, e, th, 2));
            thresholds.push_back(theta_threshold(e));
          }
        } else {
          specs.push_back(spec_for(p, k, e, std::nullopt, 2));
          thresholds.push_back(theta_threshold(e));
        }
      }
    }
  }
  for (const auto& s : specs)
    if (s.k != k) throw ConfigError("spec k does not match dataset domain");

  std::ostringstream csv;
  csv << "# ldpqif-csv v1 simulate-" << metric << "\n";
  csv << "protocol,k,epsilon,theta,g,omega,n,trials,seed,metric,mean,std,"
         "theta_threshold\n";
  json rows = json::array();
  std::vector<std::pair<double, double>> stats(specs.size());
  if (metric == "asr") {
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const TrialConfig tc{specs[i], trials, seed, go.lanes};
      const AsrResult r = empirical_asr(specs[i], data, tc);
      stats[i] = {r.mean, r.std_error};
    }
  } else {
    const TrialConfig tc{specs.front(), trials, seed, go.lanes};
    const auto table = mse_experiment(specs, data, tc);
    for (std::size_t i = 0; i < table.size(); ++i)
      stats[i] = {table[i].mean_mse, std::sqrt(table[i].variance)};
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const MechanismSpec& s = specs[i];
    csv << protocol_name(s.protocol) << ',' << s.k << ',' << fmt(s.epsilon)
        << ',' << (s.theta ? fmt(*s.theta) : "") << ',' << opt_field(s.g)
        << ',' << opt_field(s.omega) << ',' << data.values.size() << ','
        << trials << ',' << seed << ',' << metric << ',' << fmt(stats[i].first)
        << ',' << fmt(stats[i].second) << ',' << fmt(thresholds[i]) << '\n';
    json r{{"protocol", protocol_name(s.protocol)},
           {"k", s.k},
           {"epsilon", s.epsilon},
           {"n", data.values.size()},
           {"trials", trials},
           {"seed", seed},
           {"metric", metric},
           {"mean", stats[i].first},
           {"std", stats[i].second},
           {"theta_threshold", thresholds[i]}};
    if (s.theta) r["theta"] = *s.theta;
    if (s.g) r["g"] = *s.g;
    if (s.omega) r["omega"] = *s.omega;
    rows.push_back(std::move(r));
  }
  atomic_write(go.out, go.format == "json" ? rows.dump(2) + "\n" : csv.str());
  if (go.svg && !go.out.empty()) {
    std::vector<Series> series{{metric, {}}};
    for (std::size_t i = 0; i < specs.size(); ++i)
      series[0].points.emplace_back(specs[i].epsilon, stats[i].first);
    atomic_write(go.out + ".svg", svg_chart(series, "epsilon", metric));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LDP frequency-estimation protocols as leakage channels"};
  app.require_subcommand(1);

  GlobalOpts go;
  app.add_option("--seed", go.seed, "master RNG seed");
  app.add_option("--out", go.out, "output path (stdout when omitted)");
  app.add_option("--format", go.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--exact", go.exact, "exact rational mode where supported");
  app.add_flag("--svg", go.svg, "also emit a minimal SVG chart (needs --out)");
  app.add_option("--lanes", go.lanes, "parallel lanes")
      ->check(CLI::PositiveNumber);

  auto* cap = app.add_subcommand("capacity", "Bayes capacity sweep");
  int cap_k = 50;
  std::string cap_protocols = "GRR,SS,BLH,OLH,SUE,OUE,THE";
  std::string cap_eps = "0.1,0.25,0.5,1,2,4,8,16";
  double cap_theta = 0.75;
  cap->add_option("--k", cap_k, "domain size");
  cap->add_option("--protocols", cap_protocols, "comma-separated protocols");
  cap->add_option("--epsilons", cap_eps, "comma-separated epsilon grid");
  cap->add_option("--theta", cap_theta, "THE threshold");

  auto* alc = app.add_subcommand("asr-lh-compare",
                                 "closed vs prior-work vs empirical LH ASR");
  std::string alc_kgrid = "2,3,4,5,8,16,32";
  std::string alc_eps = "3,5";
  int alc_g = 2, alc_trials = 50, alc_users = 1000;
  alc->add_option("--k-grid", alc_kgrid, "comma-separated domain sizes");
  alc->add_option("--epsilons", alc_eps, "comma-separated epsilon grid");
  alc->add_option("--g", alc_g, "hash range size");
  alc->add_option("--trials", alc_trials, "Monte-Carlo repetitions");
  alc->add_option("--users", alc_users, "users per trial");

  auto* ref = app.add_subcommand("refine", "refinement verdict for a pair");
  std::string ref_left, ref_right, ref_mode = "auto";
  ref->add_option("--left", ref_left, "left side (refiner) file")->required();
  ref->add_option("--right", ref_right, "right side (refined) file")
      ->required();
  ref->add_option("--mode", ref_mode, "auto, tradeoff, or lp")
      ->check(CLI::IsMember({"auto", "tradeoff", "lp"}));

  auto* sim = app.add_subcommand("simulate", "ASR or MSE experiment");
  std::string sim_config;
  sim->add_option("--config", sim_config, "JSON experiment config")
      ->required();

  auto* tde = app.add_subcommand("tradeoff-export",
                                 "2x2 trade-off function breakpoints");
  std::string tde_protocols = "SUE,OUE,THE";
  std::string tde_eps = "1,2,4";
  std::string tde_thetas = "0.75";
  tde->add_option("--protocols", tde_protocols, "comma-separated protocols");
  tde->add_option("--epsilons", tde_eps, "comma-separated epsilon grid");
  tde->add_option("--thetas", tde_thetas, "comma-separated theta grid (THE)");

  auto* fam = app.add_subcommand("family-check",
                                 "verify an epsilon-indexed refinement family");
  std::string fam_name = "GRR";
  int fam_k = 3;
  double fam_theta = 0.75;
  bool fam_onehot = false;
  std::string fam_eps = "0.25,0.5,1,2,4,8";
  fam->add_option("--family", fam_name, "protocol tag");
  fam->add_option("--k", fam_k, "domain size (GRR / one-hot)");
  fam->add_option("--theta", fam_theta, "THE threshold");
  fam->add_flag("--one-hot", fam_onehot, "lift bitwise family to one-hot");
  fam->add_option("--epsilons", fam_eps, "ascending epsilon grid");

  // global flags may appear after the subcommand name
  for (CLI::App* sc : {cap, alc, ref, sim, tde, fam}) sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (cap->parsed())
      return cmd_capacity(go, cap_k, cap_protocols, cap_eps, cap_theta);
    if (alc->parsed())
      return cmd_asr_lh_compare(go, alc_kgrid, alc_eps, alc_g, alc_trials,
                                alc_users);
    if (ref->parsed()) return cmd_refine(go, ref_left, ref_right, ref_mode);
    if (sim->parsed())
      return cmd_simulate(go, sim_config,
                          app.count("--seed") > 0);
    if (tde->parsed())
      return cmd_tradeoff_export(go, tde_protocols, tde_eps, tde_thetas);
    if (fam->parsed())
      return cmd_family_check(go, fam_name, fam_k, fam_theta, fam_onehot,
                              fam_eps);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "computation error: " << e.what() << "\n";
    return kExitCompute;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
  return kExitConfig;
}
