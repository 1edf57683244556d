// Copyright 2026 The ccdqm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccdqm/compressor.hpp"
#include "ccdqm/config.hpp"
#include "ccdqm/experiment.hpp"
#include "ccdqm/feasibility.hpp"
#include "ccdqm/graph.hpp"
#include "ccdqm/objective.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kFeasibilityFailure = 2, kRuntimeFailure = 3 };

struct Common {
  std::string configPath;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool strict = false;
};

void add_common(CLI::App* sub, Common& c, bool with_config = true) {
  if (with_config) sub->add_option("config", c.configPath, "experiment config file")->required();
  sub->add_option("--set", c.sets, "override a config key (key=value), repeatable");
  sub->add_option("--seed", c.seed, "override run.seed");
  sub->add_option("--out", c.out, "override output.dir");
  sub->add_flag("--strict", c.strict, "abort when the feasibility check fails");
}

ccdqm::ExperimentConfig load(const Common& c) {
  ccdqm::ExperimentConfig cfg = ccdqm::load_config_file(c.configPath);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ccdqm::ConfigError("--set expects key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  if (c.seed) cfg.runSeed = *c.seed;
  if (c.out) cfg.outDir = *c.out;
  cfg.validate();
  return cfg;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void print_summary(const std::vector<ccdqm::VariantSummary>& rows) {
  ccdqm::write_summary_csv(std::cout, rows);
}

int cmd_run(const Common& c) {
  const auto cfg = load(c);
  ccdqm::ExperimentOptions opts;
  opts.strict = c.strict;
  const auto res = ccdqm::run_experiment(cfg, opts);
  if (!res.feasibility.pass)
    std::cerr << "warning: feasibility check failed; convergence is not guaranteed\n";
  const auto& last = res.mean.last();
  std::printf("variant %s\niterations %zu\nfinal_err %.6e\nbits %llu\nreached_tol %s\n",
              res.mean.variant.c_str(), last.iter, last.err,
              static_cast<unsigned long long>(last.bitsCum), res.mean.reachedTol ? "true" : "false");
  for (const auto& f : res.files) std::printf("wrote %s\n", f.c_str());
  return kOk;
}

int cmd_compare(const Common& c, const std::string& variants) {
  const auto cfg = load(c);
  ccdqm::ExperimentOptions opts;
  opts.strict = c.strict;
  print_summary(ccdqm::compare_variants(cfg, split_list(variants), opts));
  return kOk;
}

int cmd_check(const Common& c) {
  const auto cfg = load(c);
  const auto inst = ccdqm::build_instance(cfg);
  const auto report = ccdqm::feasibility_precheck(cfg, inst);
  std::cout << ccdqm::format_report(report);
  return report.pass ? kOk : kFeasibilityFailure;
}

int cmd_sweep(const Common& c, const std::string& key, const std::string& values) {
  const auto cfg = load(c);
  ccdqm::ExperimentOptions opts;
  const auto points = ccdqm::sweep(cfg, key, split_list(values), opts);
  std::cout << "key,value,feasible," << ccdqm::kSummaryHeader << '\n';
  for (const auto& p : points) {
    const auto& s = p.summary;
    std::printf("%s,%s,%s,%s,%s,%zu,%llu,%llu,%.17g,%.17g,%.17g\n", key.c_str(), p.value.c_str(),
                p.feasible ? "true" : "false", s.variant.c_str(), s.reached ? "true" : "false",
                s.iterations, static_cast<unsigned long long>(s.transmissions),
                static_cast<unsigned long long>(s.bits), s.sigmaHat, s.finalErr, s.bestErr);
  }
  return kOk;
}

struct GraphArgs {
  std::size_t n = 20;
  double tau = 0.4;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen_graph(const GraphArgs& a) {
  const auto g = ccdqm::gen_admissible_graph(a.n, a.tau, a.seed);
  if (a.out.empty()) {
    ccdqm::write_graph(std::cout, g);
  } else {
    ccdqm::write_graph_file(a.out, g);
  }
  return kOk;
}

struct DataArgs {
  std::size_t samples = 200;
  std::size_t dim = 24;
  double flip = 0.1;
  std::uint64_t seed = 2;
  std::string out;
};

int cmd_gen_data(const DataArgs& a) {
  const auto samples = ccdqm::gen_logistic_samples(a.samples, a.dim, a.seed, a.flip);
  if (a.out.empty()) {
    ccdqm::write_csv(std::cout, samples);
  } else {
    std::ofstream f(a.out);
    if (!f) throw ccdqm::InvalidInput("cannot write '" + a.out + "'");
    ccdqm::write_csv(f, samples);
  }
  return kOk;
}

struct CompressArgs {
  std::string compressor = "det_quant";
  int bits = 2;
  std::size_t k = 1;
  std::size_t dim = 24;
  std::size_t trials = 10000;
  std::uint64_t seed = 7;
};

int cmd_compress_test(const CompressArgs& a) {
  ccdqm::ExperimentConfig cfg;
  cfg.compressor = a.compressor;
  cfg.bits = a.bits;
  cfg.topK = a.k;
  const ccdqm::Compressor comp = cfg.make_compressor();
  if (a.dim == 0) throw ccdqm::ConfigError("--dim must be >= 1");
  ccdqm::Rng rng = ccdqm::derive_stream(a.seed, 0x50);
  const std::size_t dim = a.dim;
  const ccdqm::VectorSampler sampler = [dim](ccdqm::Rng& r) {
    std::normal_distribution<double> nd;
    ccdqm::Vector x(static_cast<Eigen::Index>(dim));
    for (auto& v : x) v = nd(r);
    return x;
  };
  const auto est = ccdqm::empirical_delta(comp, sampler, a.trials, rng);
  const auto bound = comp.delta_bound(a.dim);
  std::printf("compressor %s\ndim %zu\nmessage_bits %llu\ntrials %zu\n", comp.describe().c_str(),
              a.dim, static_cast<unsigned long long>(comp.message_bits(a.dim)), est.samplesUsed);
  std::printf("delta_max %.9g\ndelta_mean %.9g\nhalf_width %.3g\n", est.maxRatio, est.meanRatio,
              est.halfWidth);
  bool ok = true;
  if (bound) {
    ok = est.maxRatio <= *bound + est.halfWidth;
    std::printf("delta_bound %.9g\nwithin_bound %s\n", *bound, ok ? "true" : "false");
  } else {
    std::printf("delta_bound none\n");
  }
  if (comp.unbiased()) {
    ccdqm::Vector x = sampler(rng);
    const auto bias = ccdqm::check_unbiased(comp, x, std::max<std::size_t>(a.trials, 100000), rng);
    std::printf("bias_norm %.3g\nbias_band %.3g\nunbiased %s\n", bias.biasNorm, bias.bandNorm,
                bias.withinBand ? "true" : "false");
    ok = ok && bias.withinBand;
  }
  return ok ? kOk : kRuntimeFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-triggered compressed decentralized Newton-type solver"};
  app.require_subcommand(1);

  Common common;
  std::string variants = "dqm,cdqm,qdqm,ccdqm";
  std::string sweep_key, sweep_values;
  GraphArgs graph_args;
  DataArgs data_args;
  CompressArgs comp_args;

  auto* run = app.add_subcommand("run", "run the configured variant");
  add_common(run, common);
  auto* compare = app.add_subcommand("compare", "run several variants on one instance");
  add_common(compare, common);
  compare->add_option("--variants", variants, "comma-separated: dqm,cdqm,qdqm,ccdqm");
  auto* check = app.add_subcommand("check-params", "print the feasibility report");
  add_common(check, common);
  auto* sw = app.add_subcommand("sweep", "rerun with one key set to each value");
  add_common(sw, common);
  sw->add_option("--key", sweep_key, "config key")->required();
  sw->add_option("--values", sweep_values, "comma-separated values")->required();

  auto* gg = app.add_subcommand("gen-graph", "sample a connected non-bipartite graph");
  gg->add_option("--n", graph_args.n, "agents");
  gg->add_option("--tau", graph_args.tau, "edge probability");
  gg->add_option("--seed", graph_args.seed, "seed");
  gg->add_option("--out", graph_args.out, "output file (default stdout)");

  auto* gd = app.add_subcommand("gen-data", "synthetic logistic samples as CSV");
  gd->add_option("--samples", data_args.samples, "number of samples");
  gd->add_option("--dim", data_args.dim, "feature dimension");
  gd->add_option("--flip", data_args.flip, "label flip probability");
  gd->add_option("--seed", data_args.seed, "seed");
  gd->add_option("--out", data_args.out, "output file (default stdout)");

  auto* ct = app.add_subcommand("compress-test", "estimate a compressor's contraction factor");
  ct->add_option("--compressor", comp_args.compressor, "identity|det_quant|stoch_quant|top_k");
  ct->add_option("--bits", comp_args.bits, "quantizer bits");
  ct->add_option("--k", comp_args.k, "top_k size");
  ct->add_option("--dim", comp_args.dim, "vector dimension");
  ct->add_option("--trials", comp_args.trials, "random vectors");
  ct->add_option("--seed", comp_args.seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(common);
    if (*compare) return cmd_compare(common, variants);
    if (*check) return cmd_check(common);
    if (*sw) return cmd_sweep(common, sweep_key, sweep_values);
    if (*gg) return cmd_gen_graph(graph_args);
    if (*gd) return cmd_gen_data(data_args);
    if (*ct) return cmd_compress_test(comp_args);
  } catch (const ccdqm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ccdqm::FeasibilityFailure& e) {
    std::cerr << e.what() << '\n' << ccdqm::format_report(e.report());
    return kFeasibilityFailure;
  } catch (const ccdqm::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}
