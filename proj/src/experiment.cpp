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

#include "ccdqm/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "ccdqm/lyapunov.hpp"
#include "ccdqm/rate_fit.hpp"
#include "ccdqm/simulator.hpp"
#include "parallel.hpp"

namespace ccdqm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename Fn>
auto with_context(const std::string& key, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw InvalidInput(key + ": " + e.what());
  }
}

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_path(const ExperimentConfig& cfg, const std::string& suffix) {
  return (std::filesystem::path(cfg.outDir) / (cfg.outPrefix + suffix)).string();
}

void ensure_dir(const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.outDir, ec);
  if (ec) throw InvalidInput("output.dir: cannot create '" + cfg.outDir + "': " + ec.message());
}

FeasibilityReport failing_report(const ExperimentConfig& cfg, std::string note) {
  FeasibilityReport r;
  r.c = cfg.c;
  r.delta = kNaN;
  r.notes.push_back(std::move(note));
  return r;
}

void write_meta(const std::string& path, const ExperimentResult& res) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write metadata file '" + path + "'");
  out << "# variant: " << res.mean.variant << '\n';
  out << "# feasibility: " << (res.feasibility.pass ? "pass" : "fail") << '\n';
  for (const auto& n : res.notes) out << "# note: " << n << '\n';
  out << serialize_config(res.resolved);
}

}  // namespace

ProblemInstance build_instance(const ExperimentConfig& cfg) {
  cfg.validate();
  Graph graph = cfg.graphSource == "file"
                    ? with_context("graph.path", [&] { return read_graph_file(cfg.graphPath); })
                    : with_context("graph.tau", [&] {
                        return gen_admissible_graph(cfg.graphN, cfg.graphTau, cfg.graphSeed);
                      });
  SpectralSummary s = spectra(graph);
  if (auto v = validate_assumptions(s); !v.pass)
    throw InvalidInput((cfg.graphSource == "file" ? "graph.path: " : "graph.tau: ") + v.describe());

  const std::size_t n = graph.size();
  std::vector<LocalObjective> objs;
  if (cfg.objectiveKind == "quadratic") {
    objs = with_context("objective.eig_min", [&] {
      return gen_synthetic_quadratic(n, cfg.dataD, cfg.eigMin, cfg.eigMax, cfg.dataSeed);
    });
  } else if (cfg.dataSource == "csv") {
    objs = with_context("data.path", [&] {
      return partition_round_robin(load_csv_file(cfg.dataPath), n, cfg.lambdaReg);
    });
  } else {
    SyntheticLogisticOptions o;
    o.agents = n;
    o.samples_per_agent = cfg.dataM;
    o.dim = cfg.dataD;
    o.flip_probability = cfg.dataFlip;
    o.lambda_reg = cfg.lambdaReg;
    objs = with_context("data.m", [&] { return gen_synthetic_logistic(o, cfg.dataSeed); });
  }

  ProblemConstants k;
  try {
    std::vector<ConvexityConstants> per;
    for (const auto& f : objs) per.push_back(f.convexity_constants());
    const auto agg = aggregate(per);
    k = {agg.v, agg.ell};
  } catch (const InvalidInput&) {
    k = {0.0, kNaN};
  }
  CentralizedSolution opt =
      with_context("objective.kind", [&] { return centralized_solve(objs, 1e-12, 200); });
  return {std::move(graph), std::move(s), std::move(objs), k, std::move(opt)};
}

FeasibilityReport feasibility_precheck(const ExperimentConfig& cfg, const ProblemInstance& inst) {
  if (!(inst.constants.v > 0.0))
    return failing_report(cfg, "objective not strongly convex: set objective.lambda_reg > 0");
  const Compressor comp = cfg.make_compressor();
  const std::size_t d = inst.objectives.front().dimension();
  std::optional<double> delta = cfg.delta ? cfg.delta : comp.delta_bound(d);
  if (!delta)
    return failing_report(cfg, "no contraction bound below 1 for " + comp.describe() +
                                   " at d = " + std::to_string(d) +
                                   ": set algorithm.delta to an empirical value");
  try {
    return theorem1_check(inst.spectra, inst.constants, cfg.c, cfg.beta, *delta,
                          comp.unbiased());
  } catch (const InvalidInput& e) {
    return failing_report(cfg, e.what());
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& opts) {
  return run_experiment(cfg, build_instance(cfg), opts);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProblemInstance& inst,
                                const ExperimentOptions& opts) {
  cfg.validate();
  ExperimentResult res;
  res.resolved = cfg;
  res.feasibility = feasibility_precheck(cfg, inst);
  for (const auto& n : res.feasibility.notes) res.notes.push_back("feasibility: " + n);
  if (!res.feasibility.pass && opts.strict)
    throw FeasibilityFailure("feasibility check failed under --strict", res.feasibility);
  if (!inst.optimum.warning.empty()) res.notes.push_back(inst.optimum.warning);
  if (cfg.objectiveKind == "logistic" && cfg.lambdaReg > 0.0)
    res.notes.push_back("logistic loss regularized with lambda_reg = " + fmt17(cfg.lambdaReg));

  if (std::isfinite(res.feasibility.delta)) res.resolved.delta = res.feasibility.delta;
  if (res.feasibility.beta > 0.0) res.resolved.beta = res.feasibility.beta;
  if (!cfg.rWeight && cfg.lyapunov) {
    const double beta = cfg.beta ? *cfg.beta : beta_star(inst.spectra);
    const double delta = std::isfinite(res.feasibility.delta) ? res.feasibility.delta : 0.0;
    double w = inst.constants.v > 0.0
                   ? error_weight_bracket(inst.spectra, inst.constants, cfg.c, beta, delta).lower
                   : kNaN;
    if (!std::isfinite(w) || w < 0.0) {
      w = 1.0;
      res.notes.push_back("error weight bracket unavailable: algorithm.r_weight set to 1");
    }
    res.resolved.rWeight = w;
  }

  const std::size_t reps = cfg.replicas;
  res.replicas.resize(reps);
  const std::size_t outer = reps > 1 ? cfg.threads : 1;
  detail::parallel_for(reps, outer, [&](std::size_t r) {
    RunConfig rc = cfg.make_run_config();
    rc.replica = r;
    rc.threads = reps > 1 ? 1 : cfg.threads;
    Simulator sim(inst.graph, inst.objectives, rc);
    std::unique_ptr<LyapunovTracker> tracker;
    if (cfg.lyapunov)
      tracker = std::make_unique<LyapunovTracker>(inst.graph, inst.objectives, inst.optimum.x,
                                                  cfg.c, *res.resolved.rWeight);
    RunOptions ro;
    ro.xStar = inst.optimum.x;
    ro.lyapunov = tracker.get();
    res.replicas[r] = run(sim, ro);
  });
  res.mean = reps > 1 ? mean_record(res.replicas) : res.replicas.front();

  if (opts.writeFiles) {
    ensure_dir(cfg);
    const std::string main_csv = join_path(cfg, ".csv");
    write_metrics_csv_file(main_csv, res.mean);
    res.files.push_back(main_csv);
    if (reps > 1) {
      for (std::size_t r = 0; r < reps; ++r) {
        const std::string p = join_path(cfg, ".rep" + std::to_string(r) + ".csv");
        write_metrics_csv_file(p, res.replicas[r]);
        res.files.push_back(p);
      }
    }
    const std::string meta = join_path(cfg, ".meta");
    write_meta(meta, res);
    res.files.push_back(meta);
  }
  return res;
}

ExperimentConfig variant_config(const ExperimentConfig& base, const std::string& variant) {
  ExperimentConfig c = base;
  if (variant == "dqm" || variant == "qdqm") {
    c.schedule = "zero";
  } else if (variant == "cdqm" || variant == "ccdqm") {
    c.schedule = "geometric";
  } else {
    throw ConfigError("unknown variant '" + variant + "' (expected dqm, cdqm, qdqm or ccdqm)");
  }
  if (variant == "dqm" || variant == "cdqm") {
    c.compressor = "identity";
    c.delta.reset();
  }
  c.outPrefix = base.outPrefix + "_" + variant;
  return c;
}

VariantSummary summarize(const std::string& variant, const RunRecord& rec, double tol) {
  VariantSummary s;
  s.variant = variant;
  const auto hit = rec.first_below(tol);
  s.reached = hit.has_value();
  const auto& row = rec.rows[hit ? *hit : rec.rows.size() - 1];
  s.iterations = row.iter;
  s.transmissions = row.roundsCum;
  s.bits = row.bitsCum;
  s.finalErr = rec.last().err;
  s.bestErr = rec.rows.front().err;
  for (const auto& r : rec.rows) s.bestErr = std::min(s.bestErr, r.err);
  const auto err = rec.err_series();
  try {
    s.sigmaHat = fit_rate(err, 0.5).sigmaHat;
  } catch (const InvalidInput&) {
    s.sigmaHat = kNaN;
  }
  return s;
}

void write_summary_csv(std::ostream& out, const std::vector<VariantSummary>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& s : rows)
    out << s.variant << ',' << (s.reached ? "true" : "false") << ',' << s.iterations << ','
        << s.transmissions << ',' << s.bits << ',' << fmt17(s.sigmaHat) << ','
        << fmt17(s.finalErr) << ',' << fmt17(s.bestErr) << '\n';
}

std::vector<VariantSummary> compare_variants(const ExperimentConfig& cfg,
                                             const std::vector<std::string>& variants,
                                             const ExperimentOptions& opts) {
  if (variants.empty()) throw ConfigError("compare: no variants given");
  std::vector<ExperimentConfig> cfgs;
  for (const auto& v : variants) cfgs.push_back(variant_config(cfg, v));
  const ProblemInstance inst = build_instance(cfg);
  std::vector<VariantSummary> out;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const ExperimentResult r = run_experiment(cfgs[i], inst, opts);
    out.push_back(summarize(variants[i], r.mean, cfg.tol));
  }
  if (opts.writeFiles) {
    ensure_dir(cfg);
    const std::string path = join_path(cfg, "_summary.csv");
    std::ofstream f(path);
    if (!f) throw InvalidInput("cannot write summary file '" + path + "'");
    write_summary_csv(f, out);
  }
  return out;
}

std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, const std::string& key,
                              const std::vector<std::string>& values,
                              const ExperimentOptions& opts) {
  if (values.empty()) throw ConfigError("sweep: no values given");
  std::vector<ExperimentConfig> cfgs;
  for (const auto& v : values) {
    ExperimentConfig c = cfg;
    c.set(key, v);
    c.validate();
    cfgs.push_back(c);
  }
  ExperimentOptions inner = opts;
  inner.strict = false;
  inner.writeFiles = false;
  std::vector<SweepPoint> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const ExperimentResult r = run_experiment(cfgs[i], inner);
    const std::string variant = variant_name(cfgs[i].make_schedule(), cfgs[i].make_compressor());
    out.push_back({values[i], summarize(variant, r.mean, cfgs[i].tol), r.feasibility.pass});
  }
  if (opts.writeFiles) {
    ensure_dir(cfg);
    const std::string path = join_path(cfg, "_sweep.csv");
    std::ofstream f(path);
    if (!f) throw InvalidInput("cannot write sweep file '" + path + "'");
    f << "key,value,feasible," << kSummaryHeader << '\n';
    for (const auto& p : out) {
      std::ostringstream row;
      write_summary_csv(row, {p.summary});
      std::string body = row.str();
      body = body.substr(body.find('\n') + 1);
      f << key << ',' << p.value << ',' << (p.feasible ? "true" : "false") << ',' << body;
    }
  }
  return out;
}

}  // namespace ccdqm
