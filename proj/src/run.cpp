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

#include "ccdqm/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace ccdqm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

IterationMetrics measure(const Simulator& sim, const RunOptions& opt, double err0) {
  IterationMetrics m;
  m.iter = sim.iteration();
  const Matrix x = sim.stacked_x();
  const Matrix phi = sim.stacked_phi();
  const auto n = x.rows();
  if (opt.xStar) {
    const Matrix dx = x - opt.xStar->transpose().replicate(n, 1);
    m.err = err0 > 0.0 ? dx.squaredNorm() / err0 : 0.0;
  } else {
    m.err = kNaN;
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  m.consensusError = (x.rowwise() - mean).norm();
  Matrix resid = phi;
  for (Eigen::Index i = 0; i < n; ++i)
    resid.row(i) += sim.objectives()[static_cast<std::size_t>(i)]
                        .gradient(x.row(i).transpose())
                        .transpose();
  m.dualResidual = resid.norm();
  m.dualSum = phi.colwise().sum().norm();
  m.errorNormSq = (sim.stacked_y() - x).squaredNorm();
  if (opt.lyapunov) {
    const auto v = opt.lyapunov->evaluate(sim);
    m.vPrimal = v.primal;
    m.vDual = v.dual;
    m.vError = v.error;
    m.vTotal = v.total();
    m.phiMismatch = opt.lyapunov->phi_mismatch(sim);
  } else {
    m.vPrimal = m.vDual = m.vError = m.vTotal = m.phiMismatch = kNaN;
  }
  return m;
}

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::optional<std::size_t> RunRecord::first_below(double tol) const {
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].err <= tol) return r;
  return std::nullopt;
}

std::vector<double> RunRecord::err_series() const {
  std::vector<double> s;
  s.reserve(rows.size());
  for (const auto& r : rows) s.push_back(r.err);
  return s;
}

RunRecord run(Simulator& sim, const RunOptions& options) {
  RunRecord rec;
  rec.variant = variant_name(sim.config().schedule, sim.config().compressor);
  double err0 = 0.0;
  if (options.xStar) {
    if (options.xStar->size() != static_cast<Eigen::Index>(sim.dimension()))
      throw InvalidInput("run: x* dimension mismatch");
    err0 = (sim.stacked_x() - options.xStar->transpose().replicate(
                                  static_cast<Eigen::Index>(sim.agent_count()), 1))
               .squaredNorm();
  }
  auto emit = [&](IterationMetrics m) {
    rec.rows.push_back(m);
    if (options.onRow) options.onRow(rec.rows.back());
  };

  IterationMetrics first = measure(sim, options, err0);
  first.stepNormSq = kNaN;
  first.threshold = kNaN;
  emit(first);

  const auto& cfg = sim.config();
  const bool per_link = cfg.accounting == BitAccounting::PerLink;
  auto reached = [&](const IterationMetrics& m) { return options.xStar && m.err <= cfg.tol; };
  rec.reachedTol = reached(first);
  while (!rec.reachedTol && sim.iteration() < cfg.maxIter) {
    const StepStats s = sim.iterate();
    if (options.lyapunov) options.lyapunov->advance(sim);
    IterationMetrics m = measure(sim, options, err0);
    const auto& prev = rec.rows.back();
    m.bitsPerLinkCum = prev.bitsPerLinkCum + s.comm.bitsPerLink;
    m.bitsPerBroadcastCum = prev.bitsPerBroadcastCum + s.comm.bitsPerBroadcast;
    m.bitsCum = per_link ? m.bitsPerLinkCum : m.bitsPerBroadcastCum;
    m.roundsCum = prev.roundsCum + s.comm.triggers;
    m.triggers = s.comm.triggers;
    m.hessRefreshes = s.comm.refreshes;
    m.stepNormSq = s.stepNormSq;
    m.threshold = s.comm.threshold;
    emit(m);
    rec.reachedTol = reached(rec.rows.back());
  }
  return rec;
}

void write_metrics_csv(std::ostream& out, const RunRecord& record) {
  out << kMetricsHeader << '\n';
  for (const auto& m : record.rows) {
    out << m.iter << ',' << fmt17(m.err) << ',' << fmt17(m.consensusError) << ','
        << fmt17(m.dualResidual) << ',' << m.bitsCum << ',' << m.roundsCum << ',' << m.triggers
        << ',' << m.hessRefreshes << ',' << fmt17(m.vTotal) << ',' << fmt17(m.vPrimal) << ','
        << fmt17(m.vDual) << ',' << fmt17(m.vError) << '\n';
  }
}

void write_metrics_csv_file(const std::string& path, const RunRecord& record) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write metrics file '" + path + "'");
  write_metrics_csv(out, record);
}

RunRecord read_metrics_csv(std::istream& in) {
  RunRecord rec;
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw InvalidInput("metrics csv: unexpected header");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 12)
      throw InvalidInput("metrics csv line " + std::to_string(lineno) + ": expected 12 fields");
    auto num = [&](std::size_t c) { return cells[c] == "nan" ? kNaN : std::stod(cells[c]); };
    IterationMetrics m;
    m.iter = std::stoull(cells[0]);
    m.err = num(1);
    m.consensusError = num(2);
    m.dualResidual = num(3);
    m.bitsCum = std::stoull(cells[4]);
    m.roundsCum = std::stoull(cells[5]);
    m.triggers = std::stoull(cells[6]);
    m.hessRefreshes = std::stoull(cells[7]);
    m.vTotal = num(8);
    m.vPrimal = num(9);
    m.vDual = num(10);
    m.vError = num(11);
    rec.rows.push_back(m);
  }
  return rec;
}

RunRecord mean_record(const std::vector<RunRecord>& replicas) {
  if (replicas.empty()) throw InvalidInput("mean_record: no replicas");
  std::size_t len = replicas.front().rows.size();
  for (const auto& r : replicas) len = std::min(len, r.rows.size());
  const double count = static_cast<double>(replicas.size());
  RunRecord out;
  out.variant = replicas.front().variant;
  out.rows.resize(len);
  auto mean_of = [&](std::size_t k, auto field) {
    double s = 0.0;
    for (const auto& r : replicas) s += static_cast<double>(field(r.rows[k]));
    return s / count;
  };
  auto round_u = [](double v) { return static_cast<std::uint64_t>(std::llround(v)); };
  for (std::size_t k = 0; k < len; ++k) {
    auto& m = out.rows[k];
    m.iter = replicas.front().rows[k].iter;
    m.err = mean_of(k, [](const auto& x) { return x.err; });
    m.consensusError = mean_of(k, [](const auto& x) { return x.consensusError; });
    m.dualResidual = mean_of(k, [](const auto& x) { return x.dualResidual; });
    m.bitsCum = round_u(mean_of(k, [](const auto& x) { return x.bitsCum; }));
    m.bitsPerLinkCum = round_u(mean_of(k, [](const auto& x) { return x.bitsPerLinkCum; }));
    m.bitsPerBroadcastCum = round_u(mean_of(k, [](const auto& x) { return x.bitsPerBroadcastCum; }));
    m.roundsCum = round_u(mean_of(k, [](const auto& x) { return x.roundsCum; }));
    m.triggers = round_u(mean_of(k, [](const auto& x) { return x.triggers; }));
    m.hessRefreshes = round_u(mean_of(k, [](const auto& x) { return x.hessRefreshes; }));
    m.vTotal = mean_of(k, [](const auto& x) { return x.vTotal; });
    m.vPrimal = mean_of(k, [](const auto& x) { return x.vPrimal; });
    m.vDual = mean_of(k, [](const auto& x) { return x.vDual; });
    m.vError = mean_of(k, [](const auto& x) { return x.vError; });
    m.phiMismatch = mean_of(k, [](const auto& x) { return x.phiMismatch; });
    m.dualSum = mean_of(k, [](const auto& x) { return x.dualSum; });
    m.errorNormSq = mean_of(k, [](const auto& x) { return x.errorNormSq; });
    m.stepNormSq = mean_of(k, [](const auto& x) { return x.stepNormSq; });
    m.threshold = mean_of(k, [](const auto& x) { return x.threshold; });
  }
  return out;
}

}  // namespace ccdqm
