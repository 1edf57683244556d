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

#include "ccdqm/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ccdqm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Spec {
  double l2, ln, lh1, lhn;
};

Spec unpack(const SpectralSummary& s) {
  return {s.lambda2(), s.lambdaMax(), s.lambdaHatMin(), s.lambdaHatMax()};
}

void require_admissible(const SpectralSummary& s) {
  const auto r = validate_assumptions(s);
  if (!r.pass) throw InvalidInput("feasibility: graph assumption failed: " + r.describe());
}

// Xi_1 and Xi_2 at zero margin.
double xi1(const Spec& g, double c, double beta) {
  return 1.5 * c * g.ln + 2.0 * c * beta * g.ln + c * g.ln * g.ln / (2.0 * beta * g.l2);
}
double xi2(const Spec& g, double c, double beta) {
  return 1.5 * c * g.ln + c * g.ln * g.ln / (2.0 * beta * g.l2);
}

double eta_lower(const Spec& g, const ProblemConstants& k, double c, double beta) {
  return c * g.l2 / (2.0 * c * g.l2 * k.v - k.ell * k.ell / beta);
}

}  // namespace

double g_beta(const SpectralSummary& s, const ProblemConstants& k, double c, double beta) {
  const Spec g = unpack(s);
  const double l2sq = k.ell * k.ell;
  return c * g.lh1 / 2.0 - 2.0 * c * beta * g.l2 * l2sq / (2.0 * c * beta * g.l2 * k.v - l2sq) -
         (c * c * g.lhn * g.lhn + 4.0 * l2sq) / (c * beta * g.l2);
}

double g_beta_scaled(const SpectralSummary& s, const ProblemConstants& k, double c, double beta) {
  const Spec g = unpack(s);
  const double l2sq = k.ell * k.ell;
  return c * g.lh1 / 2.0 -
         4.0 * l2sq * c * beta * g.l2 / (4.0 * c * beta * g.l2 * k.v - 2.0 * l2sq) -
         (c * c * g.lhn * g.lhn + 4.0 * l2sq) / (c * beta * g.l2);
}

double compression_rhs(const SpectralSummary& s, const ProblemConstants& k, double c, double beta) {
  const Spec g = unpack(s);
  const double denom = 3.0 * c * g.ln + 2.0 * c * beta * g.ln + c * g.ln * g.ln / (beta * g.l2);
  return g_beta(s, k, c, beta) / denom;
}

double compression_rhs_limit(const SpectralSummary& s, double beta) {
  const Spec g = unpack(s);
  const double num = g.lh1 / 2.0 - g.lhn * g.lhn / (beta * g.l2);
  const double denom = 3.0 * g.ln + 2.0 * beta * g.ln + g.ln * g.ln / (beta * g.l2);
  return num / denom;
}

double beta_star(const SpectralSummary& s) {
  const Spec g = unpack(s);
  const double u = g.lhn * g.lhn / (g.l2 * g.lh1);
  return 2.0 * u + std::sqrt(4.0 * u * u + 0.5 * g.ln / g.l2 + 3.0 * u);
}

double beta_lower_bound(const SpectralSummary& s, const ProblemConstants& k, double c) {
  return k.ell * k.ell / (2.0 * c * s.lambda2() * k.v);
}

double compression_lhs(double delta) {
  const double om = 1.0 - std::sqrt(delta);
  return delta / (om * om);
}

double maximize_log_grid(const std::function<double(double)>& f, double lo, double hi,
                         std::size_t points) {
  if (!(lo > 0.0 && hi > lo) || points < 3)
    throw InvalidInput("maximize_log_grid: need 0 < lo < hi and >= 3 points");
  std::vector<double> grid(points);
  std::size_t best = 0;
  for (int expand = 0; expand < 30; ++expand) {
    const double a = std::log(lo), b = std::log(hi);
    double best_val = -kInf;
    for (std::size_t i = 0; i < points; ++i) {
      grid[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
      const double v = f(grid[i]);
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    if (best + 1 < points) break;
    hi *= 10.0;
  }
  double a = std::log(grid[best == 0 ? 0 : best - 1]);
  double b = std::log(grid[std::min(best + 1, points - 1)]);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
  while (b - a > 1e-13) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(std::exp(x2));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(std::exp(x1));
    }
  }
  return std::exp(0.5 * (a + b));
}

Corollary1Result corollary1_check(const SpectralSummary& s, const ProblemConstants& k,
                                  double delta) {
  require_admissible(s);
  if (!(delta >= 0.0 && delta < 1.0)) throw InvalidInput("corollary1_check: delta must lie in [0, 1)");
  const Spec g = unpack(s);
  const double target = g.lh1 / (3.0 * g.ln);
  // delta / (1 - sqrt delta)^2 is increasing in s = sqrt(delta) on (0, 1).
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double h = mid * mid / ((1.0 - mid) * (1.0 - mid));
    (h < target ? lo : hi) = mid;
  }
  const double root = 0.5 * (lo + hi);
  Corollary1Result r;
  r.deltaMax = root * root;
  r.pass = delta < r.deltaMax;
  const double om = 1.0 - std::sqrt(delta);
  const double denom = k.v * (g.lh1 * om * om - 3.0 * g.ln * delta);
  r.cMin = (r.pass && denom > 0.0) ? 2.0 * k.ell * k.ell * om * om / denom : kInf;
  return r;
}

FeasibilityReport theorem1_check(const SpectralSummary& s, const ProblemConstants& k, double c,
                                 std::optional<double> beta, double delta, bool unbiased) {
  require_admissible(s);
  if (!(k.v > 0.0) || !(k.ell >= k.v)) throw InvalidInput("theorem1_check: need 0 < v <= ell");
  if (!(c > 0.0)) throw InvalidInput("theorem1_check: c must be > 0");
  if (!(delta >= 0.0 && delta < 1.0)) throw InvalidInput("theorem1_check: delta must lie in [0, 1)");

  FeasibilityReport r;
  r.c = c;
  r.delta = delta;
  r.betaLowerBound = beta_lower_bound(s, k, c);
  r.betaStar = beta_star(s);
  r.F_limit = compression_rhs_limit(s, r.betaStar);
  r.betaStarGrid =
      maximize_log_grid([&](double b) { return compression_rhs_limit(s, b); }, 1e-3, 1e3, 10000);

  if (beta) {
    if (!(*beta > 0.0)) throw InvalidInput("theorem1_check: beta must be > 0");
    r.beta = *beta;
  } else {
    const double lo = r.betaLowerBound * (1.0 + 1e-9);
    const double hi = std::max({1e3, 1e3 * lo, 10.0 * r.betaStar});
    r.beta = maximize_log_grid([&](double b) { return compression_rhs(s, k, c, b); }, lo, hi, 2000);
    r.notes.emplace_back("beta chosen to maximize the right-hand side at this c");
  }
  r.preconditionOk = r.beta > r.betaLowerBound;
  r.G_beta = g_beta(s, k, c, r.beta);
  r.rhs = compression_rhs(s, k, c, r.beta);
  r.lhs = compression_lhs(delta);
  if (!r.preconditionOk)
    r.notes.emplace_back("precondition violated: beta <= ell^2 / (2 c lambda_2 v)");
  if (r.preconditionOk && !(r.G_beta > 0.0)) r.notes.emplace_back("G(beta) <= 0: increase c");
  if (r.preconditionOk && r.G_beta > 0.0 && !(r.lhs < r.rhs)) {
    r.notes.emplace_back(r.lhs < r.F_limit ? "compression too coarse for this c: increase c"
                                           : "compression too coarse for this graph at any c");
  }
  r.pass = r.preconditionOk && r.G_beta > 0.0 && r.lhs < r.rhs;
  if (unbiased) r.corollary1 = corollary1_check(s, k, delta);
  return r;
}

ErrorWeightBracket error_weight_bracket(const SpectralSummary& s, const ProblemConstants& k,
                                        double c, double beta, double delta) {
  const Spec g = unpack(s);
  const double root = std::sqrt(delta);
  const double x1 = xi1(g, c, beta), x2 = xi2(g, c, beta);
  ErrorWeightBracket b;
  b.lower = (x2 + x1 * root) / (1.0 - root);
  if (delta == 0.0) {
    b.upper = kInf;
  } else {
    const double q = delta / (1.0 - root);
    const double eta = eta_lower(g, k, c, beta);
    b.upper = (c * g.lh1 - 4.0 * eta * k.ell * k.ell) / (2.0 * q) -
              (c * c * g.lhn * g.lhn + 4.0 * k.ell * k.ell) / (c * g.l2 * q * beta) - x1;
  }
  return b;
}

ContractionBranches contraction_branches(const SpectralSummary& s, const ProblemConstants& k,
                                         double c, double beta, double delta) {
  const Spec g = unpack(s);
  const double root = std::sqrt(delta);
  const double x1 = xi1(g, c, beta), x2 = xi2(g, c, beta);
  const double r = error_weight_bracket(s, k, c, beta, delta).lower * (1.0 + 1e-6);
  const double eta = eta_lower(g, k, c, beta) * (1.0 + 1e-6);
  const double q = delta / (1.0 - root);
  const double l2sq = k.ell * k.ell;
  ContractionBranches out;
  out.first = g.l2 * ((1.0 - root) * r - (x1 + x2 - (1.0 - root) * x1)) /
              (root * r * g.l2 + 2.0 * c * g.ln * g.ln * (1.0 + root));
  out.second = (c * g.l2 * (c * g.lh1 - 2.0 * r * q - 2.0 * x1 * q - 4.0 * eta * l2sq) -
                2.0 * (c * c * g.lhn * g.lhn + 4.0 * l2sq) / beta) /
               (8.0 * c * c * g.lhn * g.lhn + 32.0 * l2sq + 4.0 * c * c * g.ln * g.ln +
                4.0 * c * g.l2 * r * q);
  out.third = (c * g.l2 * (2.0 * k.v - 1.0 / eta) - l2sq / beta) /
              (c * c * g.l2 * g.lhn + 4.0 * l2sq);
  return out;
}

std::optional<double> min_feasible_c(const SpectralSummary& s, const ProblemConstants& k,
                                     double delta, double c0, double factor, int max_steps) {
  double c = c0;
  for (int j = 0; j < max_steps; ++j, c *= factor)
    if (theorem1_check(s, k, c, std::nullopt, delta).pass) return c;
  return std::nullopt;
}

std::string format_report(const FeasibilityReport& r) {
  std::ostringstream out;
  auto line = [&](const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    out << key;
    for (std::size_t i = std::char_traits<char>::length(key); i < 18; ++i) out << ' ';
    out << buf << '\n';
  };
  auto text = [&](const char* key, const std::string& v) {
    out << key;
    for (std::size_t i = std::char_traits<char>::length(key); i < 18; ++i) out << ' ';
    out << v << '\n';
  };
  line("c", r.c);
  line("delta", r.delta);
  line("beta", r.beta);
  line("beta_lower_bound", r.betaLowerBound);
  line("G_beta", r.G_beta);
  line("lhs", r.lhs);
  line("rhs", r.rhs);
  line("beta_star", r.betaStar);
  line("beta_star_grid", r.betaStarGrid);
  line("F_limit", r.F_limit);
  if (r.corollary1) {
    line("cor1_delta_max", r.corollary1->deltaMax);
    line("cor1_c_min", r.corollary1->cMin);
    text("cor1_pass", r.corollary1->pass ? "true" : "false");
  }
  for (const auto& n : r.notes) text("note", n);
  text("pass", r.pass ? "true" : "false");
  return out.str();
}

}  // namespace ccdqm
