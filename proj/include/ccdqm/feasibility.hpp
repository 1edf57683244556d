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

#ifndef CCDQM_FEASIBILITY_HPP_
#define CCDQM_FEASIBILITY_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ccdqm/graph.hpp"

namespace ccdqm {

/// Problem constants the parameter conditions depend on.
struct ProblemConstants {
  double v = 0.0;    // min strong convexity
  double ell = 0.0;  // max gradient Lipschitz constant
};

/// G(beta) = c lh1 / 2 - 2 c beta l2 ell^2 / (2 c beta l2 v - ell^2)
///           - (c^2 lhn^2 + 4 ell^2) / (c beta l2).
double g_beta(const SpectralSummary& s, const ProblemConstants& k, double c, double beta);
/// The same quantity written with the 4 / 2 scaled middle term.
double g_beta_scaled(const SpectralSummary& s, const ProblemConstants& k, double c, double beta);

/// Right-hand side of the compression condition at (c, beta); F(c, beta).
double compression_rhs(const SpectralSummary& s, const ProblemConstants& k, double c, double beta);
/// Limit of compression_rhs as c -> infinity; depends only on the graph.
double compression_rhs_limit(const SpectralSummary& s, double beta);
/// Closed-form maximizer of compression_rhs_limit.
double beta_star(const SpectralSummary& s);
/// ell^2 / (2 c l2 v); beta must exceed it.
double beta_lower_bound(const SpectralSummary& s, const ProblemConstants& k, double c);
/// delta / (1 - sqrt(delta))^2.
double compression_lhs(double delta);

/// Maximizes f on a log-spaced grid over [lo, hi] (expanding hi by 10x while
/// the best point sits on the upper edge), then refines by golden-section
/// search on log(beta) inside the bracketing cells.
double maximize_log_grid(const std::function<double(double)>& f, double lo, double hi,
                         std::size_t points);

struct Corollary1Result {
  double deltaMax = 0.0;
  double cMin = 0.0;  // +inf at or beyond deltaMax
  bool pass = false;
};

struct FeasibilityReport {
  double c = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double betaLowerBound = 0.0;
  double G_beta = 0.0;
  double rhs = 0.0;
  double lhs = 0.0;
  double betaStar = 0.0;
  double betaStarGrid = 0.0;  // grid/golden argmax of F(inf, beta)
  double F_limit = 0.0;       // F(inf, beta*)
  bool preconditionOk = false;  // beta > betaLowerBound
  bool pass = false;
  std::optional<Corollary1Result> corollary1;
  std::vector<std::string> notes;
};

/// Evaluates the linear-convergence condition for (c, delta). When beta is
/// empty, the beta maximizing F(c, beta) over the admissible range is used.
/// Requires a connected non-bipartite graph and 0 <= delta < 1.
FeasibilityReport theorem1_check(const SpectralSummary& s, const ProblemConstants& k, double c,
                                 std::optional<double> beta, double delta, bool unbiased = false);

Corollary1Result corollary1_check(const SpectralSummary& s, const ProblemConstants& k,
                                  double delta);

/// Bracket for the error weight of the Lyapunov function at eta's lower limit.
struct ErrorWeightBracket {
  double lower = 0.0;
  double upper = 0.0;  // +inf when delta = 0
};
ErrorWeightBracket error_weight_bracket(const SpectralSummary& s, const ProblemConstants& k,
                                        double c, double beta, double delta);

/// The three terms whose minimum is the per-step contraction margin, with r and
/// eta just above their lower limits. All positive means some margin exists.
struct ContractionBranches {
  double first = 0.0;
  double second = 0.0;
  double third = 0.0;
  bool all_positive() const { return first > 0 && second > 0 && third > 0; }
};
ContractionBranches contraction_branches(const SpectralSummary& s, const ProblemConstants& k,
                                         double c, double beta, double delta);

/// Smallest c on a geometric ladder c0 * factor^j (j < max_steps) passing
/// theorem1_check; empty if none does.
std::optional<double> min_feasible_c(const SpectralSummary& s, const ProblemConstants& k,
                                     double delta, double c0 = 1e-2, double factor = 1.25,
                                     int max_steps = 200);

/// Aligned "key  value" text.
std::string format_report(const FeasibilityReport& r);

}  // namespace ccdqm

#endif  // CCDQM_FEASIBILITY_HPP_
