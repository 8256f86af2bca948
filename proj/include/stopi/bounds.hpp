// Copyright 2026 The stopi Authors
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

#pragma once

// Affine self-testing bounds f(beta) = s beta + mu on the extractability,
// their non-decreasing envelope, the trivial level lambda_0^2, the mixture
// upper bound and the threshold violation.

#include <iosfwd>
#include <string>
#include <vector>

#include "stopi/bell.hpp"
#include "stopi/certifier.hpp"

namespace stopi {

/// Slack on the [beta_C, beta_Q] domain checks.
inline constexpr double kBetaSlack = 1e-12;

class BoundFunction {
 public:
  BoundFunction(const BoundConstants& consts, double beta_c, double beta_q, double lambda0_sq);

  /// Solves the constants for alpha and fills in beta_C, beta_Q, lambda_0^2.
  static BoundFunction for_alpha(TiltParameter alpha);

  const BoundConstants& constants() const noexcept { return consts_; }
  double beta_c() const noexcept { return beta_c_; }
  double beta_q() const noexcept { return beta_q_; }
  double lambda0_sq() const noexcept { return lambda0_sq_; }

  /// s * beta + mu; beta must lie in [beta_C, beta_Q].
  double f(double beta) const;

  /// sup of f over [beta_C, beta].
  double f_nd(double beta) const;

  /// max(lambda_0^2, f_nd(beta)): the bound actually implied, since the
  /// trivial level is always attainable.
  double effective(double beta) const;

  /// inf { beta : f(beta) > lambda_0^2 }, clipped to [beta_C, beta_Q].
  double threshold() const;

 private:
  void require_in_range(double beta) const;

  BoundConstants consts_;
  double beta_c_;
  double beta_q_;
  double lambda0_sq_;
};

/// lambda_0^2 + (1 - lambda_0^2)(beta - beta_C)/(beta_Q - beta_C).
double upper_bound(double beta, double lambda0_sq, double beta_c, double beta_q);

struct ComparisonRow {
  double beta;
  double f_nd;
  double trivial;
  double upper;
};

struct ComparisonTable {
  double alpha = 0.0;
  double threshold = 0.0;
  std::vector<ComparisonRow> rows;
};

/// `resolution` equally spaced rows from beta_C to beta_Q inclusive.
ComparisonTable emit_comparison(TiltParameter alpha, int resolution);
ComparisonTable emit_comparison(const BoundFunction& bound, int resolution);

/// Header `beta,f_nd,trivial,upper`, 17 significant digits.
void write_comparison_csv(std::ostream& os, const ComparisonTable& table);

struct ComparisonPoint {
  double beta;
  double value;
};

/// Whitespace-separated `beta value` lines; `#` starts a comment. Throws
/// std::runtime_error naming the offending line on malformed input.
std::vector<ComparisonPoint> read_comparison_points(std::istream& is);

/// Header `beta,external,f_nd,upper`: externally supplied points next to
/// this bound evaluated at the same beta (points outside the range are
/// dropped).
void write_merged_points_csv(std::ostream& os, const BoundFunction& bound,
                             const std::vector<ComparisonPoint>& points);

}  // namespace stopi
