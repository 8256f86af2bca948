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

#include "stopi/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "stopi/csv.hpp"

namespace stopi {

BoundFunction::BoundFunction(const BoundConstants& consts, double beta_c, double beta_q,
                             double lambda0_sq)
    : consts_(consts), beta_c_(beta_c), beta_q_(beta_q), lambda0_sq_(lambda0_sq) {
  if (!(beta_c < beta_q)) throw std::invalid_argument("BoundFunction: beta_C must be below beta_Q");
  if (!(lambda0_sq >= 0.5 && lambda0_sq < 1.0)) {
    throw std::invalid_argument("BoundFunction: lambda_0^2 must lie in [1/2, 1)");
  }
}

BoundFunction BoundFunction::for_alpha(TiltParameter alpha) {
  return BoundFunction(solve_constants(alpha), classical_value(alpha), quantum_value(alpha),
                       largest_schmidt_sq(alpha));
}

void BoundFunction::require_in_range(double beta) const {
  if (!std::isfinite(beta) || beta < beta_c_ - kBetaSlack || beta > beta_q_ + kBetaSlack) {
    throw std::domain_error("beta = " + fmt17(beta) + " outside [" + fmt17(beta_c_) + ", " +
                            fmt17(beta_q_) + "]");
  }
}

double BoundFunction::f(double beta) const {
  require_in_range(beta);
  return consts_.s * beta + consts_.mu;
}

double BoundFunction::f_nd(double beta) const {
  require_in_range(beta);
  // The supremum of an affine function over [beta_C, beta] sits at an end.
  return std::max(consts_.s * beta + consts_.mu, consts_.s * beta_c_ + consts_.mu);
}

double BoundFunction::effective(double beta) const { return std::max(lambda0_sq_, f_nd(beta)); }

double BoundFunction::threshold() const {
  const double raw = (lambda0_sq_ - consts_.mu) / consts_.s;
  return std::clamp(raw, beta_c_, beta_q_);
}

double upper_bound(double beta, double lambda0_sq, double beta_c, double beta_q) {
  if (!(beta_c < beta_q)) throw std::invalid_argument("upper_bound: beta_C must be below beta_Q");
  if (beta < beta_c - kBetaSlack || beta > beta_q + kBetaSlack) {
    throw std::domain_error("upper_bound: beta outside [beta_C, beta_Q]");
  }
  return lambda0_sq + (1.0 - lambda0_sq) * (beta - beta_c) / (beta_q - beta_c);
}

ComparisonTable emit_comparison(const BoundFunction& bound, int resolution) {
  if (resolution < 2) throw std::invalid_argument("emit_comparison: resolution must be at least 2");
  ComparisonTable table;
  table.alpha = bound.constants().alpha;
  table.threshold = bound.threshold();
  table.rows.reserve(static_cast<std::size_t>(resolution));
  const double lo = bound.beta_c();
  const double hi = bound.beta_q();
  for (int i = 0; i < resolution; ++i) {
    // Pin the endpoints exactly.
    const double beta = i == resolution - 1 ? hi : lo + (hi - lo) * i / (resolution - 1);
    table.rows.push_back({beta, bound.f_nd(beta), bound.lambda0_sq(),
                          upper_bound(beta, bound.lambda0_sq(), lo, hi)});
  }
  return table;
}

ComparisonTable emit_comparison(TiltParameter alpha, int resolution) {
  return emit_comparison(BoundFunction::for_alpha(alpha), resolution);
}

void write_comparison_csv(std::ostream& os, const ComparisonTable& table) {
  os << "beta,f_nd,trivial,upper\n";
  for (const auto& r : table.rows) {
    os << fmt17(r.beta) << ',' << fmt17(r.f_nd) << ',' << fmt17(r.trivial) << ',' << fmt17(r.upper)
       << '\n';
  }
}

std::vector<ComparisonPoint> read_comparison_points(std::istream& is) {
  std::vector<ComparisonPoint> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;  // blank or comment-only
    std::string second, extra;
    if (!(fields >> second) || (fields >> extra)) {
      throw std::runtime_error("comparison file line " + std::to_string(line_no) +
                               ": expected two columns `beta value`");
    }
    try {
      std::size_t p1 = 0, p2 = 0;
      const double beta = std::stod(first, &p1);
      const double value = std::stod(second, &p2);
      if (p1 != first.size() || p2 != second.size() || !std::isfinite(beta) || !std::isfinite(value)) {
        throw std::invalid_argument("trailing characters");
      }
      out.push_back({beta, value});
    } catch (const std::exception&) {
      throw std::runtime_error("comparison file line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return out;
}

void write_merged_points_csv(std::ostream& os, const BoundFunction& bound,
                             const std::vector<ComparisonPoint>& points) {
  os << "beta,external,f_nd,upper\n";
  for (const auto& p : points) {
    if (p.beta < bound.beta_c() || p.beta > bound.beta_q()) continue;
    os << fmt17(p.beta) << ',' << fmt17(p.value) << ',' << fmt17(bound.f_nd(p.beta)) << ','
       << fmt17(upper_bound(p.beta, bound.lambda0_sq(), bound.beta_c(), bound.beta_q())) << '\n';
  }
}

}  // namespace stopi
