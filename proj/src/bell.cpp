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

#include "stopi/bell.hpp"

#include <stdexcept>
#include <string>

namespace stopi {

namespace {

void require_angle(double angle, const char* who) {
  if (!std::isfinite(angle) || angle < -kAngleSlack || angle > kHalfPi + kAngleSlack) {
    throw std::domain_error(std::string(who) + ": angle " + std::to_string(angle) +
                            " outside [0, pi/2]");
  }
}

}  // namespace

TiltParameter::TiltParameter(double alpha) : alpha_(alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha >= 2.0) {
    throw std::domain_error("alpha must lie in [0, 2), got " + std::to_string(alpha));
  }
}

BellRealization::BellRealization(TiltParameter alpha_, double a_, double b_)
    : alpha(alpha_), a(a_), b(b_) {
  require_angle(a, "BellRealization");
  require_angle(b, "BellRealization");
}

HermitianMatrix observable(double angle, int r) {
  require_angle(angle, "observable");
  if (r != 0 && r != 1) throw std::invalid_argument("observable: r must be 0 or 1");
  return HermitianMatrix(observable_matrix(angle, r));
}

HermitianMatrix bell_operator(const BellRealization& real) {
  return HermitianMatrix(bell_matrix(real.alpha.value(), real.a, real.b));
}

double classical_value(TiltParameter alpha) { return 2.0 + alpha.value(); }

double quantum_value(TiltParameter alpha) {
  return std::sqrt(8.0 + 2.0 * alpha.value() * alpha.value());
}

std::pair<double, double> optimal_angles(TiltParameter alpha) {
  return {kQuarterPi, optimal_bob_angle(alpha.value())};
}

double theta(TiltParameter alpha) { return schmidt_angle(alpha.value()); }

double largest_schmidt_sq(TiltParameter alpha) {
  const double c = std::cos(theta(alpha));
  return c * c;
}

DensityMatrix optimal_state(TiltParameter alpha) {
  return DensityMatrix(optimal_state_matrix(alpha.value()));
}

}  // namespace stopi
