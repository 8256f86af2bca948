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

// Tilted CHSH family
//
//   W_alpha = alpha A0 (x) 1 + A0 (x) (B0 + B1) + A1 (x) (B0 - B1)
//
// with qubit observables A_r = cos(a) X + (-1)^r sin(a) Z (same for B with
// angle b). alpha lives in [0, 2); the angles in [0, pi/2].

#include <cmath>
#include <numbers>
#include <utility>

#include "stopi/matcore.hpp"

namespace stopi {

inline constexpr double kHalfPi = std::numbers::pi / 2;
inline constexpr double kQuarterPi = std::numbers::pi / 4;

/// Slack allowed on the angle range so that grid endpoints computed as
/// i * (pi/2) / n are accepted.
inline constexpr double kAngleSlack = 1e-12;

class TiltParameter {
 public:
  explicit TiltParameter(double alpha);
  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

struct BellRealization {
  TiltParameter alpha;
  double a;
  double b;

  BellRealization(TiltParameter alpha, double a, double b);
};

// Unchecked builders, usable with any scalar and on fixed-size storage.

template <typename Scalar>
Matrix2c<Scalar> observable_matrix(Scalar angle, int r) {
  const Scalar sign = (r & 1) ? Scalar(-1) : Scalar(1);
  return std::cos(angle) * pauli_x<Scalar>() + (sign * std::sin(angle)) * pauli_z<Scalar>();
}

template <typename Scalar>
Matrix4c<Scalar> bell_matrix(Scalar alpha, Scalar a, Scalar b) {
  const Matrix2c<Scalar> a0 = observable_matrix(a, 0);
  const Matrix2c<Scalar> a1 = observable_matrix(a, 1);
  const Matrix2c<Scalar> b0 = observable_matrix(b, 0);
  const Matrix2c<Scalar> b1 = observable_matrix(b, 1);
  return alpha * tensor(a0, pauli_i<Scalar>()) + tensor(a0, b0 + b1) + tensor(a1, b0 - b1);
}

/// Schmidt angle: sin(2 theta) = sqrt((4 - a^2)/(4 + a^2)).
template <typename Scalar>
Scalar schmidt_angle(Scalar alpha) {
  return Scalar(0.5) * std::asin(std::sqrt((Scalar(4) - alpha * alpha) / (Scalar(4) + alpha * alpha)));
}

/// Bob's optimal angle arcsin(sqrt((4 - a^2)/8)).
template <typename Scalar>
Scalar optimal_bob_angle(Scalar alpha) {
  return std::asin(std::sqrt((Scalar(4) - alpha * alpha) / Scalar(8)));
}

/// Pauli expansion of the optimal two-qubit state for the optimal
/// observables (a = pi/4, b = b*).
template <typename Scalar>
Matrix4c<Scalar> optimal_state_matrix(Scalar alpha) {
  const Scalar a2 = alpha * alpha;
  const Scalar cos2t = std::sqrt(Scalar(2) * a2 / (Scalar(4) + a2));
  const Scalar sin2t = std::sqrt((Scalar(4) - a2) / (Scalar(4) + a2));
  const Scalar r2 = std::sqrt(Scalar(2));
  const Matrix2c<Scalar> id = pauli_i<Scalar>();
  const Matrix2c<Scalar> x = pauli_x<Scalar>();
  const Matrix2c<Scalar> y = pauli_y<Scalar>();
  const Matrix2c<Scalar> z = pauli_z<Scalar>();
  const Matrix2c<Scalar> h_plus = (x + z) / r2;
  const Matrix2c<Scalar> h_minus = (x - z) / r2;
  Matrix4c<Scalar> m = tensor(id, id);
  m += cos2t * (tensor(h_plus, id) + tensor(id, x));
  m += tensor(h_plus, x);
  m += sin2t * (tensor(y, y) + tensor(h_minus, z));
  return Scalar(0.25) * m;
}

// Checked operations.

/// cos(angle) X + (-1)^r sin(angle) Z; angle in [0, pi/2].
HermitianMatrix observable(double angle, int r);

HermitianMatrix bell_operator(const BellRealization& real);

/// 2 + alpha.
double classical_value(TiltParameter alpha);

/// sqrt(8 + 2 alpha^2).
double quantum_value(TiltParameter alpha);

/// (a*, b*) = (pi/4, arcsin(sqrt((4 - alpha^2)/8))).
std::pair<double, double> optimal_angles(TiltParameter alpha);

/// theta_alpha = asin(sqrt((4 - a^2)/(4 + a^2))) / 2.
double theta(TiltParameter alpha);

/// Largest squared Schmidt coefficient cos^2(theta_alpha).
double largest_schmidt_sq(TiltParameter alpha);

DensityMatrix optimal_state(TiltParameter alpha);

}  // namespace stopi
