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

// Qubit channels in Choi form and the extraction channels used by the
// operator-inequality certificate.
//
// Choi convention: C = sum_{jk} |j><k| (x) L(|j><k|), input factor first, so
// L(X) = tr_in[C (X^T (x) 1)] and tr_out C = 1 for trace-preserving L.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stopi/bell.hpp"
#include "stopi/matcore.hpp"

namespace stopi {

/// Tolerance on the Choi invariants (positivity and marginal identity).
inline constexpr double kChoiTolerance = 1e-10;

class QubitChannel {
 public:
  /// Validates positivity and trace preservation.
  static QubitChannel from_choi(const ComplexMatrix& choi);
  static QubitChannel from_kraus(std::span<const Mat2> kraus);
  static QubitChannel identity();

  const HermitianMatrix& choi() const noexcept { return choi_; }

  /// L(|j><k|), the (j, k) block of the Choi operator.
  Mat2 unit_image(int j, int k) const;

 private:
  explicit QubitChannel(HermitianMatrix choi) : choi_(std::move(choi)) {}
  HermitianMatrix choi_;
};

/// L(X) = tr_in[C (X^T (x) 1)] for a 2x2 operand.
ComplexMatrix apply(const QubitChannel& ch, const ComplexMatrix& x);
Mat2 apply(const QubitChannel& ch, const Mat2& x);

/// Dual map: <L(X), Y> = <X, L^dagger(Y)>.
Mat2 apply_dual(const QubitChannel& ch, const Mat2& y);

/// (L_A (x) L_B)(M) for a 4x4 operand.
Mat4 apply_local(const QubitChannel& alice, const QubitChannel& bob, const Mat4& m);

/// (L_A^dagger (x) L_B^dagger)(M) for a 4x4 operand.
Mat4 apply_local_dual(const QubitChannel& alice, const QubitChannel& bob, const Mat4& m);

/// Dephasing strength profile g: [0, pi/2] -> [0, 1] with g(0) = g(pi/2) = 0
/// and g(pi/4) = 1.
struct DampingProfile {
  std::string name;
  std::function<double(double)> g;

  /// g(x) = (1 + sqrt 2)(sin x + cos x - 1).
  static DampingProfile standard();
};

/// Throws std::invalid_argument if the boundary values, range or continuity
/// requirements fail on a uniform sample of [0, pi/2].
void validate_profile(const DampingProfile& profile, int samples = 2001);

enum class DephasingAxis { X, Z };

/// X on [0, pi/4], Z on (pi/4, pi/2].
inline DephasingAxis dephasing_axis(double x) {
  return x <= kQuarterPi ? DephasingAxis::X : DephasingAxis::Z;
}

/// Piecewise-linear remap sending [0, b*] onto [0, pi/4] and [b*, pi/2] onto
/// [pi/4, pi/2].
class EffectiveAngle {
 public:
  explicit EffectiveAngle(double b_star);
  static EffectiveAngle for_alpha(TiltParameter alpha);

  double b_star() const noexcept { return b_star_; }
  double operator()(double x) const;

 private:
  double b_star_;
};

/// rho -> (1 + g)/2 rho + (1 - g)/2 G rho G with G the axis at x.
QubitChannel dephasing_channel(double x, const DampingProfile& profile = DampingProfile::standard());

/// Kraus pair {sqrt((1+g)/2) 1, sqrt((1-g)/2) G} of the dephasing channel.
std::vector<Mat2> dephasing_kraus(double x, const DampingProfile& profile = DampingProfile::standard());

/// Alice's channel at angle x (identity at pi/4).
inline QubitChannel alice_channel(double x, const DampingProfile& profile = DampingProfile::standard()) {
  return dephasing_channel(x, profile);
}

/// Bob's channel: Alice's channel at the effective angle, identity at b*.
QubitChannel bob_channel(double x, TiltParameter alpha,
                         const DampingProfile& profile = DampingProfile::standard());

/// K = (L_A^dagger(a) (x) L_B^dagger(b))(Phi_alpha), the dual channels
/// applied to the optimal state.
HermitianMatrix k_operator(TiltParameter alpha, double a, double b,
                           const DampingProfile& profile = DampingProfile::standard());

}  // namespace stopi
