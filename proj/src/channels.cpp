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

#include "stopi/channels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stopi {

namespace {

void require_channel_angle(double x, const char* who) {
  if (!std::isfinite(x) || x < -kAngleSlack || x > kHalfPi + kAngleSlack) {
    throw std::domain_error(std::string(who) + ": angle " + std::to_string(x) + " outside [0, pi/2]");
  }
}

// Ordered (j, a), (k, b) -> index into the 4x4 Choi matrix.
constexpr Eigen::Index idx(int in, int out) { return 2 * in + out; }

}  // namespace

// ---------------------------------------------------------------------------
// QubitChannel

QubitChannel QubitChannel::from_choi(const ComplexMatrix& choi) {
  if (choi.rows() != 4 || choi.cols() != 4) {
    throw std::invalid_argument("QubitChannel: Choi operator must be 4x4");
  }
  HermitianMatrix h(choi);
  const double lo = eig_hermitian(h, false).min();
  if (lo < -kChoiTolerance) {
    throw std::invalid_argument("QubitChannel: Choi operator not positive (" + std::to_string(lo) + ")");
  }
  const std::array<Eigen::Index, 2> dims{2, 2};
  const std::array<std::size_t, 1> keep_in{0};
  const ComplexMatrix marginal = partial_trace(h.matrix(), dims, keep_in);
  const double dev = (marginal - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff();
  if (dev > kChoiTolerance) {
    throw std::invalid_argument("QubitChannel: not trace preserving (deviation " + std::to_string(dev) + ")");
  }
  return QubitChannel(std::move(h));
}

QubitChannel QubitChannel::from_kraus(std::span<const Mat2> kraus) {
  if (kraus.empty()) throw std::invalid_argument("QubitChannel: empty Kraus set");
  ComplexMatrix choi = ComplexMatrix::Zero(4, 4);
  for (const Mat2& k : kraus) {
    // sum_{jk} |j><k| (x) K|j><k|K^dagger = |v><v| with v = sum_j |j> (x) K|j>.
    Eigen::Matrix<Complex<double>, 4, 1> v;
    for (int j = 0; j < 2; ++j) {
      for (int o = 0; o < 2; ++o) v(idx(j, o)) = k(o, j);
    }
    choi.noalias() += v * v.adjoint();
  }
  return from_choi(choi);
}

QubitChannel QubitChannel::identity() {
  const std::array<Mat2, 1> k{Mat2::Identity()};
  return from_kraus(k);
}

Mat2 QubitChannel::unit_image(int j, int k) const {
  return choi_.matrix().block(2 * j, 2 * k, 2, 2);
}

Mat2 apply(const QubitChannel& ch, const Mat2& x) {
  // L(X) = sum_{jk} X_jk L(|j><k|)
  Mat2 out = Mat2::Zero();
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) out += x(j, k) * ch.unit_image(j, k);
  }
  return out;
}

ComplexMatrix apply(const QubitChannel& ch, const ComplexMatrix& x) {
  if (x.rows() != 2 || x.cols() != 2) throw std::invalid_argument("apply: operand must be 2x2");
  const Mat2 fixed = x;
  return apply(ch, fixed);
}

Mat2 apply_dual(const QubitChannel& ch, const Mat2& y) {
  // L^dagger(Y)_jk = <L(|j><k|), Y>
  Mat2 out;
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) out(j, k) = hs_inner(ch.unit_image(j, k), y);
  }
  return out;
}

namespace {

template <typename MapA, typename MapB>
Mat4 apply_product(const MapA& map_a, const MapB& map_b, const Mat4& m) {
  // M = sum M_{(ij),(kl)} |i><k| (x) |j><l|
  std::array<std::array<Mat2, 2>, 2> ia{}, ib{};
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      Mat2 e = Mat2::Zero();
      e(i, k) = 1.0;
      ia[i][k] = map_a(e);
      ib[i][k] = map_b(e);
    }
  }
  Mat4 out = Mat4::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
          const auto coeff = m(2 * i + j, 2 * k + l);
          if (coeff == Complex<double>(0)) continue;
          out += coeff * tensor(ia[i][k], ib[j][l]);
        }
      }
    }
  }
  return out;
}

}  // namespace

Mat4 apply_local(const QubitChannel& alice, const QubitChannel& bob, const Mat4& m) {
  auto fa = [&](const Mat2& x) { return apply(alice, x); };
  auto fb = [&](const Mat2& x) { return apply(bob, x); };
  return apply_product(fa, fb, m);
}

Mat4 apply_local_dual(const QubitChannel& alice, const QubitChannel& bob, const Mat4& m) {
  auto fa = [&](const Mat2& x) { return apply_dual(alice, x); };
  auto fb = [&](const Mat2& x) { return apply_dual(bob, x); };
  return apply_product(fa, fb, m);
}

// ---------------------------------------------------------------------------
// Extraction channels

DampingProfile DampingProfile::standard() {
  return {"sin+cos", [](double x) {
            return (1.0 + std::numbers::sqrt2) * (std::sin(x) + std::cos(x) - 1.0);
          }};
}

void validate_profile(const DampingProfile& profile, int samples) {
  if (!profile.g) throw std::invalid_argument("damping profile has no function");
  constexpr double tol = 1e-12;
  const auto& g = profile.g;
  if (std::abs(g(0.0)) > tol || std::abs(g(kHalfPi)) > tol) {
    throw std::invalid_argument("damping profile: g must vanish at 0 and pi/2");
  }
  if (std::abs(g(kQuarterPi) - 1.0) > tol) {
    throw std::invalid_argument("damping profile: g(pi/4) must equal 1");
  }
  samples = std::max(samples, 3);
  const double h = kHalfPi / (samples - 1);
  double prev = g(0.0);
  for (int i = 1; i < samples; ++i) {
    const double v = g(i * h);
    if (!std::isfinite(v) || v < -tol || v > 1.0 + tol) {
      throw std::invalid_argument("damping profile: g leaves [0, 1] at x = " + std::to_string(i * h));
    }
    // Continuity proxy: a jump larger than a generous Lipschitz allowance.
    if (std::abs(v - prev) > 10.0 * h + 1e-9) {
      throw std::invalid_argument("damping profile: g is discontinuous near x = " + std::to_string(i * h));
    }
    prev = v;
  }
}

EffectiveAngle::EffectiveAngle(double b_star) : b_star_(b_star) {
  if (!(b_star > 0.0) || b_star > kQuarterPi + kAngleSlack) {
    throw std::domain_error("effective angle kink must lie in (0, pi/4]");
  }
}

EffectiveAngle EffectiveAngle::for_alpha(TiltParameter alpha) {
  return EffectiveAngle(optimal_bob_angle(alpha.value()));
}

double EffectiveAngle::operator()(double x) const {
  require_channel_angle(x, "EffectiveAngle");
  if (x <= b_star_) return kQuarterPi * x / b_star_;
  return kHalfPi - kQuarterPi * (std::numbers::pi - 2.0 * x) / (std::numbers::pi - 2.0 * b_star_);
}

std::vector<Mat2> dephasing_kraus(double x, const DampingProfile& profile) {
  require_channel_angle(x, "dephasing_channel");
  const double g = std::clamp(profile.g(x), 0.0, 1.0);
  const Mat2 axis = dephasing_axis(x) == DephasingAxis::X ? pauli_x() : pauli_z();
  return {std::sqrt((1.0 + g) / 2.0) * pauli_i(), std::sqrt((1.0 - g) / 2.0) * axis};
}

QubitChannel dephasing_channel(double x, const DampingProfile& profile) {
  const auto kraus = dephasing_kraus(x, profile);
  return QubitChannel::from_kraus(kraus);
}

QubitChannel bob_channel(double x, TiltParameter alpha, const DampingProfile& profile) {
  const EffectiveAngle h = EffectiveAngle::for_alpha(alpha);
  return dephasing_channel(h(x), profile);
}

HermitianMatrix k_operator(TiltParameter alpha, double a, double b, const DampingProfile& profile) {
  const QubitChannel la = alice_channel(a, profile);
  const QubitChannel lb = bob_channel(b, alpha, profile);
  const Mat4 phi = optimal_state_matrix(alpha.value());
  return HermitianMatrix(apply_local_dual(la, lb, phi));
}

}  // namespace stopi
