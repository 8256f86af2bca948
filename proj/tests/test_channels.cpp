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

#include <array>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "stopi/channels.hpp"
#include "stopi/random.hpp"

using namespace stopi;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

ComplexMatrix random_hermitian(Eigen::Index n, Engine& rng) {
  const ComplexMatrix g = ginibre(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

}  // namespace

TEST_CASE("damping profile") {
  const DampingProfile p = DampingProfile::standard();
  CHECK(std::abs(p.g(0.0)) <= 1e-15);
  CHECK(std::abs(p.g(kHalfPi)) <= 1e-15);
  CHECK(p.g(kQuarterPi) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_NOTHROW(validate_profile(p));
  DampingProfile bad{"bad", [](double x) { return std::sin(2.0 * x) + 0.1; }};
  CHECK_THROWS_AS(validate_profile(bad), std::invalid_argument);
}

TEST_CASE("dephasing axis crossover is half open") {
  CHECK(dephasing_axis(kQuarterPi) == DephasingAxis::X);
  CHECK(dephasing_axis(std::nextafter(kQuarterPi, 1.0)) == DephasingAxis::Z);
}

TEST_CASE("dephasing channel examples") {
  Engine rng = stream_engine(31, 0);
  const QubitChannel mid = dephasing_channel(kQuarterPi);
  for (int k = 0; k < 10; ++k) {
    const DensityMatrix rho = random_density(2, rng);
    CHECK(max_abs(stopi::apply(mid, rho.matrix()) - rho.matrix()) <= 1e-14);
  }
  CHECK(max_abs(stopi::apply(dephasing_channel(0.0), pauli_z<double>())) <= 1e-15);
  CHECK(max_abs(stopi::apply(dephasing_channel(kHalfPi), pauli_x<double>())) <= 1e-15);
  Mat2 zero = Mat2::Zero();
  zero(0, 0) = 1.0;
  CHECK(max_abs(stopi::apply(dephasing_channel(0.0), zero) - Mat2::Identity() / 2.0) <= 1e-15);
  CHECK_THROWS_AS(dephasing_channel(-0.01), std::domain_error);
  CHECK_THROWS_AS(dephasing_channel(1.6), std::domain_error);
}

TEST_CASE("dephasing family is unital and self-dual") {
  Engine rng = stream_engine(32, 0);
  std::uniform_real_distribution<double> angle(0.0, kHalfPi);
  for (int k = 0; k < 100; ++k) {
    const QubitChannel ch = dephasing_channel(angle(rng));
    CHECK(max_abs(stopi::apply(ch, Mat2(Mat2::Identity() / 2.0)) - Mat2::Identity() / 2.0) <= 1e-15);
    const Mat2 a = random_hermitian(2, rng), b = random_hermitian(2, rng);
    CHECK(std::abs(hs_inner(stopi::apply(ch, a), b) - hs_inner(a, stopi::apply(ch, b))) <= 1e-12);
    CHECK(max_abs(apply_dual(ch, a) - stopi::apply(ch, a)) <= 1e-12);
  }
}

TEST_CASE("bob channel endpoints") {
  Engine rng = stream_engine(33, 0);
  for (const double alpha : {0.0, 0.7, 1.5, 1.99}) {
    const TiltParameter t(alpha);
    const double bs = optimal_angles(t).second;
    const QubitChannel at_star = bob_channel(bs, t);
    const DensityMatrix rho = random_density(2, rng);
    CHECK(max_abs(stopi::apply(at_star, rho.matrix()) - rho.matrix()) <= 1e-12);
    CHECK(max_abs(bob_channel(0.0, t).choi().matrix() - dephasing_channel(0.0).choi().matrix()) <= 1e-15);
    CHECK(max_abs(bob_channel(kHalfPi, t).choi().matrix() - dephasing_channel(kHalfPi).choi().matrix()) <= 1e-12);
  }
}

TEST_CASE("Choi invariants on an (x, alpha) grid") {
  const std::array<Eigen::Index, 2> dims{2, 2};
  const std::array<std::size_t, 1> keep_in{0};
  for (int i = 0; i < 50; ++i) {
    const double x = kHalfPi * i / 49.0;
    for (int j = 0; j < 50; ++j) {
      const double alpha = 1.99 * j / 49.0;
      const QubitChannel ch = bob_channel(x, TiltParameter(alpha));
      const auto& choi = ch.choi().matrix();
      REQUIRE(eig_hermitian(ch.choi(), false).min() >= -1e-12);
      REQUIRE(max_abs(partial_trace(choi, dims, keep_in) - ComplexMatrix::Identity(2, 2)) <= 1e-12);
    }
  }
}

TEST_CASE("from_choi rejects invalid operators") {
  CHECK_THROWS_AS(QubitChannel::from_choi(ComplexMatrix::Identity(4, 4) * 2.0), std::invalid_argument);
  Mat4 neg = Mat4::Identity();
  neg(0, 0) = -1.0;
  neg(1, 1) = 3.0;
  CHECK_THROWS_AS(QubitChannel::from_choi(neg), std::invalid_argument);
  CHECK_THROWS_AS(QubitChannel::from_choi(ComplexMatrix::Identity(2, 2)), std::invalid_argument);
}

TEST_CASE("from_kraus reproduces the Kraus action") {
  Engine rng = stream_engine(34, 0);
  for (int k = 0; k < 50; ++k) {
    const auto kraus = random_qubit_kraus(rng, 3);
    const QubitChannel ch = QubitChannel::from_kraus(kraus);
    const Mat2 x = ginibre(2, 2, rng);
    Mat2 direct = Mat2::Zero();
    for (const auto& op : kraus) direct += op * x * op.adjoint();
    CHECK(max_abs(stopi::apply(ch, x) - direct) <= 1e-13);
    CHECK(std::abs(stopi::apply(ch, x).trace() - x.trace()) <= 1e-13);
  }
}

TEST_CASE("k operator") {
  for (const double alpha : {0.0, 1.0, 1.9}) {
    const TiltParameter t(alpha);
    const auto [a, b] = optimal_angles(t);
    CHECK(max_abs(k_operator(t, a, b).matrix() - optimal_state_matrix(alpha)) <= 1e-13);
  }
  // Full X dephasing on both sides of the CHSH state, applied by hand.
  const Mat4 phi = optimal_state_matrix(0.0);
  const Mat2 x = pauli_x<double>(), id = Mat2::Identity();
  const std::array<Mat4, 4> ops{tensor(id, id), tensor(x, id), tensor(id, x), tensor(x, x)};
  Mat4 direct = Mat4::Zero();
  for (const auto& op : ops) direct += 0.25 * op * phi * op.adjoint();
  const Mat4 k = k_operator(TiltParameter(0.0), 0.0, 0.0).matrix();
  CHECK(max_abs(k - direct) <= 1e-14);
  const Mat2 h = (x + pauli_z<double>()) / std::numbers::sqrt2;
  const Mat4 hh = tensor(h, h);
  Mat4 rotated = hh * k * hh;
  rotated.diagonal().setZero();
  CHECK(max_abs(rotated) <= 1e-14);

  Engine rng = stream_engine(35, 0);
  std::uniform_real_distribution<double> angle(0.0, kHalfPi);
  for (int n = 0; n < 100; ++n) {
    const HermitianMatrix kk = k_operator(TiltParameter(1.3), angle(rng), angle(rng));
    CHECK(eig_hermitian(kk, false).min() >= -1e-12);
    CHECK(std::abs(kk.matrix().trace() - 1.0) <= 1e-12);
  }
}
