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
#include <sstream>

#include "doctest.h"
#include "stopi/counterexample.hpp"
#include "stopi/extract_search.hpp"
#include "stopi/random.hpp"

using namespace stopi;

namespace {

const double kRoot2 = std::numbers::sqrt2;

Mat4 literal_block(int x, int y) {
  const Mat2 X = pauli_x<double>(), Z = pauli_z<double>();
  if (x == 0 || y == 0) return 2.0 * tensor(Z, Z);
  if (x == 1 && y == 1) return tensor(X, Mat2(-X + Z)) + tensor(Z, Mat2(X + Z));
  if (x == 1 && y == 2) return 2.0 * tensor(X, Z);
  if (x == 2 && y == 1) return 2.0 * tensor(Z, X);
  return -2.0 * tensor(Z, Z);
}

ComplexMatrix partial_transpose_b(const Mat4& m) {
  ComplexMatrix out(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) out(2 * a + b, 2 * c + d) = m(2 * a + d, 2 * c + b);
  return out;
}

std::array<QubitChannel, 3> identities() {
  return {QubitChannel::identity(), QubitChannel::identity(), QubitChannel::identity()};
}

QubitChannel erasure() {
  Mat2 k0 = Mat2::Zero(), k1 = Mat2::Zero();
  k0(0, 0) = 1.0;
  k1(0, 1) = 1.0;
  const std::array<Mat2, 2> ks{k0, k1};
  return QubitChannel::from_kraus(ks);
}

}  // namespace

TEST_CASE("probability table") {
  const ProbTable t = ProbTable::make(kCentreWeight);
  double sum = 0.0;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) {
      CHECK(t.at(x, y) >= 0.0);
      sum += t.at(x, y);
    }
  CHECK(std::abs(sum - 1.0) <= 1e-12);
  CHECK(t.at(1, 2) == 0.0);
  CHECK(t.at(2, 1) == 0.0);
  CHECK(t.at(1, 1) == kCentreWeight);
  CHECK(std::abs((4.0 / 31 + 2 * 3.0 / 62 + 3 * 8.0 / 31) - 1.0) <= 1e-15);
}

TEST_CASE("CHSH block table matches the literal table") {
  const ChshBlockTable t = ChshBlockTable::build();
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) CHECK((t.at(x, y) - literal_block(x, y)).cwiseAbs().maxCoeff() == 0.0);
  // The centre block has spectrum {-2 sqrt 2, 0, 0, 2 sqrt 2}.
  const auto spec = eig_hermitian(HermitianMatrix(t.at(1, 1)), false);
  CHECK(std::abs(spec.values(0) + 2.0 * kRoot2) <= 1e-12);
  CHECK(std::abs(spec.values(1)) <= 1e-12);
  CHECK(std::abs(spec.values(3) - 2.0 * kRoot2) <= 1e-12);
}

TEST_CASE("36x36 operator is block diagonal with the table blocks") {
  const ComplexMatrix w = counterexample_bell_operator();
  REQUIRE(w.rows() == 36);
  const ChshBlockTable t = ChshBlockTable::build();
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      const ComplexMatrix blk = w.block(4 * i, 4 * j, 4, 4);
      if (i == j) {
        CHECK((blk - ComplexMatrix(t.at(i / 3, i % 3))).cwiseAbs().maxCoeff() <= 1e-15);
      } else {
        CHECK(blk.cwiseAbs().maxCoeff() == 0.0);
      }
    }
}

TEST_CASE("state construction") {
  const CounterexampleState s = build_state();
  const ChshBlockTable t = ChshBlockTable::build();
  CHECK(std::real(hs_inner(t.at(1, 1), s.centre_state.matrix())) == doctest::Approx(2.0 * kRoot2).epsilon(1e-14));
  CHECK(std::real(hs_inner(t.at(0, 0), s.local_state(0, 0).matrix())) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s.frame_states.size() == 6);
  CHECK_THROWS_AS(s.local_state(1, 2), std::out_of_range);

  // Centre: pure and maximally entangled.
  CHECK(s.centre_state.purity() == doctest::Approx(1.0).epsilon(1e-14));
  const std::array<Eigen::Index, 2> dims{2, 2};
  const std::array<std::size_t, 1> keep{0};
  CHECK((partial_trace(s.centre_state.matrix(), dims, keep) - ComplexMatrix::Identity(2, 2) / 2.0)
            .cwiseAbs()
            .maxCoeff() <= 1e-15);
  // Frame: positive partial transpose.
  for (const auto& [cell, rho] : s.frame_states) {
    const Mat4 m = rho.matrix();
    CHECK(eig_hermitian(HermitianMatrix(partial_transpose_b(m)), false).min() >= -1e-15);
  }
  // rho is block diagonal with blocks p_xy rho^xy.
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      const ComplexMatrix blk = s.rho.matrix().block(4 * i, 4 * j, 4, 4);
      if (i != j) {
        CHECK(blk.cwiseAbs().maxCoeff() == 0.0);
      } else if (s.probs.at(i / 3, i % 3) > 0.0) {
        const ComplexMatrix expect = s.probs.at(i / 3, i % 3) * s.local_state(i / 3, i % 3).matrix();
        CHECK((blk - expect).cwiseAbs().maxCoeff() <= 1e-15);
      }
    }
}

TEST_CASE("violation: closed form against the 36x36 contraction") {
  const double expected = 2.0 + (2.0 * kRoot2 - 2.0) / 597.0;
  CHECK(std::abs(chsh_closed_form(kCentreWeight) - expected) <= 1e-15);
  CHECK(std::abs(chsh_value(build_state()) - expected) <= 1e-12);
  CHECK(std::abs(chsh_value(build_state(0.0)) - 2.0) <= 1e-12);
  CHECK(std::abs(chsh_value(build_state(1.0)) - 2.0 * kRoot2) <= 1e-12);
  Engine rng = stream_engine(61, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double v = unit(rng);
    CHECK(std::abs(chsh_value(build_state(v)) - chsh_closed_form(v)) <= 1e-12);
  }
}

TEST_CASE("triangle lemma: equality cases and random suite") {
  ComplexVector a = ComplexVector::Zero(2), b = ComplexVector::Zero(2);
  a(0) = 1.0;
  b(1) = 1.0;
  const Mat2 p = projector(a), q = projector(b);
  auto margin = [](const Mat2& r0, const Mat2& r1, const Mat2& s) {
    return std::real(hs_inner(r0, r1)) - (2.0 * (std::real(hs_inner(r0, s)) + std::real(hs_inner(r1, s))) - 3.0);
  };
  CHECK(margin(p, p, p) == 0.0);
  CHECK(margin(p, q, p) == 1.0);

  const LemmaReport r = check_lemma_triangle(2000, 5);
  CHECK(r.violations == 0);
  CHECK(r.worst_slack >= -1e-12);
  CHECK(r.samples == 2000);
  CHECK_THROWS_AS(check_lemma_triangle(0, 5), std::invalid_argument);
}

TEST_CASE("classical-quantum lemma suite") {
  const LemmaReport r = check_lemma_cq_channel(200, 5);
  CHECK(r.violations == 0);
  CHECK(r.worst_slack >= -1e-10);
}

TEST_CASE("spectrum lemma: identity, erasure and random suite") {
  const QubitChannel id = QubitChannel::identity();
  const double lam = min_eigenvalue(stopi::apply(id, Mat2(Mat2::Identity() / 2.0)));
  CHECK(lam == doctest::Approx(0.5));
  CHECK(2.0 * std::sqrt(lam) >= 1.0);
  const QubitChannel er = erasure();
  CHECK(std::abs(min_eigenvalue(stopi::apply(er, Mat2(Mat2::Identity() / 2.0)))) <= 1e-15);
  for (const Mat2& g : {pauli_x<double>(), pauli_y<double>(), pauli_z<double>()}) {
    CHECK(stopi::apply(er, g).cwiseAbs().maxCoeff() <= 1e-15);
  }
  const LemmaReport r = check_lemma_spectrum(500, 5);
  CHECK(r.violations == 0);
  CHECK(r.worst_slack >= -1e-10);
}

TEST_CASE("centre bound") {
  const CentreBound ii = centre_fidelity_bound_check(QubitChannel::identity(), QubitChannel::identity());
  CHECK(ii.lhs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ii.rhs >= 1.0);
  const CentreBound ee = centre_fidelity_bound_check(erasure(), erasure());
  CHECK(ee.lhs <= 0.5 + 1e-15);
  CHECK(ee.lhs <= ee.rhs);
  const LemmaReport r = check_centre_bound(500, 5);
  CHECK(r.violations == 0);
}

TEST_CASE("lemma suites are deterministic and thread independent") {
  const LemmaReport a = check_lemma_spectrum(300, 9, 1);
  const LemmaReport b = check_lemma_spectrum(300, 9, 3);
  CHECK(a.worst_slack == b.worst_slack);
  CHECK(a.worst_sample == b.worst_sample);
  CHECK(a.worst_detail == b.worst_detail);
  const LemmaReport c = check_lemma_triangle(300, 9, 2);
  const LemmaReport d = check_lemma_triangle(300, 9, 1);
  CHECK(c.worst_slack == d.worst_slack);

  std::ostringstream os;
  const std::array<LemmaReport, 2> reps{a, c};
  write_lemma_reports_csv(os, reps);
  CHECK(os.str().rfind("check_name,samples,worst_slack,violations\n", 0) == 0);
}

TEST_CASE("frame diagnostics") {
  const CounterexampleState s = build_state();
  const auto ids = identities();
  const FrameDiagnostics d = frame_diagnostics(s, ids, ids);
  CHECK(std::abs(d.epsilon.at({0, 0})) <= 1e-15);
  CHECK(std::abs(d.epsilon.at({0, 1})) <= 1e-15);
  CHECK(std::abs(d.epsilon.at({2, 2}) - 0.5) <= 1e-15);
  // The weighted decomposition reproduces the direct fidelity.
  const std::vector<QubitChannel> v(ids.begin(), ids.end());
  CHECK(std::abs(d.fidelity - extraction_fidelity(s.rho, phi_plus(), v, v)) <= 1e-14);
}
