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

// A CHSH-violating state with singlet extractability 1/2.
//
// Each party holds a classical trit (X or Y) and a qubit (A or B). The state
//
//   rho = sum_{xy} p_xy |x><x| (x) |y><y| (x) rho^xy
//
// is stored on X (x) Y (x) A (x) B (dims 3, 3, 2, 2). The eight "frame" cells
// carry classically correlated two-qubit states reaching value 2 on their
// block of the CHSH operator; the "centre" (1, 1) carries a maximally
// entangled state reaching 2 sqrt 2. The lemma checkers test the three
// auxiliary inequalities used to show that no local channels beat 1/2.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stopi/channels.hpp"
#include "stopi/matcore.hpp"

namespace stopi {

/// Centre weight for which the extractability stays at 1/2.
inline constexpr double kCentreWeight = 1.0 / 597.0;

using Cell = std::pair<int, int>;  // (x, y)

struct ProbTable {
  std::array<std::array<double, 3>, 3> p{};
  double v = 0.0;

  /// p00 = 4/31 (1-v), p01 = p10 = 3/62 (1-v), p02 = p20 = p22 = 8/31 (1-v),
  /// p11 = v, p12 = p21 = 0.
  static ProbTable make(double v);
  double at(int x, int y) const { return p[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)]; }
};

/// Alice's (and Bob's) observable A_r restricted to classical value x:
/// A_0 = Z for every x; A_1 = Z, X, -Z for x = 0, 1, 2.
Mat2 register_observable(int x, int r);

/// The nine two-qubit blocks W^xy of the CHSH operator.
struct ChshBlockTable {
  std::array<std::array<Mat4, 3>, 3> w;

  static ChshBlockTable build();
  const Mat4& at(int x, int y) const { return w[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)]; }
};

/// Full 36x36 CHSH operator on X (x) Y (x) A (x) B, assembled from the
/// register-controlled observables on (X A) (x) (Y B) and reordered.
ComplexMatrix counterexample_bell_operator();

struct CounterexampleState {
  ProbTable probs;
  DensityMatrix rho;                       // 36x36
  std::map<Cell, DensityMatrix> frame_states;  // six cells with p > 0 outside the centre
  DensityMatrix centre_state;

  /// Normalised two-qubit state at (x, y); throws for undefined cells.
  const DensityMatrix& local_state(int x, int y) const;
};

/// Frame states are computational-basis mixtures; the centre is the
/// 2 sqrt 2 eigenstate of W^11. Verifies <W^xy, rho^xy> at construction.
CounterexampleState build_state(double v = kCentreWeight);

/// <W, rho> by direct 36x36 contraction.
double chsh_value(const CounterexampleState& state);

/// 2 + (2 sqrt 2 - 2) v.
double chsh_closed_form(double v);

/// Maximally entangled target (|00> + |11>)/sqrt 2.
DensityMatrix phi_plus();

struct LemmaReport {
  std::string check_name;
  std::uint64_t samples = 0;
  double worst_slack = 0.0;  // min over samples of (rhs - lhs); negative = violated
  std::uint64_t violations = 0;
  std::uint64_t worst_sample = 0;
  std::string worst_detail;  // human-readable dump of the worst sample
};

/// <r0, r1> >= 2(<r0, s> + <r1, s>) - 3 on random density matrices of
/// dims 2 and 4 (alternating). Tolerance 1e-12.
LemmaReport check_lemma_triangle(std::uint64_t samples, std::uint64_t seed, unsigned threads = 0);

/// For random channels on C^3 (x) C^2 -> C^2, the per-symbol channels
/// L_j(X) = L(|j><j| (x) X) reproduce L on classical-quantum inputs.
/// worst_slack is minus the largest deviation; tolerance 1e-10.
LemmaReport check_lemma_cq_channel(std::uint64_t samples, std::uint64_t seed, unsigned threads = 0);

/// ||L(G)|| <= 2 sqrt(lambda) with lambda = lambda_min(L(1/2)), for X, Y, Z
/// and 100 random traceless involutions per random channel. Tolerance 1e-10.
LemmaReport check_lemma_spectrum(std::uint64_t samples, std::uint64_t seed, unsigned threads = 0);

struct CentreBound {
  double lhs = 0.0;       // <(L_A (x) L_B)(Phi+), Phi+>
  double rhs = 0.0;       // 1/2 + 2 sqrt(lambda_A lambda_B)
  double lambda_a = 0.0;  // lambda_min(L_A(1/2))
  double lambda_b = 0.0;
};

/// Splits Phi+ = tau + (XX + ZZ)/4 with tau separable and bounds the two
/// correlation terms through the spectrum lemma.
CentreBound centre_fidelity_bound_check(const QubitChannel& alice, const QubitChannel& bob);

/// centre_fidelity_bound_check on random channel pairs. Tolerance 1e-12.
LemmaReport check_centre_bound(std::uint64_t samples, std::uint64_t seed, unsigned threads = 0);

struct FrameDiagnostics {
  std::map<Cell, double> epsilon;  // 1/2 - <(L^x (x) L^y)(rho^xy), Phi+>
  double epsilon_wav = 0.0;        // sum p_xy / (1 - v) * epsilon_xy
  double centre_fidelity = 0.0;    // <(L^1 (x) L^1)(centre), Phi+>
  double fidelity = 0.0;           // (1 - v)(1/2 - epsilon_wav) + v * centre
};

/// Per-symbol channels alice[x], bob[y] applied to the state.
FrameDiagnostics frame_diagnostics(const CounterexampleState& state,
                                   std::span<const QubitChannel, 3> alice,
                                   std::span<const QubitChannel, 3> bob);

/// check_name,samples,worst_slack,violations
void write_lemma_reports_csv(std::ostream& os, std::span<const LemmaReport> reports);

}  // namespace stopi
