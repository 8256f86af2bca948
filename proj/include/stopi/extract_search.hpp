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

// Heuristic search for local channels that maximise the fidelity of
// (L_A (x) L_B)(rho) with a pure two-qubit target.
//
// Inputs live on X (x) Y (x) A (x) B where X, Y are classical registers of
// sizes arity_a, arity_b and A, B are qubits. Each party applies one qubit
// channel per register value, so every returned value is achieved by an
// explicit feasible channel tuple and is a lower bound on the extractability.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "stopi/bell.hpp"
#include "stopi/channels.hpp"
#include "stopi/matcore.hpp"

namespace stopi {

/// Allowed deviation from sum K_i^dagger K_i = 1.
inline constexpr double kCompletenessTolerance = 1e-10;

/// Isometry C^2 -> C^{2k} from an unconstrained complex (2k x 2) matrix M,
/// V = M (M^dagger M)^{-1/2}. Parameters are the real parts of M followed by
/// the imaginary parts (column-major). Kraus operator i is rows 2i, 2i+1.
class ChannelParametrization {
 public:
  explicit ChannelParametrization(int kraus_count);

  int kraus_count() const noexcept { return kraus_count_; }
  std::size_t parameter_count() const noexcept { return static_cast<std::size_t>(8 * kraus_count_); }

  /// Kraus operators, or an empty vector if M is (numerically) rank deficient.
  std::vector<Mat2> kraus(const std::vector<double>& params) const;
  QubitChannel channel(const std::vector<double>& params) const;

  /// Parameters of the given isometry (2k x 2).
  std::vector<double> encode(const ComplexMatrix& isometry) const;

 private:
  int kraus_count_;
};

struct SearchConfig {
  int restarts = 64;
  std::uint64_t seed = 1;
  int max_iters = 4000;        // sweeps per restart
  double step_tol = 1e-6;      // stop once the step drops below this
  double initial_step = 0.25;
  int kraus_count = 2;         // extremal qubit channels need at most two
  unsigned threads = 0;

  void validate() const;
};

struct ExtractionResult {
  double value = 0.0;
  int best_restart = 0;
  std::vector<double> restart_values;
  std::vector<QubitChannel> alice;  // one per register value
  std::vector<QubitChannel> bob;
};

/// Best fidelity over restarts. rho must be (arity_a * arity_b * 4)-dim on
/// X (x) Y (x) A (x) B and target a pure two-qubit state.
ExtractionResult extractability_lower_bound(const DensityMatrix& rho, const DensityMatrix& target,
                                            int arity_a, int arity_b, const SearchConfig& cfg);

/// Fidelity of the per-symbol channel tuple, evaluated by applying the
/// channels to every register block.
double extraction_fidelity(const DensityMatrix& rho, const DensityMatrix& target,
                           const std::vector<QubitChannel>& alice, const std::vector<QubitChannel>& bob);

/// p |00><00| (x) Phi_alpha + (1 - p) |11><11| (x) |01><01| on X Y A B with
/// p = (beta - beta_C) / (beta_Q - beta_C). The second block reaches beta_C
/// with a = b = pi/2.
DensityMatrix mixture_state(TiltParameter alpha, double beta);

/// Register-controlled Bell value of mixture_state(alpha, beta).
double mixture_violation(TiltParameter alpha, double beta);

struct ProfileRow {
  double beta = 0.0;
  double search_lb = 0.0;
  double cert_bound = 0.0;  // f_nd(beta)
  double upper_bound = 0.0;
  bool consistent = false;  // f_nd - 1e-6 <= search_lb <= upper + 1e-9
};

/// Search lower bound on the mixture state against Phi_alpha, next to the
/// certified bound and the mixture upper bound.
std::vector<ProfileRow> violation_vs_extractability_profile(TiltParameter alpha,
                                                            const std::vector<double>& betas,
                                                            const SearchConfig& cfg);

/// Header `beta,search_lb,cert_bound,upper_bound`.
void write_profile_csv(std::ostream& os, const std::vector<ProfileRow>& rows);

}  // namespace stopi
