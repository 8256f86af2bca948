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

// Operator-inequality certificate for the tilted CHSH family.
//
// For each alpha we look for constants (s, mu) such that
//
//   T(a, b) = K(a, b) - s W(a, b) - mu 1  >= 0
//
// on the whole square of Jordan-block angles, where K is the image of the
// optimal state under the dual extraction channels. s is chosen so that the
// smallest eigenvalue of K - sW at the worst vertex of the square matches the
// one at the point of maximal violation; mu is fixed by the normalisation
// s * beta_Q + mu = 1. grid_scan then evaluates lambda_min(T) on a grid.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "stopi/bell.hpp"
#include "stopi/channels.hpp"
#include "stopi/matcore.hpp"

namespace stopi {

/// Allowed violation of s * beta_Q + mu = 1.
inline constexpr double kNormalizationTolerance = 1e-8;

struct BoundConstants {
  double alpha = 0.0;
  double s = 0.0;
  double mu = 0.0;

  /// Validates s > 0 and the normalisation at beta_Q.
  static BoundConstants make(double alpha, double s, double mu);
};

/// Cached per-alpha data for fast evaluation of K, W and T on fixed-size
/// storage. Immutable after construction.
class CertificateKernel {
 public:
  explicit CertificateKernel(TiltParameter alpha,
                             const DampingProfile& profile = DampingProfile::standard());

  double alpha() const noexcept { return alpha_; }
  double b_star() const noexcept { return effective_.b_star(); }

  Mat4 k_matrix(double a, double b) const;
  Mat4 w_matrix(double a, double b) const { return bell_matrix(alpha_, a, b); }
  Mat4 t_matrix(double a, double b, double s, double mu) const;

  /// lambda_min(K - sW - mu 1) without validation.
  double t_min(double a, double b, double s, double mu) const;

  /// Weights of {1, X, Z} conjugations in the dephasing channel at angle x.
  std::array<double, 3> weights(double x) const;
  std::array<double, 3> bob_weights(double b) const { return weights(effective_(b)); }

  /// K from precomputed weight triples.
  Mat4 k_from_weights(const std::array<double, 3>& wa, const std::array<double, 3>& wb) const;

 private:
  double alpha_;
  DampingProfile profile_;
  EffectiveAngle effective_;
  // (G_i (x) G_j) Phi (G_i (x) G_j) for G in {1, X, Z}, index 3 * i + j.
  std::array<Mat4, 9> conjugated_;
};

class RootNotBracketed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// T = K - sW - mu 1. Throws if consts.alpha differs from alpha.
HermitianMatrix t_operator(TiltParameter alpha, double a, double b, const BoundConstants& consts);

/// The four vertices of the square followed by (pi/4, b*).
std::array<std::pair<double, double>, 5> special_points(TiltParameter alpha);

/// lambda_min(K - sW) at the special points, same order as special_points().
std::array<double, 5> special_point_minima(TiltParameter alpha, double s);

struct SolveDiagnostics {
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  double vertex_value = 0.0;   // min over vertices of lambda_min(K - sW)
  double optimum_value = 0.0;  // lambda_min(K - sW) at (pi/4, b*)
};

/// Equalises the worst vertex with the point of maximal violation by
/// bisection on s, taking the largest root (the one compatible with the
/// normalisation at beta_Q).
BoundConstants solve_constants(TiltParameter alpha, SolveDiagnostics* diag = nullptr);

struct GridSpec {
  double alpha_min = 0.0;
  double alpha_max = 1.999;
  double alpha_step = 0.001;
  int a_points = 100;  // nodes on [0, pi/4], endpoints included
  int b_points = 200;  // nodes on [0, pi/2], endpoints included
  /// If non-empty, used instead of the arithmetic alpha range.
  std::vector<double> alpha_list;

  static GridSpec paper();
  static GridSpec single(double alpha, int a_points, int b_points);

  void validate() const;
  std::vector<double> alphas() const;
  double a_node(int i) const;
  double b_node(int j) const;
};

struct CellMinimum {
  std::size_t alpha_index = 0;
  int a_index = 0;
  int b_index = 0;
  double alpha = 0.0;
  double a = 0.0;
  double b = 0.0;
  double lambda_min = 0.0;
};

struct GridReport {
  double global_min_eigenvalue = 0.0;
  CellMinimum argmin;
  std::vector<CellMinimum> per_alpha_minima;
  std::vector<BoundConstants> constants;
  std::uint64_t cells_evaluated = 0;
  std::vector<CellMinimum> cells;  // only with ScanOptions::full_dump
};

struct ScanOptions {
  unsigned threads = 0;  // 0: resolve_threads()
  bool full_dump = false;
};

/// lambda_min(T) on every cell, using per-alpha solved constants. Only the
/// half a in [0, pi/4] is scanned; the other half is unitarily equivalent.
/// Output is independent of the thread count.
GridReport grid_scan(const GridSpec& spec, const ScanOptions& options = {});

/// CSV: alpha,a_index,b_index,a,b,lambda_min (one row per alpha minimum).
void write_grid_csv(std::ostream& os, const GridReport& report);
/// Same columns, one row per evaluated cell (requires full_dump).
void write_cells_csv(std::ostream& os, const GridReport& report);
/// CSV: alpha,s,mu.
void write_constants_csv(std::ostream& os, const GridReport& report);

}  // namespace stopi
