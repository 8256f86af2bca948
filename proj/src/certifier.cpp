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

#include "stopi/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "stopi/csv.hpp"
#include "stopi/parallel.hpp"

namespace stopi {

BoundConstants BoundConstants::make(double alpha, double s, double mu) {
  const TiltParameter t(alpha);
  if (!(s > 0.0) || !std::isfinite(s) || !std::isfinite(mu)) {
    throw std::invalid_argument("BoundConstants: s must be positive and finite");
  }
  const double norm = s * quantum_value(t) + mu;
  if (std::abs(norm - 1.0) > kNormalizationTolerance) {
    throw std::invalid_argument("BoundConstants: s * beta_Q + mu = " + fmt17(norm) + " != 1");
  }
  return {alpha, s, mu};
}

// ---------------------------------------------------------------------------
// CertificateKernel

CertificateKernel::CertificateKernel(TiltParameter alpha, const DampingProfile& profile)
    : alpha_(alpha.value()), profile_(profile), effective_(EffectiveAngle::for_alpha(alpha)) {
  const Mat4 phi = optimal_state_matrix(alpha_);
  const std::array<Mat2, 3> g{pauli_i(), pauli_x(), pauli_z()};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Mat4 u = tensor(g[i], g[j]);
      conjugated_[3 * i + j] = u * phi * u;
    }
  }
}

std::array<double, 3> CertificateKernel::weights(double x) const {
  const double g = std::clamp(profile_.g(x), 0.0, 1.0);
  std::array<double, 3> w{(1.0 + g) / 2.0, 0.0, 0.0};
  w[dephasing_axis(x) == DephasingAxis::X ? 1 : 2] = (1.0 - g) / 2.0;
  return w;
}

Mat4 CertificateKernel::k_from_weights(const std::array<double, 3>& wa,
                                       const std::array<double, 3>& wb) const {
  Mat4 k = Mat4::Zero();
  for (int i = 0; i < 3; ++i) {
    if (wa[i] == 0.0) continue;
    for (int j = 0; j < 3; ++j) {
      if (wb[j] == 0.0) continue;
      k += (wa[i] * wb[j]) * conjugated_[3 * i + j];
    }
  }
  return k;
}

Mat4 CertificateKernel::k_matrix(double a, double b) const {
  return k_from_weights(weights(a), bob_weights(b));
}

Mat4 CertificateKernel::t_matrix(double a, double b, double s, double mu) const {
  Mat4 t = k_matrix(a, b) - s * w_matrix(a, b);
  t.diagonal().array() -= mu;
  return t;
}

double CertificateKernel::t_min(double a, double b, double s, double mu) const {
  return min_eigenvalue(t_matrix(a, b, s, mu));
}

// ---------------------------------------------------------------------------
// Constants

HermitianMatrix t_operator(TiltParameter alpha, double a, double b, const BoundConstants& consts) {
  if (consts.alpha != alpha.value()) {
    throw std::invalid_argument("t_operator: constants were solved for alpha = " + fmt17(consts.alpha));
  }
  const BellRealization real(alpha, a, b);  // validates the angles
  const CertificateKernel kernel(alpha);
  return HermitianMatrix(kernel.t_matrix(real.a, real.b, consts.s, consts.mu));
}

std::array<std::pair<double, double>, 5> special_points(TiltParameter alpha) {
  return {{{0.0, 0.0},
           {0.0, kHalfPi},
           {kHalfPi, 0.0},
           {kHalfPi, kHalfPi},
           {kQuarterPi, optimal_bob_angle(alpha.value())}}};
}

namespace {

std::array<double, 5> special_minima(const CertificateKernel& kernel, TiltParameter alpha, double s) {
  const auto pts = special_points(alpha);
  std::array<double, 5> out{};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out[i] = kernel.t_min(pts[i].first, pts[i].second, s, 0.0);
  }
  return out;
}

}  // namespace

std::array<double, 5> special_point_minima(TiltParameter alpha, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("special_point_minima: s must be non-negative");
  const CertificateKernel kernel(alpha);
  return special_minima(kernel, alpha, s);
}

BoundConstants solve_constants(TiltParameter alpha, SolveDiagnostics* diag) {
  // Upward expansion cap and downward scan floor for the bracket search.
  constexpr double kInitialHi = 50.0;
  constexpr double kMaxS = 1e15;
  constexpr double kMinS = 1e-3;
  constexpr double kScanFactor = 0.9;
  constexpr double kRelTol = 1e-12;

  const CertificateKernel kernel(alpha);
  double vertex = 0.0, optimum = 0.0;
  auto gap = [&](double s) {
    const auto m = special_minima(kernel, alpha, s);
    vertex = std::min({m[0], m[1], m[2], m[3]});
    optimum = m[4];
    return vertex - optimum;
  };

  // The gap is positive for large s (beta_Q exceeds every vertex eigenvalue
  // of W) and has a spurious small-s root; the relevant root is the largest.
  double hi = kInitialHi;
  while (gap(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > kMaxS) {
      throw RootNotBracketed("solve_constants: no sign change up to s = " + fmt17(kMaxS) +
                             " for alpha = " + fmt17(alpha.value()));
    }
  }
  double lo = hi;
  while (gap(lo) > 0.0) {
    hi = lo;
    lo *= kScanFactor;
    if (lo < kMinS) {
      std::ostringstream msg;
      msg << "solve_constants: gap stays positive down to s = " << fmt17(lo)
          << " for alpha = " << fmt17(alpha.value()) << " (vertex " << fmt17(vertex) << ", optimum "
          << fmt17(optimum) << ")";
      throw RootNotBracketed(msg.str());
    }
  }

  int iterations = 0;
  if (diag) {
    diag->bracket_lo = lo;
    diag->bracket_hi = hi;
  }
  while (hi - lo > kRelTol * hi && iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (gap(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++iterations;
  }
  const double s = 0.5 * (lo + hi);
  gap(s);
  if (diag) {
    diag->iterations = iterations;
    diag->vertex_value = vertex;
    diag->optimum_value = optimum;
  }
  // At the root the minimum at the optimal point is attained by Phi_alpha
  // itself, whose eigenvalue is 1 - s * beta_Q.
  return BoundConstants::make(alpha.value(), s, 1.0 - s * quantum_value(alpha));
}

// ---------------------------------------------------------------------------
// Grid

GridSpec GridSpec::paper() { return GridSpec{}; }

GridSpec GridSpec::single(double alpha, int a_points, int b_points) {
  GridSpec spec;
  spec.alpha_min = alpha;
  spec.alpha_max = alpha;
  spec.alpha_step = 1.0;
  spec.a_points = a_points;
  spec.b_points = b_points;
  return spec;
}

void GridSpec::validate() const {
  if (a_points < 1 || b_points < 1) throw std::invalid_argument("GridSpec: point counts must be positive");
  if (alpha_list.empty()) {
    if (!(alpha_step > 0.0)) throw std::invalid_argument("GridSpec: alpha_step must be positive");
    if (alpha_min > alpha_max) throw std::invalid_argument("GridSpec: alpha_min > alpha_max");
    TiltParameter lo(alpha_min);
    TiltParameter hi(alpha_max);
    (void)lo;
    (void)hi;
  } else {
    for (double a : alpha_list) TiltParameter check(a);
  }
}

std::vector<double> GridSpec::alphas() const {
  if (!alpha_list.empty()) return alpha_list;
  const auto n = static_cast<std::size_t>(std::floor((alpha_max - alpha_min) / alpha_step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = alpha_min + static_cast<double>(k) * alpha_step;
  return out;
}

double GridSpec::a_node(int i) const {
  if (a_points == 1) return 0.0;
  // Endpoints are pinned exactly.
  return i == a_points - 1 ? kQuarterPi : kQuarterPi * i / (a_points - 1);
}

double GridSpec::b_node(int j) const {
  if (b_points == 1) return 0.0;
  return j == b_points - 1 ? kHalfPi : kHalfPi * j / (b_points - 1);
}

namespace {

// Strictly-less comparison in scan order keeps the lowest index on ties.
void consider(CellMinimum& best, const CellMinimum& cand, bool& have) {
  if (!have || cand.lambda_min < best.lambda_min) {
    best = cand;
    have = true;
  }
}

double sanitize(double v) {
  return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}

}  // namespace

GridReport grid_scan(const GridSpec& spec, const ScanOptions& options) {
  spec.validate();
  const std::vector<double> alphas = spec.alphas();
  const std::size_t n_alpha = alphas.size();
  const auto n_a = static_cast<std::size_t>(spec.a_points);
  const auto n_b = static_cast<std::size_t>(spec.b_points);

  GridReport report;
  report.constants.resize(n_alpha);
  parallel_for(n_alpha, options.threads, [&](std::size_t k) {
    report.constants[k] = solve_constants(TiltParameter(alphas[k]));
  });

  std::vector<double> a_nodes(n_a), b_nodes(n_b);
  for (std::size_t i = 0; i < n_a; ++i) a_nodes[i] = spec.a_node(static_cast<int>(i));
  for (std::size_t j = 0; j < n_b; ++j) b_nodes[j] = spec.b_node(static_cast<int>(j));

  if (options.full_dump) report.cells.resize(n_alpha * n_a * n_b);

  // One work item per alpha: each alpha is reduced serially by one worker,
  // so the reduction order never depends on scheduling.
  std::vector<CellMinimum> per_alpha(n_alpha);
  parallel_for(n_alpha, options.threads, [&](std::size_t k) {
    const TiltParameter alpha(alphas[k]);
    const CertificateKernel kernel(alpha);
    const BoundConstants& c = report.constants[k];
    std::vector<std::array<double, 3>> wb(n_b);
    for (std::size_t j = 0; j < n_b; ++j) wb[j] = kernel.bob_weights(b_nodes[j]);

    CellMinimum best;
    bool have = false;
    for (std::size_t i = 0; i < n_a; ++i) {
      const double a = a_nodes[i];
      const auto wa = kernel.weights(a);
      for (std::size_t j = 0; j < n_b; ++j) {
        const double b = b_nodes[j];
        Mat4 t = kernel.k_from_weights(wa, wb[j]) - c.s * kernel.w_matrix(a, b);
        t.diagonal().array() -= c.mu;
        CellMinimum cell{k, static_cast<int>(i), static_cast<int>(j), alphas[k], a, b,
                         sanitize(min_eigenvalue(t))};
        if (options.full_dump) report.cells[(k * n_a + i) * n_b + j] = cell;
        consider(best, cell, have);
      }
    }
    per_alpha[k] = best;
  });

  bool have = false;
  for (const auto& m : per_alpha) consider(report.argmin, m, have);
  report.global_min_eigenvalue = report.argmin.lambda_min;
  report.per_alpha_minima = std::move(per_alpha);
  report.cells_evaluated = static_cast<std::uint64_t>(n_alpha) * n_a * n_b;
  return report;
}

namespace {

void write_cell_rows(std::ostream& os, const std::vector<CellMinimum>& rows) {
  os << "alpha,a_index,b_index,a,b,lambda_min\n";
  for (const auto& r : rows) {
    os << fmt17(r.alpha) << ',' << r.a_index << ',' << r.b_index << ',' << fmt17(r.a) << ','
       << fmt17(r.b) << ',' << fmt17(r.lambda_min) << '\n';
  }
}

}  // namespace

void write_grid_csv(std::ostream& os, const GridReport& report) {
  write_cell_rows(os, report.per_alpha_minima);
}

void write_cells_csv(std::ostream& os, const GridReport& report) { write_cell_rows(os, report.cells); }

void write_constants_csv(std::ostream& os, const GridReport& report) {
  os << "alpha,s,mu\n";
  for (const auto& c : report.constants) os << fmt17(c.alpha) << ',' << fmt17(c.s) << ',' << fmt17(c.mu) << '\n';
}

}  // namespace stopi
