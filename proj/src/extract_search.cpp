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

#include "stopi/extract_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "stopi/bounds.hpp"
#include "stopi/csv.hpp"
#include "stopi/parallel.hpp"
#include "stopi/random.hpp"

namespace stopi {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Relative determinant below which M is treated as rank deficient.
constexpr double kRankFloor = 1e-24;
// Minimum gain for accepting a move; keeps sweeps from chasing round-off.
constexpr double kMinGain = 1e-15;
constexpr double kSandwichLow = 1e-6;
constexpr double kSandwichHigh = 1e-9;

// (P^{1/2})^{-1} for a 2x2 positive definite P, via sqrt(P) = (P + s 1)/t.
bool inverse_sqrt(const Mat2& p, Mat2& out) {
  const double tr = std::real(p.trace());
  const double det = std::real(p(0, 0) * p(1, 1) - p(0, 1) * p(1, 0));
  if (!(tr > 0.0) || !(det > kRankFloor * tr * tr)) return false;
  const double s = std::sqrt(det);
  const double t = std::sqrt(tr + 2.0 * s);
  const Mat2 q = (p + s * Mat2::Identity()) / t;
  // det(q) = s.
  Mat2 adj;
  adj << q(1, 1), -q(0, 1), -q(1, 0), q(0, 0);
  out = adj / s;
  return true;
}

// Top eigenvector of a pure target, reshaped as phi(a, b).
Mat2 target_amplitudes(const DensityMatrix& target) {
  if (target.dim() != 4) throw std::invalid_argument("extraction target must be a two-qubit state");
  if (std::abs(target.purity() - 1.0) > kStateTolerance) {
    throw std::invalid_argument("extraction target must be pure");
  }
  const auto spec = eig_hermitian(target.hermitian(), true);
  const ComplexVector v = spec.vectors->col(3);
  Mat2 m;
  m << v(0), v(1), v(2), v(3);
  return m;
}

struct Problem {
  int arity_a;
  int arity_b;
  Mat2 phi;                    // target amplitudes
  std::vector<Mat4> blocks;    // unnormalised rho^{xy}, index arity_b * x + y

  const Mat4& block(int x, int y) const { return blocks[static_cast<std::size_t>(arity_b * x + y)]; }
};

Problem make_problem(const DensityMatrix& rho, const DensityMatrix& target, int arity_a, int arity_b) {
  if (arity_a < 1 || arity_b < 1) throw std::invalid_argument("register arity must be positive");
  if (rho.dim() != 4 * arity_a * arity_b) {
    throw std::invalid_argument("rho dimension " + std::to_string(rho.dim()) + " does not factor as " +
                                std::to_string(arity_a) + " x " + std::to_string(arity_b) + " x 2 x 2");
  }
  Problem p{arity_a, arity_b, target_amplitudes(target), {}};
  p.blocks.reserve(static_cast<std::size_t>(arity_a * arity_b));
  for (int x = 0; x < arity_a; ++x) {
    for (int y = 0; y < arity_b; ++y) {
      const Eigen::Index off = 4 * (arity_b * x + y);
      p.blocks.emplace_back(rho.matrix().block(off, off, 4, 4));
    }
  }
  return p;
}

Mat4 as_vector_outer(const Mat2& u) {
  Eigen::Matrix<Complex<double>, 4, 1> v;
  v << u(0, 0), u(0, 1), u(1, 0), u(1, 1);
  return v * v.adjoint();
}

// (1 (x) L)(m) and (L (x) 1)(m) for Kraus sets.
Mat4 apply_second(const std::vector<Mat2>& kraus, const Mat4& m) {
  Mat4 out = Mat4::Zero();
  for (const auto& k : kraus) {
    const Mat4 op = tensor(Mat2::Identity().eval(), k);
    out += op * m * op.adjoint();
  }
  return out;
}

Mat4 apply_first(const std::vector<Mat2>& kraus, const Mat4& m) {
  Mat4 out = Mat4::Zero();
  for (const auto& k : kraus) {
    const Mat4 op = tensor(k, Mat2::Identity().eval());
    out += op * m * op.adjoint();
  }
  return out;
}

double quad(const Mat2& u, const Mat4& sigma) {
  Eigen::Matrix<Complex<double>, 4, 1> v;
  v << u(0, 0), u(0, 1), u(1, 0), u(1, 1);
  return std::real(v.dot(sigma * v));
}

// <(K (x) 1) sigma (K (x) 1)^dagger, phi> summed over Kraus operators.
double alice_term(const std::vector<Mat2>& kraus, const Mat2& phi, const Mat4& sigma) {
  if (kraus.empty()) return kNegInf;
  double f = 0.0;
  for (const auto& k : kraus) f += quad(k.adjoint() * phi, sigma);
  return f;
}

double bob_term(const std::vector<Mat2>& kraus, const Mat2& phi, const Mat4& tau) {
  if (kraus.empty()) return kNegInf;
  double f = 0.0;
  for (const auto& k : kraus) f += quad(phi * k.conjugate(), tau);
  return f;
}

struct RestartOutcome {
  double value = kNegInf;
  std::vector<std::vector<double>> alice;
  std::vector<std::vector<double>> bob;
};

// Coordinate pattern search on one channel's parameters against a fixed
// partner-processed block.
template <typename Term>
bool improve_channel(const ChannelParametrization& par, std::vector<double>& params, std::vector<Mat2>& kraus,
                     double& current, double step, Term&& term) {
  bool moved = false;
  for (std::size_t c = 0; c < params.size(); ++c) {
    for (const double dir : {1.0, -1.0}) {
      const double saved = params[c];
      params[c] = saved + dir * step;
      auto trial = par.kraus(params);
      const double val = term(trial);
      if (val > current + kMinGain) {
        current = val;
        kraus = std::move(trial);
        moved = true;
        break;
      }
      params[c] = saved;
    }
  }
  return moved;
}

RestartOutcome run_restart(const Problem& prob, const SearchConfig& cfg, std::size_t restart) {
  const ChannelParametrization par(cfg.kraus_count);
  Engine rng = stream_engine(cfg.seed, restart);
  RestartOutcome out;
  std::vector<std::vector<Mat2>> ka, kb;
  for (int x = 0; x < prob.arity_a; ++x) {
    out.alice.push_back(par.encode(haar_isometry(2 * cfg.kraus_count, 2, rng)));
    ka.push_back(par.kraus(out.alice.back()));
  }
  for (int y = 0; y < prob.arity_b; ++y) {
    out.bob.push_back(par.encode(haar_isometry(2 * cfg.kraus_count, 2, rng)));
    kb.push_back(par.kraus(out.bob.back()));
  }

  double step = cfg.initial_step;
  double value = kNegInf;
  for (int sweep = 0; sweep < cfg.max_iters; ++sweep) {
    bool moved = false;
    // Alice: sigma_x = sum_y (1 (x) L_B^y)(rho^xy).
    for (int x = 0; x < prob.arity_a; ++x) {
      Mat4 sigma = Mat4::Zero();
      for (int y = 0; y < prob.arity_b; ++y) sigma += apply_second(kb[static_cast<std::size_t>(y)], prob.block(x, y));
      auto term = [&](const std::vector<Mat2>& k) { return alice_term(k, prob.phi, sigma); };
      double cur = term(ka[static_cast<std::size_t>(x)]);
      moved |= improve_channel(par, out.alice[static_cast<std::size_t>(x)], ka[static_cast<std::size_t>(x)], cur,
                               step, term);
    }
    // Bob: tau_y = sum_x (L_A^x (x) 1)(rho^xy).
    value = 0.0;
    for (int y = 0; y < prob.arity_b; ++y) {
      Mat4 tau = Mat4::Zero();
      for (int x = 0; x < prob.arity_a; ++x) tau += apply_first(ka[static_cast<std::size_t>(x)], prob.block(x, y));
      auto term = [&](const std::vector<Mat2>& k) { return bob_term(k, prob.phi, tau); };
      double cur = term(kb[static_cast<std::size_t>(y)]);
      moved |= improve_channel(par, out.bob[static_cast<std::size_t>(y)], kb[static_cast<std::size_t>(y)], cur, step,
                               term);
      value += cur;
    }
    if (!moved) {
      step *= 0.5;
      if (step < cfg.step_tol) break;
    }
  }
  out.value = value;
  return out;
}

}  // namespace

ChannelParametrization::ChannelParametrization(int kraus_count) : kraus_count_(kraus_count) {
  if (kraus_count < 1 || kraus_count > 4) {
    throw std::invalid_argument("ChannelParametrization: kraus_count must lie in 1..4");
  }
}

std::vector<Mat2> ChannelParametrization::kraus(const std::vector<double>& params) const {
  if (params.size() != parameter_count()) throw std::invalid_argument("ChannelParametrization: wrong parameter count");
  const int rows = 2 * kraus_count_;
  const std::size_t half = parameter_count() / 2;
  std::vector<Mat2> m(static_cast<std::size_t>(kraus_count_));
  for (int c = 0; c < 2; ++c) {
    for (int r = 0; r < rows; ++r) {
      const std::size_t idx = static_cast<std::size_t>(c * rows + r);
      m[static_cast<std::size_t>(r / 2)](r % 2, c) = {params[idx], params[half + idx]};
    }
  }
  Mat2 p = Mat2::Zero();
  for (const auto& mi : m) p += mi.adjoint() * mi;
  Mat2 inv;
  if (!inverse_sqrt(p, inv)) return {};
  for (auto& mi : m) mi = mi * inv;
  return m;
}

QubitChannel ChannelParametrization::channel(const std::vector<double>& params) const {
  const auto k = kraus(params);
  if (k.empty()) throw std::domain_error("ChannelParametrization: rank-deficient parameters");
  return QubitChannel::from_kraus(k);
}

std::vector<double> ChannelParametrization::encode(const ComplexMatrix& isometry) const {
  const int rows = 2 * kraus_count_;
  if (isometry.rows() != rows || isometry.cols() != 2) {
    throw std::invalid_argument("ChannelParametrization: isometry must be 2k x 2");
  }
  const std::size_t half = parameter_count() / 2;
  std::vector<double> p(parameter_count());
  for (int c = 0; c < 2; ++c) {
    for (int r = 0; r < rows; ++r) {
      const std::size_t idx = static_cast<std::size_t>(c * rows + r);
      p[idx] = isometry(r, c).real();
      p[half + idx] = isometry(r, c).imag();
    }
  }
  return p;
}

void SearchConfig::validate() const {
  if (restarts < 1) throw std::invalid_argument("SearchConfig: restarts must be at least 1");
  if (max_iters < 1) throw std::invalid_argument("SearchConfig: max_iters must be at least 1");
  if (!(step_tol > 0.0) || !(initial_step > step_tol)) {
    throw std::invalid_argument("SearchConfig: need 0 < step_tol < initial_step");
  }
  ChannelParametrization check(kraus_count);
  (void)check;
}

ExtractionResult extractability_lower_bound(const DensityMatrix& rho, const DensityMatrix& target, int arity_a,
                                            int arity_b, const SearchConfig& cfg) {
  cfg.validate();
  const Problem prob = make_problem(rho, target, arity_a, arity_b);
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t r) { outcomes[r] = run_restart(prob, cfg, r); });

  ExtractionResult res;
  res.restart_values.reserve(outcomes.size());
  std::size_t best = 0;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    res.restart_values.push_back(outcomes[r].value);
    if (outcomes[r].value > outcomes[best].value) best = r;
  }
  res.best_restart = static_cast<int>(best);
  res.value = outcomes[best].value;
  const ChannelParametrization par(cfg.kraus_count);
  for (const auto& p : outcomes[best].alice) res.alice.push_back(par.channel(p));
  for (const auto& p : outcomes[best].bob) res.bob.push_back(par.channel(p));
  return res;
}

double extraction_fidelity(const DensityMatrix& rho, const DensityMatrix& target,
                           const std::vector<QubitChannel>& alice, const std::vector<QubitChannel>& bob) {
  const int arity_a = static_cast<int>(alice.size());
  const int arity_b = static_cast<int>(bob.size());
  const Problem prob = make_problem(rho, target, arity_a, arity_b);
  const Mat4 t = target.matrix();
  double f = 0.0;
  for (int x = 0; x < arity_a; ++x) {
    for (int y = 0; y < arity_b; ++y) {
      f += std::real(hs_inner(apply_local(alice[static_cast<std::size_t>(x)], bob[static_cast<std::size_t>(y)],
                                          prob.block(x, y)),
                              t));
    }
  }
  return f;
}

namespace {

double mixture_weight(TiltParameter alpha, double beta) {
  const double bc = classical_value(alpha);
  const double bq = quantum_value(alpha);
  if (!std::isfinite(beta) || beta < bc - kBetaSlack || beta > bq + kBetaSlack) {
    throw std::domain_error("mixture_state: beta outside [beta_C, beta_Q]");
  }
  return std::clamp((beta - bc) / (bq - bc), 0.0, 1.0);
}

Mat4 classical_block() {
  Mat4 m = Mat4::Zero();
  m(1, 1) = 1.0;  // |01>
  return m;
}

}  // namespace

DensityMatrix mixture_state(TiltParameter alpha, double beta) {
  const double p = mixture_weight(alpha, beta);
  ComplexMatrix rho = ComplexMatrix::Zero(16, 16);
  rho.block(0, 0, 4, 4) = p * optimal_state_matrix(alpha.value());
  rho.block(12, 12, 4, 4) = (1.0 - p) * classical_block();
  return DensityMatrix(rho);
}

double mixture_violation(TiltParameter alpha, double beta) {
  const DensityMatrix rho = mixture_state(alpha, beta);
  const auto [a, b] = optimal_angles(alpha);
  const double on = std::real(hs_inner(bell_matrix(alpha.value(), a, b), Mat4(rho.matrix().block(0, 0, 4, 4))));
  const double off =
      std::real(hs_inner(bell_matrix(alpha.value(), kHalfPi, kHalfPi), Mat4(rho.matrix().block(12, 12, 4, 4))));
  return on + off;
}

std::vector<ProfileRow> violation_vs_extractability_profile(TiltParameter alpha, const std::vector<double>& betas,
                                                            const SearchConfig& cfg) {
  const BoundFunction bound = BoundFunction::for_alpha(alpha);
  const DensityMatrix target(optimal_state_matrix(alpha.value()));
  std::vector<ProfileRow> rows;
  rows.reserve(betas.size());
  for (const double beta : betas) {
    ProfileRow row;
    row.beta = beta;
    row.search_lb = extractability_lower_bound(mixture_state(alpha, beta), target, 2, 2, cfg).value;
    row.cert_bound = bound.f_nd(beta);
    row.upper_bound = upper_bound(beta, bound.lambda0_sq(), bound.beta_c(), bound.beta_q());
    row.consistent =
        row.search_lb >= row.cert_bound - kSandwichLow && row.search_lb <= row.upper_bound + kSandwichHigh;
    rows.push_back(row);
  }
  return rows;
}

void write_profile_csv(std::ostream& os, const std::vector<ProfileRow>& rows) {
  os << "beta,search_lb,cert_bound,upper_bound\n";
  for (const auto& r : rows) {
    os << fmt17(r.beta) << ',' << fmt17(r.search_lb) << ',' << fmt17(r.cert_bound) << ',' << fmt17(r.upper_bound)
       << '\n';
  }
}

}  // namespace stopi
