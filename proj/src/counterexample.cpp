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

#include "stopi/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "stopi/csv.hpp"
#include "stopi/parallel.hpp"
#include "stopi/random.hpp"

namespace stopi {

namespace {

constexpr double kBlockTolerance = 1e-12;
constexpr double kTriangleTolerance = 1e-12;
constexpr double kCqTolerance = 1e-10;
constexpr double kSpectrumTolerance = 1e-10;
constexpr double kCentreTolerance = 1e-12;
constexpr int kRandomObservables = 100;

ComplexMatrix basis_projector(Eigen::Index dim, Eigen::Index k) {
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  p(k, k) = 1.0;
  return p;
}

Mat4 diag4(double d00, double d01, double d10, double d11) {
  Mat4 m = Mat4::Zero();
  m(0, 0) = d00;
  m(1, 1) = d01;
  m(2, 2) = d10;
  m(3, 3) = d11;
  return m;
}

double real_inner(const ComplexMatrix& a, const ComplexMatrix& b) { return std::real(hs_inner(a, b)); }

// Operator norm of a 2x2 Hermitian matrix in closed form.
double op_norm2(const Mat2& m) {
  const double a = std::real(m(0, 0));
  const double d = std::real(m(1, 1));
  const double mean = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
  return std::abs(mean) + rad;
}

double lambda_min_half(const QubitChannel& ch) {
  const Mat2 half = 0.5 * Mat2::Identity();
  return min_eigenvalue(stopi::apply(ch, half));
}

QubitChannel random_channel(Engine& rng) {
  const auto kraus = random_qubit_kraus(rng, 4);
  return QubitChannel::from_kraus(kraus);
}

std::string format_matrix(const ComplexMatrix& m) {
  std::ostringstream os;
  os << '[';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) os << "; ";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << fmt17(m(r, c).real()) << (m(r, c).imag() < 0 ? "" : "+") << fmt17(m(r, c).imag()) << 'i';
    }
  }
  os << ']';
  return os.str();
}

// Margins for every sample, reduced serially in index order; the worst
// sample is regenerated to produce its dump.
template <typename SampleFn, typename DetailFn>
LemmaReport run_suite(const char* name, std::uint64_t samples, double tolerance, unsigned threads,
                      SampleFn&& margin, DetailFn&& detail) {
  if (samples == 0) throw std::invalid_argument(std::string(name) + ": samples must be positive");
  std::vector<double> margins(static_cast<std::size_t>(samples));
  parallel_for(margins.size(), threads, [&](std::size_t i) { margins[i] = margin(i); });
  LemmaReport report;
  report.check_name = name;
  report.samples = samples;
  report.worst_slack = margins[0];
  for (std::size_t i = 0; i < margins.size(); ++i) {
    const double m = std::isnan(margins[i]) ? -std::numeric_limits<double>::infinity() : margins[i];
    if (m < -tolerance) ++report.violations;
    if (m < report.worst_slack || i == 0) {
      report.worst_slack = m;
      report.worst_sample = i;
    }
  }
  report.worst_detail = detail(static_cast<std::size_t>(report.worst_sample));
  return report;
}

}  // namespace

ProbTable ProbTable::make(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("ProbTable: v must lie in [0, 1]");
  ProbTable t;
  t.v = v;
  const double w = 1.0 - v;
  t.p[0][0] = 4.0 / 31.0 * w;
  t.p[0][1] = t.p[1][0] = 3.0 / 62.0 * w;
  t.p[0][2] = t.p[2][0] = t.p[2][2] = 8.0 / 31.0 * w;
  t.p[1][1] = v;
  return t;
}

Mat2 register_observable(int x, int r) {
  if (x < 0 || x > 2 || r < 0 || r > 1) throw std::out_of_range("register_observable: bad index");
  if (r == 0) return pauli_z<double>();
  switch (x) {
    case 0:
      return pauli_z<double>();
    case 1:
      return pauli_x<double>();
    default:
      return -pauli_z<double>();
  }
}

ChshBlockTable ChshBlockTable::build() {
  ChshBlockTable t;
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) {
      const Mat2 a0 = register_observable(x, 0), a1 = register_observable(x, 1);
      const Mat2 b0 = register_observable(y, 0), b1 = register_observable(y, 1);
      t.w[x][y] = tensor(a0, b0) + tensor(a0, b1) + tensor(a1, b0) - tensor(a1, b1);
    }
  }
  return t;
}

ComplexMatrix counterexample_bell_operator() {
  // A_r = sum_x |x><x| (x) A_r^x on the 6-dim party space X (x) A.
  std::array<ComplexMatrix, 2> party;
  for (int r = 0; r < 2; ++r) {
    party[r] = ComplexMatrix::Zero(6, 6);
    for (int x = 0; x < 3; ++x) party[r] += tensor(basis_projector(3, x), ComplexMatrix(register_observable(x, r)));
  }
  const ComplexMatrix w = tensor(party[0], party[0]) + tensor(party[0], party[1]) +
                          tensor(party[1], party[0]) - tensor(party[1], party[1]);
  // (X A) (x) (Y B) -> X (x) Y (x) A (x) B.
  const std::array<Eigen::Index, 4> dims{3, 2, 3, 2};
  const std::array<std::size_t, 4> perm{0, 2, 1, 3};
  return permute_subsystems(w, dims, perm);
}

const DensityMatrix& CounterexampleState::local_state(int x, int y) const {
  if (x == 1 && y == 1) return centre_state;
  const auto it = frame_states.find({x, y});
  if (it == frame_states.end()) {
    throw std::out_of_range("local_state: cell (" + std::to_string(x) + ", " + std::to_string(y) +
                            ") is undefined");
  }
  return it->second;
}

DensityMatrix phi_plus() {
  ComplexVector psi = ComplexVector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::numbers::sqrt2;
  return DensityMatrix(projector(psi));
}

CounterexampleState build_state(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("build_state: v must lie in [0, 1]");
  const ProbTable probs = ProbTable::make(v);

  std::map<Cell, DensityMatrix> frame;
  const Mat4 correlated = diag4(0.5, 0.0, 0.0, 0.5);
  frame.emplace(Cell{0, 0}, DensityMatrix(diag4(0.0, 0.0, 0.0, 1.0)));
  for (const Cell c : {Cell{0, 1}, Cell{1, 0}, Cell{0, 2}, Cell{2, 0}}) frame.emplace(c, DensityMatrix(correlated));
  frame.emplace(Cell{2, 2}, DensityMatrix(diag4(0.0, 0.5, 0.5, 0.0)));

  // Joint +1 eigenspace of the commuting stabilisers whose sum is W^11 / sqrt 2.
  const Mat2 x = pauli_x<double>(), z = pauli_z<double>();
  const Mat4 s1 = tensor(x, Mat2((z - x) / std::numbers::sqrt2));
  const Mat4 s2 = tensor(z, Mat2((x + z) / std::numbers::sqrt2));
  const Mat4 id = Mat4::Identity();
  const Mat4 centre = 0.25 * (id + s1) * (id + s2);

  CounterexampleState state{probs, DensityMatrix(ComplexMatrix::Identity(36, 36) / 36.0), std::move(frame),
                            DensityMatrix(centre)};

  const ChshBlockTable table = ChshBlockTable::build();
  ComplexMatrix rho = ComplexMatrix::Zero(36, 36);
  for (int cx = 0; cx < 3; ++cx) {
    for (int cy = 0; cy < 3; ++cy) {
      const bool defined = !((cx == 1 && cy == 2) || (cx == 2 && cy == 1));
      if (!defined) continue;
      const DensityMatrix& block = state.local_state(cx, cy);
      const double expected = cx == 1 && cy == 1 ? 2.0 * std::numbers::sqrt2 : 2.0;
      const double got = real_inner(table.at(cx, cy), block.matrix());
      if (std::abs(got - expected) > kBlockTolerance) {
        throw std::logic_error("build_state: block (" + std::to_string(cx) + ", " + std::to_string(cy) +
                               ") has CHSH value " + fmt17(got));
      }
      const Eigen::Index offset = 4 * (3 * cx + cy);
      rho.block(offset, offset, 4, 4) = probs.at(cx, cy) * block.matrix();
    }
  }
  state.rho = DensityMatrix(rho);
  return state;
}

double chsh_value(const CounterexampleState& state) {
  return real_inner(counterexample_bell_operator(), state.rho.matrix());
}

double chsh_closed_form(double v) { return 2.0 + (2.0 * std::numbers::sqrt2 - 2.0) * v; }

LemmaReport check_lemma_triangle(std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  struct Triple {
    DensityMatrix r0, r1, s;
  };
  auto draw = [seed](std::size_t i) {
    Engine rng = stream_engine(seed, i);
    const Eigen::Index dim = i % 2 == 0 ? 2 : 4;
    DensityMatrix r0 = random_density(dim, rng);
    DensityMatrix r1 = random_density(dim, rng);
    DensityMatrix s = random_density(dim, rng);
    return Triple{std::move(r0), std::move(r1), std::move(s)};
  };
  auto margin = [](const Triple& t) {
    const double lhs = real_inner(t.r0.matrix(), t.r1.matrix());
    const double rhs = 2.0 * (real_inner(t.r0.matrix(), t.s.matrix()) + real_inner(t.r1.matrix(), t.s.matrix())) - 3.0;
    return lhs - rhs;
  };
  return run_suite(
      "triangle", samples, kTriangleTolerance, threads, [&](std::size_t i) { return margin(draw(i)); },
      [&](std::size_t i) {
        const Triple t = draw(i);
        return "rho0=" + format_matrix(t.r0.matrix()) + " rho1=" + format_matrix(t.r1.matrix()) +
               " sigma=" + format_matrix(t.s.matrix()) + " margin=" + fmt17(margin(t));
      });
}

namespace {

// Kraus operators 2x6 of a random channel C^3 (x) C^2 -> C^2.
std::vector<ComplexMatrix> random_cq_kraus(Engine& rng) {
  constexpr int kEnv = 12;
  const ComplexMatrix v = haar_isometry(2 * kEnv, 6, rng);
  std::vector<ComplexMatrix> kraus(kEnv);
  for (int e = 0; e < kEnv; ++e) kraus[static_cast<std::size_t>(e)] = v.block(2 * e, 0, 2, 6);
  return kraus;
}

double cq_deviation(std::uint64_t seed, std::size_t i, std::string* detail) {
  Engine rng = stream_engine(seed, i);
  const auto kraus = random_cq_kraus(rng);
  // Classical-quantum operator sum_j |j><j| (x) S_j with random weights.
  std::array<ComplexMatrix, 3> blocks;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ComplexMatrix r = ComplexMatrix::Zero(6, 6);
  for (int j = 0; j < 3; ++j) {
    blocks[j] = unit(rng) * random_density(2, rng).matrix();
    r.block(2 * j, 2 * j, 2, 2) = blocks[j];
  }
  ComplexMatrix direct = ComplexMatrix::Zero(2, 2);
  for (const auto& k : kraus) direct += k * r * k.adjoint();

  ComplexMatrix split = ComplexMatrix::Zero(2, 2);
  for (int j = 0; j < 3; ++j) {
    std::vector<Mat2> kj;
    kj.reserve(kraus.size());
    for (const auto& k : kraus) kj.emplace_back(k.block(0, 2 * j, 2, 2));
    const QubitChannel lj = QubitChannel::from_kraus(kj);
    split += stopi::apply(lj, blocks[j]);
  }
  const double dev = (direct - split).cwiseAbs().maxCoeff();
  if (detail) *detail = "direct=" + format_matrix(direct) + " per_symbol=" + format_matrix(split);
  return dev;
}

double spectrum_margin(std::uint64_t seed, std::size_t i, std::string* detail) {
  Engine rng = stream_engine(seed, i);
  const QubitChannel ch = random_channel(rng);
  const double lambda = std::max(0.0, lambda_min_half(ch));
  const double bound = 2.0 * std::sqrt(lambda);
  std::vector<Mat2> gammas{pauli_x<double>(), pauli_y<double>(), pauli_z<double>()};
  for (int k = 0; k < kRandomObservables; ++k) gammas.push_back(random_pauli_observable(rng));
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_k = 0;
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    const double m = bound - op_norm2(stopi::apply(ch, gammas[k]));
    if (m < worst) {
      worst = m;
      worst_k = k;
    }
  }
  if (detail) {
    *detail = "choi=" + format_matrix(ch.choi().matrix()) + " lambda=" + fmt17(lambda) +
              " gamma=" + format_matrix(gammas[worst_k]);
  }
  return worst;
}

}  // namespace

LemmaReport check_lemma_cq_channel(std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  return run_suite(
      "cq_channel", samples, kCqTolerance, threads,
      [&](std::size_t i) { return -cq_deviation(seed, i, nullptr); },
      [&](std::size_t i) {
        std::string d;
        cq_deviation(seed, i, &d);
        return d;
      });
}

LemmaReport check_lemma_spectrum(std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  return run_suite(
      "spectrum", samples, kSpectrumTolerance, threads,
      [&](std::size_t i) { return spectrum_margin(seed, i, nullptr); },
      [&](std::size_t i) {
        std::string d;
        spectrum_margin(seed, i, &d);
        return d;
      });
}

CentreBound centre_fidelity_bound_check(const QubitChannel& alice, const QubitChannel& bob) {
  const DensityMatrix target = phi_plus();
  CentreBound out;
  out.lhs = real_inner(apply_local(alice, bob, target.matrix()), target.matrix());
  out.lambda_a = std::max(0.0, lambda_min_half(alice));
  out.lambda_b = std::max(0.0, lambda_min_half(bob));
  out.rhs = 0.5 + 2.0 * std::sqrt(out.lambda_a * out.lambda_b);
  return out;
}

LemmaReport check_centre_bound(std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  auto draw = [seed](std::size_t i) {
    Engine rng = stream_engine(seed, i);
    QubitChannel a = random_channel(rng);
    QubitChannel b = random_channel(rng);
    return std::pair{std::move(a), std::move(b)};
  };
  return run_suite(
      "centre_bound", samples, kCentreTolerance, threads,
      [&](std::size_t i) {
        const auto [a, b] = draw(i);
        const CentreBound c = centre_fidelity_bound_check(a, b);
        return c.rhs - c.lhs;
      },
      [&](std::size_t i) {
        const auto [a, b] = draw(i);
        const CentreBound c = centre_fidelity_bound_check(a, b);
        return "choi_a=" + format_matrix(a.choi().matrix()) + " choi_b=" + format_matrix(b.choi().matrix()) +
               " lhs=" + fmt17(c.lhs) + " rhs=" + fmt17(c.rhs);
      });
}

FrameDiagnostics frame_diagnostics(const CounterexampleState& state, std::span<const QubitChannel, 3> alice,
                                   std::span<const QubitChannel, 3> bob) {
  const DensityMatrix target = phi_plus();
  const Mat4 phi = target.matrix();
  FrameDiagnostics d;
  const double frame_weight = 1.0 - state.probs.v;
  for (const auto& [cell, rho] : state.frame_states) {
    const auto [x, y] = cell;
    const double f = real_inner(apply_local(alice[x], bob[y], Mat4(rho.matrix())), phi);
    const double eps = 0.5 - f;
    d.epsilon[cell] = eps;
    if (frame_weight > 0.0) d.epsilon_wav += state.probs.at(x, y) / frame_weight * eps;
  }
  d.centre_fidelity = real_inner(apply_local(alice[1], bob[1], Mat4(state.centre_state.matrix())), phi);
  d.fidelity = frame_weight * (0.5 - d.epsilon_wav) + state.probs.v * d.centre_fidelity;
  return d;
}

void write_lemma_reports_csv(std::ostream& os, std::span<const LemmaReport> reports) {
  os << "check_name,samples,worst_slack,violations\n";
  for (const auto& r : reports) {
    os << r.check_name << ',' << r.samples << ',' << fmt17(r.worst_slack) << ',' << r.violations << '\n';
  }
}

}  // namespace stopi
