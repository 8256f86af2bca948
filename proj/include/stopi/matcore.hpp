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

// Dense complex linear algebra for small operators (2, 4, ..., 64 dims).
//
// Matrices are plain Eigen types templated on the real scalar. Free
// functions accept arbitrary Eigen expressions, so fixed-size 2x2/4x4
// operands stay on the stack. The strong types Hermitian<S> and Density<S>
// carry validated invariants; everything else is value-semantic Eigen.
//
// Subsystem ordering is row-major: in tensor(A, B) the indices of A are the
// outer (slow) ones.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace stopi {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using CMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using CVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using RVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix2c = Eigen::Matrix<Complex<Scalar>, 2, 2>;

template <typename Scalar>
using Matrix4c = Eigen::Matrix<Complex<Scalar>, 4, 4>;

using ComplexMatrix = CMatrix<double>;
using ComplexVector = CVector<double>;
using Mat2 = Matrix2c<double>;
using Mat4 = Matrix4c<double>;

/// Absolute tolerance for accepting a matrix as Hermitian.
inline constexpr double kHermitianTolerance = 1e-12;
/// Tolerance on trace and negative eigenvalues of a density matrix.
inline constexpr double kStateTolerance = 1e-10;
/// Jacobi stops once the off-diagonal Frobenius norm falls below this
/// fraction of the input's Frobenius norm.
inline constexpr double kJacobiOffDiagonalTolerance = 1e-14;

inline constexpr Eigen::Index kMaxDimension = 64;

// ---------------------------------------------------------------------------
// Paulis

template <typename Scalar = double>
Matrix2c<Scalar> pauli_i() {
  return Matrix2c<Scalar>::Identity();
}

template <typename Scalar = double>
Matrix2c<Scalar> pauli_x() {
  Matrix2c<Scalar> m;
  m << Scalar(0), Scalar(1), Scalar(1), Scalar(0);
  return m;
}

template <typename Scalar = double>
Matrix2c<Scalar> pauli_y() {
  Matrix2c<Scalar> m;
  m << Scalar(0), Complex<Scalar>(0, -1), Complex<Scalar>(0, 1), Scalar(0);
  return m;
}

template <typename Scalar = double>
Matrix2c<Scalar> pauli_z() {
  Matrix2c<Scalar> m;
  m << Scalar(1), Scalar(0), Scalar(0), Scalar(-1);
  return m;
}

// ---------------------------------------------------------------------------
// Elementary operations

namespace detail {

constexpr int kron_size(int a, int b) {
  return (a == Eigen::Dynamic || b == Eigen::Dynamic) ? Eigen::Dynamic : a * b;
}

template <typename A, typename B>
using KronResult =
    Eigen::Matrix<typename A::Scalar, kron_size(A::RowsAtCompileTime, B::RowsAtCompileTime),
                  kron_size(A::ColsAtCompileTime, B::ColsAtCompileTime)>;

}  // namespace detail

/// Kronecker product, A's indices outer.
template <typename DerivedA, typename DerivedB>
detail::KronResult<DerivedA, DerivedB> tensor(const Eigen::MatrixBase<DerivedA>& a,
                                              const Eigen::MatrixBase<DerivedB>& b) {
  detail::KronResult<DerivedA, DerivedB> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Hilbert-Schmidt inner product tr(A^dagger B).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar hs_inner(const Eigen::MatrixBase<DerivedA>& a,
                                   const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("hs_inner: dimension mismatch");
  }
  return a.conjugate().cwiseProduct(b).sum();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto z = m(i, j);
      if (!std::isfinite(std::real(z)) || !std::isfinite(std::imag(z))) return false;
    }
  }
  return true;
}

/// Largest absolute row sum.
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real inf_norm(
    const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi for Hermitian matrices

namespace detail {

struct NoVectors {};

// Diagonalises `a` in place by complex Jacobi rotations. When `v` is a
// matrix it accumulates the rotations (v <- v U), so on return
// input = v * diag(a) * v^dagger. Returns the number of sweeps.
template <typename MatA, typename MatV>
int jacobi_in_place(MatA& a, MatV& v) {
  using CS = typename MatA::Scalar;
  using Scalar = typename Eigen::NumTraits<CS>::Real;
  constexpr bool kWithVectors = !std::is_same_v<MatV, NoVectors>;
  constexpr int kMaxSweeps = 64;

  const Eigen::Index n = a.rows();
  const Scalar scale = a.norm();
  if (n < 2 || scale == Scalar(0)) return 0;
  const Scalar threshold = Scalar(kJacobiOffDiagonalTolerance) * scale;

  auto off_norm = [&] {
    Scalar acc(0);
    for (Eigen::Index q = 1; q < n; ++q) {
      for (Eigen::Index p = 0; p < q; ++p) acc += std::norm(a(p, q));
    }
    return std::sqrt(Scalar(2) * acc);
  };

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_norm() <= threshold) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const CS apq = a(p, q);
        const Scalar g = std::abs(apq);
        if (g == Scalar(0)) continue;
        const CS phase = apq / g;
        const Scalar app = std::real(a(p, p));
        const Scalar aqq = std::real(a(q, q));
        const Scalar theta = (aqq - app) / (Scalar(2) * g);
        Scalar t;
        if (std::abs(theta) > Scalar(1e150)) {
          t = Scalar(0.5) / theta;
        } else {
          t = Scalar(1) / (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
          if (theta < Scalar(0)) t = -t;
        }
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        const CS cphase = std::conj(phase);

        // a <- a U, U = [[c, s], [-s conj(phase), c conj(phase)]] on (p, q).
        for (Eigen::Index k = 0; k < n; ++k) {
          const CS akp = a(k, p);
          const CS akq = a(k, q);
          a(k, p) = c * akp - s * cphase * akq;
          a(k, q) = s * akp + c * cphase * akq;
        }
        // a <- U^dagger a
        for (Eigen::Index k = 0; k < n; ++k) {
          const CS apk = a(p, k);
          const CS aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = CS(0);
        a(q, p) = CS(0);
        a(p, p) = CS(app - t * g);
        a(q, q) = CS(aqq + t * g);

        if constexpr (kWithVectors) {
          for (Eigen::Index k = 0; k < n; ++k) {
            const CS vkp = v(k, p);
            const CS vkq = v(k, q);
            v(k, p) = c * vkp - s * cphase * vkq;
            v(k, q) = s * vkp + c * cphase * vkq;
          }
        }
      }
    }
  }
  return sweep;
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& m, const char* who) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(who) + ": matrix not square");
  if (!all_finite(m)) throw std::invalid_argument(std::string(who) + ": non-finite entries");
  const auto dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > kHermitianTolerance) {
    throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian (deviation " +
                                std::to_string(dev) + ")");
  }
}

}  // namespace detail

/// Smallest eigenvalue of a Hermitian matrix given by any Eigen expression.
/// No validation; this is the inner kernel of the grid scans.
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real min_eigenvalue(
    const Eigen::MatrixBase<Derived>& m) {
  typename Derived::PlainObject a = m;
  detail::NoVectors none;
  detail::jacobi_in_place(a, none);
  return a.diagonal().real().minCoeff();
}

/// Eigenvalues of a Hermitian matrix (ascending). No validation.
template <typename Derived>
Eigen::Matrix<typename Eigen::NumTraits<typename Derived::Scalar>::Real, Derived::RowsAtCompileTime, 1>
eigenvalues_unchecked(const Eigen::MatrixBase<Derived>& m) {
  typename Derived::PlainObject a = m;
  detail::NoVectors none;
  detail::jacobi_in_place(a, none);
  Eigen::Matrix<typename Eigen::NumTraits<typename Derived::Scalar>::Real, Derived::RowsAtCompileTime, 1>
      ev = a.diagonal().real();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

// ---------------------------------------------------------------------------
// Strong types

template <typename Scalar>
struct Spectrum {
  RVector<Scalar> values;                 // ascending
  std::optional<CMatrix<Scalar>> vectors;  // columns match `values`

  Scalar min() const { return values(0); }
  Scalar max() const { return values(values.size() - 1); }
};

/// Square complex matrix equal to its adjoint. Inputs within
/// kHermitianTolerance of Hermitian are symmetrised, others rejected.
template <typename Scalar>
class Hermitian {
 public:
  using Matrix = CMatrix<Scalar>;

  template <typename Derived>
  explicit Hermitian(const Eigen::MatrixBase<Derived>& m) {
    detail::require_hermitian(m, "Hermitian");
    if (m.rows() > kMaxDimension) throw std::invalid_argument("Hermitian: dimension exceeds 64");
    if (m.rows() == 0) throw std::invalid_argument("Hermitian: empty matrix");
    m_ = Scalar(0.5) * (m + m.adjoint());
  }

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  Matrix m_;
};

using HermitianMatrix = Hermitian<double>;

/// Cyclic Jacobi eigendecomposition. Deterministic for identical input bits.
template <typename Scalar>
Spectrum<Scalar> eig_hermitian(const Hermitian<Scalar>& h, bool with_vectors = true) {
  CMatrix<Scalar> a = h.matrix();
  const Eigen::Index n = a.rows();
  Spectrum<Scalar> out;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (with_vectors) {
    CMatrix<Scalar> v = CMatrix<Scalar>::Identity(n, n);
    detail::jacobi_in_place(a, v);
    const RVector<Scalar> d = a.diagonal().real();
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return d(i) < d(j); });
    out.values.resize(n);
    CMatrix<Scalar> sorted(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      out.values(k) = d(order[k]);
      sorted.col(k) = v.col(order[k]);
    }
    out.vectors = std::move(sorted);
  } else {
    detail::NoVectors none;
    detail::jacobi_in_place(a, none);
    const RVector<Scalar> d = a.diagonal().real();
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return d(i) < d(j); });
    out.values.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) out.values(k) = d(order[k]);
  }
  return out;
}

/// Hermitian, unit trace, positive semidefinite (within kStateTolerance).
template <typename Scalar>
class Density {
 public:
  using Matrix = CMatrix<Scalar>;

  template <typename Derived>
  explicit Density(const Eigen::MatrixBase<Derived>& m) : h_(m) {
    const Scalar tr = std::real(h_.matrix().trace());
    if (std::abs(tr - Scalar(1)) > Scalar(kStateTolerance)) {
      throw std::invalid_argument("Density: trace " + std::to_string(tr) + " != 1");
    }
    const Scalar lo = eig_hermitian(h_, false).min();
    if (lo < -Scalar(kStateTolerance)) {
      throw std::invalid_argument("Density: negative eigenvalue " + std::to_string(lo));
    }
  }

  explicit Density(const Hermitian<Scalar>& h) : Density(h.matrix()) {}

  const Matrix& matrix() const noexcept { return h_.matrix(); }
  const Hermitian<Scalar>& hermitian() const noexcept { return h_; }
  Eigen::Index dim() const noexcept { return h_.dim(); }

  Scalar purity() const { return std::real(hs_inner(matrix(), matrix())); }

 private:
  Hermitian<Scalar> h_;
};

using DensityMatrix = Density<double>;

/// |psi><psi| for a (normalised) state vector.
template <typename Derived>
CMatrix<typename Eigen::NumTraits<typename Derived::Scalar>::Real> projector(
    const Eigen::MatrixBase<Derived>& psi) {
  return psi * psi.adjoint();
}

// ---------------------------------------------------------------------------
// Subsystem manipulation

namespace detail {

inline Eigen::Index checked_product(std::span<const Eigen::Index> dims) {
  Eigen::Index total = 1;
  for (auto d : dims) {
    if (d <= 0) throw std::invalid_argument("subsystem dimensions must be positive");
    total *= d;
  }
  return total;
}

// Mixed-radix digits of `index` with dims[0] the most significant.
inline void digits(Eigen::Index index, std::span<const Eigen::Index> dims,
                   std::vector<Eigen::Index>& out) {
  out.resize(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = index % dims[k];
    index /= dims[k];
  }
}

}  // namespace detail

/// Partial trace keeping the subsystems listed in `keep` (in their original
/// relative order). Subsystem 0 is the outermost tensor factor.
template <typename Derived>
CMatrix<typename Eigen::NumTraits<typename Derived::Scalar>::Real> partial_trace(
    const Eigen::MatrixBase<Derived>& m, std::span<const Eigen::Index> dims,
    std::span<const std::size_t> keep) {
  using Scalar = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const Eigen::Index total = detail::checked_product(dims);
  if (m.rows() != total || m.cols() != total) {
    throw std::invalid_argument("partial_trace: subsystem dims do not match matrix");
  }
  std::vector<bool> kept(dims.size(), false);
  for (auto k : keep) {
    if (k >= dims.size() || kept[k]) throw std::invalid_argument("partial_trace: bad keep set");
    kept[k] = true;
  }
  Eigen::Index keep_dim = 1;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (kept[k]) keep_dim *= dims[k];
  }

  // For every full index: its kept-part index and traced-part index.
  std::vector<Eigen::Index> kept_idx(static_cast<std::size_t>(total));
  std::vector<Eigen::Index> traced_idx(static_cast<std::size_t>(total));
  std::vector<Eigen::Index> dg;
  for (Eigen::Index i = 0; i < total; ++i) {
    detail::digits(i, dims, dg);
    Eigen::Index ki = 0, ti = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (kept[k]) {
        ki = ki * dims[k] + dg[k];
      } else {
        ti = ti * dims[k] + dg[k];
      }
    }
    kept_idx[static_cast<std::size_t>(i)] = ki;
    traced_idx[static_cast<std::size_t>(i)] = ti;
  }

  CMatrix<Scalar> out = CMatrix<Scalar>::Zero(keep_dim, keep_dim);
  for (Eigen::Index c = 0; c < total; ++c) {
    for (Eigen::Index r = 0; r < total; ++r) {
      if (traced_idx[static_cast<std::size_t>(r)] == traced_idx[static_cast<std::size_t>(c)]) {
        out(kept_idx[static_cast<std::size_t>(r)], kept_idx[static_cast<std::size_t>(c)]) += m(r, c);
      }
    }
  }
  return out;
}

/// Reorders tensor factors: output factor k is input factor perm[k].
template <typename Derived>
CMatrix<typename Eigen::NumTraits<typename Derived::Scalar>::Real> permute_subsystems(
    const Eigen::MatrixBase<Derived>& m, std::span<const Eigen::Index> dims,
    std::span<const std::size_t> perm) {
  using Scalar = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const Eigen::Index total = detail::checked_product(dims);
  if (m.rows() != total || m.cols() != total || perm.size() != dims.size()) {
    throw std::invalid_argument("permute_subsystems: inconsistent dims");
  }
  std::vector<bool> seen(dims.size(), false);
  for (auto p : perm) {
    if (p >= dims.size() || seen[p]) throw std::invalid_argument("permute_subsystems: bad permutation");
    seen[p] = true;
  }
  std::vector<Eigen::Index> new_dims(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) new_dims[k] = dims[perm[k]];

  std::vector<Eigen::Index> map(static_cast<std::size_t>(total));
  std::vector<Eigen::Index> dg;
  for (Eigen::Index i = 0; i < total; ++i) {
    detail::digits(i, dims, dg);
    Eigen::Index j = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) j = j * new_dims[k] + dg[perm[k]];
    map[static_cast<std::size_t>(i)] = j;
  }
  CMatrix<Scalar> out(total, total);
  for (Eigen::Index c = 0; c < total; ++c) {
    for (Eigen::Index r = 0; r < total; ++r) {
      out(map[static_cast<std::size_t>(r)], map[static_cast<std::size_t>(c)]) = m(r, c);
    }
  }
  return out;
}

/// Fidelity against a pure state; for pure phi this equals the Uhlmann
/// fidelity and reduces to <rho, phi>.
template <typename Scalar>
Scalar fidelity_with_pure(const Density<Scalar>& rho, const Density<Scalar>& phi) {
  if (rho.dim() != phi.dim()) throw std::invalid_argument("fidelity_with_pure: dimension mismatch");
  if (std::abs(phi.purity() - Scalar(1)) > Scalar(kStateTolerance)) {
    throw std::invalid_argument("fidelity_with_pure: target state is not pure");
  }
  return std::real(hs_inner(rho.matrix(), phi.matrix()));
}

}  // namespace stopi
