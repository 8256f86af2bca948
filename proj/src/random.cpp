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

#include "stopi/random.hpp"

#include <array>
#include <cmath>

namespace stopi {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Engine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = {re, im};
    }
  }
  return g;
}

ComplexMatrix haar_isometry(Eigen::Index rows, Eigen::Index cols, Engine& rng) {
  if (rows < cols) throw std::invalid_argument("haar_isometry: rows < cols");
  const ComplexMatrix g = ginibre(rows, cols, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
  // Fix the phase ambiguity of QR so the distribution is exactly Haar.
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < cols; ++k) {
    const auto d = r(k, k);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(k) *= d / mag;
  }
  return q;
}

ComplexVector haar_pure_state(Eigen::Index dim, Engine& rng) {
  ComplexVector v = ginibre(dim, 1, rng);
  v.normalize();
  return v;
}

DensityMatrix random_density(Eigen::Index dim, Engine& rng) {
  const ComplexVector psi = haar_pure_state(dim * dim, rng);
  // Reshape: psi = sum_{ij} c_ij |i>|j>, reduced state = C C^dagger.
  ComplexMatrix c(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) c(i, j) = psi(i * dim + j);
  }
  ComplexMatrix rho = c * c.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

std::vector<Mat2> random_qubit_kraus(Engine& rng, int env_dim) {
  if (env_dim < 1) throw std::invalid_argument("random_qubit_kraus: env_dim < 1");
  const ComplexMatrix v = haar_isometry(2 * env_dim, 2, rng);
  std::vector<Mat2> kraus(static_cast<std::size_t>(env_dim));
  for (int e = 0; e < env_dim; ++e) kraus[static_cast<std::size_t>(e)] = v.block(2 * e, 0, 2, 2);
  return kraus;
}

Mat2 random_pauli_observable(Engine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<double, 3> n{normal(rng), normal(rng), normal(rng)};
  const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  return (n[0] / len) * pauli_x() + (n[1] / len) * pauli_y() + (n[2] / len) * pauli_z();
}

}  // namespace stopi
