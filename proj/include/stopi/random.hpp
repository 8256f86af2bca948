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

// Haar-distributed samplers. Every parallel consumer derives an independent
// engine per work item with stream_engine(seed, index), so results depend on
// the seed only, never on scheduling.

#include <cstdint>
#include <random>
#include <vector>

#include "stopi/matcore.hpp"

namespace stopi {

using Engine = std::mt19937_64;

/// SplitMix64 finaliser; used to decorrelate per-stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

inline Engine stream_engine(std::uint64_t seed, std::uint64_t stream) {
  return Engine(mix_seed(seed, stream));
}

/// rows x cols matrix of i.i.d. standard complex Gaussians.
ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Engine& rng);

/// Haar-random isometry C^cols -> C^rows (rows >= cols): V^dagger V = 1.
ComplexMatrix haar_isometry(Eigen::Index rows, Eigen::Index cols, Engine& rng);

inline ComplexMatrix haar_unitary(Eigen::Index dim, Engine& rng) {
  return haar_isometry(dim, dim, rng);
}

ComplexVector haar_pure_state(Eigen::Index dim, Engine& rng);

/// Reduced state of a Haar-random pure state on dim x dim (full-rank
/// generically, covers the whole state space).
DensityMatrix random_density(Eigen::Index dim, Engine& rng);

/// Kraus operators of a random qubit channel from a Haar isometry
/// C^2 -> C^env (x) C^2.
std::vector<Mat2> random_qubit_kraus(Engine& rng, int env_dim = 4);

/// Random 2x2 Hermitian Gamma with Gamma^2 = 1 and tr Gamma = 0, i.e. n.sigma
/// for a uniformly random unit vector n.
Mat2 random_pauli_observable(Engine& rng);

}  // namespace stopi
