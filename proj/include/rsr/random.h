// Copyright 2026 The RSR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RSR_RANDOM_H_
#define RSR_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Dense>

namespace rsr {

// Every stochastic routine takes its generator explicitly; there is no global
// random state.
using Rng = std::mt19937_64;

// Mixes a master seed with a path of indices (cell, repetition, batch, ...)
// through splitmix64. Distinct paths give statistically independent streams.
uint64_t DeriveSeed(uint64_t master, std::initializer_list<uint64_t> path);

// Matrix with i.i.d. N(mean, stddev^2) entries, filled column-major.
Eigen::MatrixXd GaussianMatrix(int rows, int cols, double mean, double stddev,
                               Rng& rng);

// Uniformly random D x r orthonormal frame (orthonormalized Gaussian matrix).
Eigen::MatrixXd RandomOrthonormalFrame(int rows, int cols, Rng& rng);

// Symmetric D x D matrix whose upper triangle (with diagonal) is i.i.d.
// N(0, sigma2), mirrored below the diagonal. Exactly zero when sigma2 = 0.
Eigen::MatrixXd SymmetricNoise(int dim, double sigma2, Rng& rng);

}  // namespace rsr

#endif  // RSR_RANDOM_H_
