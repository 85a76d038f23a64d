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

#include "rsr/random.h"

#include <cmath>
#include <stdexcept>

namespace rsr {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

uint64_t DeriveSeed(uint64_t master, std::initializer_list<uint64_t> path) {
  uint64_t state = SplitMix64(master);
  for (uint64_t index : path) state = SplitMix64(state ^ SplitMix64(index + 1));
  return state;
}

Eigen::MatrixXd GaussianMatrix(int rows, int cols, double mean, double stddev,
                               Rng& rng) {
  std::normal_distribution<double> normal(mean, stddev);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

Eigen::MatrixXd RandomOrthonormalFrame(int rows, int cols, Rng& rng) {
  const Eigen::MatrixXd g = GaussianMatrix(rows, cols, 0.0, 1.0, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  // Fix column signs so the frame is Haar distributed.
  const Eigen::MatrixXd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (int j = 0; j < cols; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

Eigen::MatrixXd SymmetricNoise(int dim, double sigma2, Rng& rng) {
  if (!(sigma2 >= 0)) throw std::invalid_argument("noise variance must be >= 0");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  if (sigma2 == 0) return m;
  std::normal_distribution<double> normal(0.0, std::sqrt(sigma2));
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i <= j; ++i) {
      m(i, j) = normal(rng);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

}  // namespace rsr
