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

#ifndef RSR_REAPER_H_
#define RSR_REAPER_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rsr/data.h"
#include "rsr/geometry.h"
#include "rsr/glad.h"

namespace rsr {

// Symmetric D x D matrix in (or near) the relaxed constraint set
//   H = {P : 0 <= P <= I, tr P = r}.
class RelaxedProjection {
 public:
  enum class Constraint {
    // Eigenvalues in [-1e-9, 1 + 1e-9] and |tr P - r| <= 1e-6.
    kInH,
    // Positive semidefinite (eigenvalues >= -1e-9) and |tr P - r| <= 1e-8;
    // eigenvalues above 1 are allowed. Mirror-descent iterates live here.
    kTraceNormalized,
  };

  // Validates symmetry (1e-10) and the requested constraint; throws
  // std::invalid_argument when violated.
  RelaxedProjection(Eigen::MatrixXd matrix, int r,
                    Constraint constraint = Constraint::kInH);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

 private:
  Eigen::MatrixXd matrix_;
};

// G(P; X) = (1/N) sum_x ||(I - P) x||. Any square P is accepted.
double ReaperValue(const Eigen::MatrixXd& p, const Eigen::MatrixXd& points);

// (1/N) sum over points with ||x - P x|| > tolerance of
//   -((I - P) x x^T + x x^T (I - P)) / (2 ||x - P x||).
Eigen::MatrixXd ReaperSubgradient(const Eigen::MatrixXd& p,
                                  const Eigen::MatrixXd& points,
                                  double tolerance = 1e-12);

struct HProjection {
  RelaxedProjection projection;
  // Water level t: output eigenvalues are clip(a_i - t, 0, 1).
  double shift;
  // Eigenvalues a_i of the input (ascending) and of the output (same order).
  Eigen::VectorXd input_eigenvalues;
  Eigen::VectorXd output_eigenvalues;
};

// Frobenius projection of a symmetric matrix onto H by water-filling: the
// shift t solving sum_i clip(a_i - t, 0, 1) = r is found by bisection on
// [min a - 1, max a] until the residual is <= 1e-10 (at most 200 steps).
HProjection ProjectOntoH(const Eigen::MatrixXd& a, int r);

// Frobenius diameter of H in dimension D.
double HDiameter(int dim, int r);

enum class ReaperSolver { kGradient, kMirror };

struct ReaperConfig {
  int iterations = 1000;
  // eta_k = step0 / sqrt(k), k = 1..T.
  double step0 = 8.0;
  std::optional<int> batch_size;
  double noise_variance = 0.0;
  ReaperSolver solver = ReaperSolver::kGradient;
  // Eigenvalues are raised to this floor before the matrix logarithm.
  double eig_floor = 1e-12;
  double residual_tolerance = 1e-12;
  uint64_t seed = 0;
  bool record_objective = true;
  bool record_time = false;

  void Validate() const;
};

struct ReaperResult {
  // (1/T) sum_{k=1..T} P_k; for the mirror path this is the raw average and
  // may leave H.
  Eigen::MatrixXd averaged;
  // Principal r-subspace of ProjectOntoH(averaged).
  SpectralSubspace principal;
  // Record k describes the running average of P_1..P_k (record 0: P_0).
  std::vector<IterationRecord> records;
  // Iterations whose matrix logarithm needed the eigenvalue floor.
  std::vector<int> floored_iterations;
};

// dp-(S)GD-REAP (solver = kGradient) and dp-(S)MD-REAP (solver = kMirror).
// P_0 = A^T A with A_ij ~ N(1, 0.01), made feasible by ProjectOntoH (GD) or
// trace renormalization (MD). Each step perturbs the (minibatch) subgradient
// with SymmetricNoise; GD then projects onto H, MD applies
// exp(log P - eta g) followed by P <- r P / tr P.
ReaperResult RunReaper(const LabeledDataset& data, int r,
                       const ReaperConfig& cfg);

// Top-r eigenvectors of P.
SpectralSubspace PrincipalSubspace(const Eigen::MatrixXd& p, int r);

}  // namespace rsr

#endif  // RSR_REAPER_H_
