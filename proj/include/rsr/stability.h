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

#ifndef RSR_STABILITY_H_
#define RSR_STABILITY_H_

#include <cstdint>

#include <Eigen/Dense>

#include "rsr/data.h"
#include "rsr/geometry.h"

namespace rsr {

// lambda_r((1/N) sum_{x in inliers} x x^T / ||x||), clamped at 0. N is the
// size of the whole dataset, not the inlier count. Rows of `inliers` are
// points; an empty matrix gives 0.
double Permeance(const Eigen::MatrixXd& inliers, int dim, int n_total, int r);

// Multistart random-direction ascent used for the alignment lower bound.
struct AlignmentSearch {
  int restarts = 8;
  int iterations = 200;
  uint64_t seed = 0;
};

struct AlignmentBounds {
  // Best sigma_1 found by the search: a lower bound on the maximum.
  double lower = 0.0;
  // sum_{x in outliers} ||x|| / N, which bounds every summand's spectral norm.
  double upper = 0.0;
};

// sigma_1((1/N) Q_V sum_{x in outliers} x x^T V / ||Q_V x||).
double AlignmentAt(const SubspaceBasis& basis, const Eigen::MatrixXd& outliers,
                   int n_total);

// Brackets max_V AlignmentAt(V) over all D x r semiorthogonal V.
AlignmentBounds Alignment(const Eigen::MatrixXd& outliers, int dim, int n_total,
                          int r, const AlignmentSearch& search = {});

struct StabilityReport {
  double gamma = 0.0;
  double permeance = 0.0;
  double alignment_lower = 0.0;
  double alignment_upper = 0.0;
  // gamma * permeance - alignment_upper (certifies stability when > 0).
  double stability_lower = 0.0;
  // gamma * permeance - alignment_lower (rules it out when <= 0).
  double stability_upper = 0.0;
  // Fewer than r inliers: the permeance is 0 by rank deficiency.
  bool permeance_rank_deficient = false;
};

// S_gamma(X) = gamma P(X_in) - A(X_out) as a bracket. Needs labels and
// gamma in (0, 1].
StabilityReport StabilityGlad(const LabeledDataset& data, int r, double gamma,
                              const AlignmentSearch& search = {});

// 2 sin(arccos gamma) lambda_r(X_in X_in^T) - ||X_out||_2^2 with unnormalized
// Gram matrices. Positive values certify d_r^2(PCA, truth) < gamma.
double StabilityPca(const LabeledDataset& data, int r, double gamma);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Mean of gamma * Permeance(batch inliers, N = B) - (outlier share of the
// batch) over `samples` minibatches of size B drawn with replacement. Batch i
// uses the seed DeriveSeed(seed, {i}).
MonteCarloEstimate StabilityExpected(const LabeledDataset& data, int r,
                                     double gamma, int batch_size, int samples,
                                     uint64_t seed);

struct ReaperStabilityReport {
  double permeance = 0.0;
  double alignment = 0.0;
  // permeance / (4 sqrt(r)) - alignment.
  double stability = 0.0;
};

// Permeance inf_{u in L_star, |u| = 1} (1/N) sum_in |u^T P_star x|, alignment
// (1/N) ||X_out|| ||normalized Q_star X_out|| (spectral norms), and their
// stability tradeoff. Needs labels and truth. For r = 2 the infimum is exact:
// between consecutive kinks (u orthogonal to an inlier) the objective is a
// positive cosine arc, so the minimum sits on a kink.
ReaperStabilityReport ReaperStats(const LabeledDataset& data);

}  // namespace rsr

#endif  // RSR_STABILITY_H_
