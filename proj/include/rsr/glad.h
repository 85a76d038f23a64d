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

#ifndef RSR_GLAD_H_
#define RSR_GLAD_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rsr/data.h"
#include "rsr/geometry.h"
#include "rsr/random.h"

namespace rsr {

// Least absolute deviations energy F(V; X) = (1/|X|) sum_x ||(I - V V^T) x||.
// `points` holds one observation per row.
double GladValue(const SubspaceBasis& basis, const Eigen::MatrixXd& points);

// Riemannian gradient of GladValue:
//   -(1/|X|) Q_V sum_x x x^T V / ||Q_V x||,
// skipping points whose residual norm is <= `tolerance`. The leading minus
// sign makes this the ascent direction of F, so V - eta * grad descends.
TangentVector GladGradient(const SubspaceBasis& basis,
                           const Eigen::MatrixXd& points,
                           double tolerance = 1e-12);

// Row indices drawn uniformly with replacement.
std::vector<int> SampleIndices(int population, int batch_size, Rng& rng);

// B rows of `points` drawn uniformly with replacement.
Eigen::MatrixXd SampleMinibatch(const Eigen::MatrixXd& points, int batch_size,
                                Rng& rng);

// D x r matrix of i.i.d. N(0, sigma2) entries; exactly zero when sigma2 = 0.
Eigen::MatrixXd NoiseSample(int rows, int cols, double sigma2, Rng& rng);

enum class ScheduleKind { kConstant, kPowerLaw, kHalving };

// Step size eta_k for the update from iterate k to k + 1 (k = 0, 1, ...).
struct StepSchedule {
  ScheduleKind kind = ScheduleKind::kHalving;
  // Constant step, or the first step of the halving schedule.
  double initial = 1.0;
  // Halving: eta_k = initial / 2^floor(k / period).
  int period = 50;
  // Power law: eta_k = c1 * a / T^nu, constant over a run of T iterations.
  double c1 = 1.0;
  double a = 1.0;
  double nu = 0.75;
  // Multiplies every step; restart stages scale it by 1/2 per stage.
  double scale = 1.0;

  static StepSchedule Constant(double step);
  static StepSchedule Halving(double initial, int period = 50);
  static StepSchedule PowerLaw(double c1, double a, double nu);

  double StepAt(int k, int total_iterations) const;
  // Throws std::invalid_argument on a malformed schedule.
  void Validate() const;
};

struct GladConfig {
  int iterations = 1000;
  StepSchedule schedule;
  // Absent: full gradient. Present: minibatch of this size with replacement.
  std::optional<int> batch_size;
  // Per-entry variance of the Gaussian gradient perturbation.
  double noise_variance = 0.0;
  double residual_tolerance = 1e-12;
  uint64_t seed = 0;
  // Full-data objective per iterate; NaN in the records when disabled.
  bool record_objective = true;
  // Wall time per iterate; NaN in the records when disabled.
  bool record_time = false;

  void Validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double dr2 = 0.0;
  double dist2 = 0.0;
  double objective = 0.0;
  double seconds = 0.0;
};

struct Trajectory {
  std::vector<IterationRecord> records;
  SubspaceBasis final_basis;
  // Iteration index at which each stage starts (a single 0 for plain runs).
  std::vector<int> stage_starts;
};

// Writes `iter,dr2,dist2,objective,seconds` rows.
void SaveTrajectoryCsv(const std::vector<IterationRecord>& records,
                       const std::string& path);

// V_{k+1} = ProjectStiefel(V_k - eta_k (G_k + B_k)). G_k is the full gradient,
// or a minibatch gradient when cfg.batch_size is set; B_k is Gaussian noise
// with variance cfg.noise_variance. Errors are measured against
// `data.truth` when present (NaN otherwise). Throws DegenerateInputError
// naming the iteration and step size if the retraction collapses.
Trajectory RunGlad(const LabeledDataset& data, const SubspaceBasis& initial,
                   const GladConfig& cfg);

// Runs one stage per entry of `stage_iterations`, stage l with its step sizes
// scaled by 1/2^(l-1), each warm-started from the previous final iterate.
// Stage 1 uses cfg.seed; later stages derive their seeds from it.
Trajectory RestartRun(const LabeledDataset& data, const SubspaceBasis& initial,
                      const GladConfig& cfg,
                      const std::vector<int>& stage_iterations);

// Top-r eigenvectors of sum_x x x^T.
SpectralSubspace PcaInit(const Eigen::MatrixXd& points, int r);

// Gaussian-mechanism standard deviation for (1/N) sum x x^T with unit-norm
// rows: (2 / (N eps)) sqrt(2 ln(1.25 / delta)).
double DpPcaNoiseStddev(int n, double epsilon, double delta);

// Top-r eigenvectors of (1/N) sum x x^T + E with E = SymmetricNoise at the
// DpPcaNoiseStddev level. Throws std::invalid_argument for eps <= 0 or delta
// outside (0, 1).
SpectralSubspace DpPcaInit(const Eigen::MatrixXd& points, int r, double epsilon,
                           double delta, Rng& rng);

}  // namespace rsr

#endif  // RSR_GLAD_H_
