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

#include "rsr/glad.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

namespace rsr {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void CheckPoints(const SubspaceBasis& basis, const Eigen::MatrixXd& points) {
  if (points.rows() == 0) throw std::invalid_argument("empty dataset");
  if (points.cols() != basis.ambient_dim()) {
    throw std::invalid_argument("point dimension " + std::to_string(points.cols()) +
                                " does not match basis dimension " +
                                std::to_string(basis.ambient_dim()));
  }
}

IterationRecord Record(int iteration, const SubspaceBasis& v,
                       const LabeledDataset& data, const GladConfig& cfg,
                       double seconds) {
  IterationRecord rec;
  rec.iteration = iteration;
  rec.dr2 = data.truth ? Dr2(v, *data.truth) : kNaN;
  rec.dist2 = data.truth ? GrassmannDist2(v, *data.truth) : kNaN;
  rec.objective = cfg.record_objective ? GladValue(v, data.points) : kNaN;
  rec.seconds = cfg.record_time ? seconds : kNaN;
  return rec;
}

}  // namespace

double GladValue(const SubspaceBasis& basis, const Eigen::MatrixXd& points) {
  CheckPoints(basis, points);
  const Eigen::MatrixXd& v = basis.matrix();
  const Eigen::MatrixXd residual = points - (points * v) * v.transpose();
  return residual.rowwise().norm().mean();
}

TangentVector GladGradient(const SubspaceBasis& basis,
                           const Eigen::MatrixXd& points, double tolerance) {
  CheckPoints(basis, points);
  const Eigen::MatrixXd& v = basis.matrix();
  const Eigen::MatrixXd coords = points * v;
  const Eigen::MatrixXd residual = points - coords * v.transpose();
  Eigen::VectorXd weights = residual.rowwise().norm();
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    weights(i) = weights(i) > tolerance ? 1.0 / weights(i) : 0.0;
  }
  const double scale = -1.0 / static_cast<double>(points.rows());
  return {scale * (residual.transpose() * weights.asDiagonal() * coords)};
}

std::vector<int> SampleIndices(int population, int batch_size, Rng& rng) {
  if (population < 1 || batch_size < 1) {
    throw std::invalid_argument("minibatch needs population >= 1 and B >= 1");
  }
  std::uniform_int_distribution<int> pick(0, population - 1);
  std::vector<int> idx(batch_size);
  for (int& i : idx) i = pick(rng);
  return idx;
}

Eigen::MatrixXd SampleMinibatch(const Eigen::MatrixXd& points, int batch_size,
                                Rng& rng) {
  const auto idx =
      SampleIndices(static_cast<int>(points.rows()), batch_size, rng);
  Eigen::MatrixXd batch(batch_size, points.cols());
  for (int k = 0; k < batch_size; ++k) batch.row(k) = points.row(idx[k]);
  return batch;
}

Eigen::MatrixXd NoiseSample(int rows, int cols, double sigma2, Rng& rng) {
  if (!(sigma2 >= 0)) throw std::invalid_argument("noise variance must be >= 0");
  if (sigma2 == 0) return Eigen::MatrixXd::Zero(rows, cols);
  return GaussianMatrix(rows, cols, 0.0, std::sqrt(sigma2), rng);
}

StepSchedule StepSchedule::Constant(double step) {
  StepSchedule s;
  s.kind = ScheduleKind::kConstant;
  s.initial = step;
  return s;
}

StepSchedule StepSchedule::Halving(double initial, int period) {
  StepSchedule s;
  s.kind = ScheduleKind::kHalving;
  s.initial = initial;
  s.period = period;
  return s;
}

StepSchedule StepSchedule::PowerLaw(double c1, double a, double nu) {
  StepSchedule s;
  s.kind = ScheduleKind::kPowerLaw;
  s.c1 = c1;
  s.a = a;
  s.nu = nu;
  return s;
}

double StepSchedule::StepAt(int k, int total_iterations) const {
  switch (kind) {
    case ScheduleKind::kConstant:
      return scale * initial;
    case ScheduleKind::kHalving:
      return scale * std::ldexp(initial, -(k / period));
    case ScheduleKind::kPowerLaw:
      return scale * c1 * a /
             std::pow(static_cast<double>(std::max(total_iterations, 1)), nu);
  }
  return 0.0;
}

void StepSchedule::Validate() const {
  if (!(scale > 0)) throw std::invalid_argument("schedule scale must be positive");
  switch (kind) {
    case ScheduleKind::kConstant:
      if (!(initial >= 0)) throw std::invalid_argument("constant step must be >= 0");
      break;
    case ScheduleKind::kHalving:
      if (!(initial >= 0)) throw std::invalid_argument("initial step must be >= 0");
      if (period < 1) throw std::invalid_argument("halving period must be >= 1");
      break;
    case ScheduleKind::kPowerLaw:
      if (!(nu > 0.5 && nu < 1)) {
        throw std::invalid_argument("power-law exponent nu must lie in (0.5, 1)");
      }
      if (!(c1 > 0) || !(a > 0)) {
        throw std::invalid_argument("power-law constants must be positive");
      }
      break;
  }
}

void GladConfig::Validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  schedule.Validate();
  if (batch_size && *batch_size < 1) {
    throw std::invalid_argument("batch size must be >= 1");
  }
  if (!(noise_variance >= 0)) {
    throw std::invalid_argument("noise variance must be >= 0");
  }
}

void SaveTrajectoryCsv(const std::vector<IterationRecord>& records,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iter,dr2,dist2,objective,seconds\n";
  for (const auto& rec : records) {
    out << rec.iteration << ',' << FormatDouble(rec.dr2) << ','
        << FormatDouble(rec.dist2) << ',' << FormatDouble(rec.objective) << ','
        << FormatDouble(rec.seconds) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

Trajectory RunGlad(const LabeledDataset& data, const SubspaceBasis& initial,
                   const GladConfig& cfg) {
  cfg.Validate();
  CheckPoints(initial, data.points);
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  Rng rng(cfg.seed);
  const int d = initial.ambient_dim();
  const int r = initial.rank();
  SubspaceBasis v = initial;
  std::vector<IterationRecord> records;
  records.reserve(cfg.iterations + 1);
  records.push_back(Record(0, v, data, cfg, elapsed()));

  for (int k = 0; k < cfg.iterations; ++k) {
    TangentVector step = cfg.batch_size
        ? GladGradient(v, SampleMinibatch(data.points, *cfg.batch_size, rng),
                       cfg.residual_tolerance)
        : GladGradient(v, data.points, cfg.residual_tolerance);
    if (cfg.noise_variance > 0) {
      step.matrix += NoiseSample(d, r, cfg.noise_variance, rng);
    }
    const double eta = cfg.schedule.StepAt(k, cfg.iterations);
    try {
      v = RetractStep(v, step, eta);
    } catch (const DegenerateInputError& e) {
      throw DegenerateInputError("iteration " + std::to_string(k + 1) +
                                 " with step size " + FormatDouble(eta) + ": " +
                                 e.what());
    }
    records.push_back(Record(k + 1, v, data, cfg, elapsed()));
  }
  return {std::move(records), std::move(v), {0}};
}

Trajectory RestartRun(const LabeledDataset& data, const SubspaceBasis& initial,
                      const GladConfig& cfg,
                      const std::vector<int>& stage_iterations) {
  if (stage_iterations.empty()) {
    throw std::invalid_argument("restart run needs at least one stage");
  }
  std::vector<IterationRecord> records;
  std::vector<int> stage_starts;
  SubspaceBasis v = initial;
  int offset = 0;
  double time_offset = 0.0;
  for (size_t l = 0; l < stage_iterations.size(); ++l) {
    GladConfig stage = cfg;
    stage.iterations = stage_iterations[l];
    stage.schedule.scale = cfg.schedule.scale * std::ldexp(1.0, -static_cast<int>(l));
    if (l > 0) stage.seed = DeriveSeed(cfg.seed, {l});
    Trajectory t = RunGlad(data, v, stage);
    stage_starts.push_back(offset);
    for (size_t i = (l == 0 ? 0 : 1); i < t.records.size(); ++i) {
      IterationRecord rec = t.records[i];
      rec.iteration += offset;
      rec.seconds += time_offset;
      records.push_back(rec);
    }
    offset += stage.iterations;
    if (cfg.record_time) time_offset = records.back().seconds;
    v = std::move(t.final_basis);
  }
  return {std::move(records), std::move(v), std::move(stage_starts)};
}

SpectralSubspace PcaInit(const Eigen::MatrixXd& points, int r) {
  if (points.rows() < r) {
    throw std::invalid_argument("PCA needs at least r points");
  }
  return TopEigenspace(points.transpose() * points, r);
}

double DpPcaNoiseStddev(int n, double epsilon, double delta) {
  if (n < 1) throw std::invalid_argument("dp-PCA needs N >= 1");
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
  return (2.0 / (n * epsilon)) * std::sqrt(2.0 * std::log(1.25 / delta));
}

SpectralSubspace DpPcaInit(const Eigen::MatrixXd& points, int r, double epsilon,
                           double delta, Rng& rng) {
  const int n = static_cast<int>(points.rows());
  const double sigma = DpPcaNoiseStddev(n, epsilon, delta);
  if (n < r) throw std::invalid_argument("PCA needs at least r points");
  Eigen::MatrixXd moment = (points.transpose() * points) / static_cast<double>(n);
  moment += SymmetricNoise(static_cast<int>(points.cols()), sigma * sigma, rng);
  return TopEigenspace(moment, r);
}

}  // namespace rsr
