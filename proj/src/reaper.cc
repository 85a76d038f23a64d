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

#include "rsr/reaper.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace rsr {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxBisection = 200;
constexpr double kWaterTolerance = 1e-10;

void CheckPoints(const Eigen::MatrixXd& p, const Eigen::MatrixXd& points) {
  if (points.rows() == 0) throw std::invalid_argument("empty dataset");
  if (p.rows() != p.cols() || p.cols() != points.cols()) {
    throw std::invalid_argument("relaxed projection must be D x D with D = " +
                                std::to_string(points.cols()));
  }
}

double WaterLevelSum(const Eigen::VectorXd& a, double t) {
  return (a.array() - t).max(0.0).min(1.0).sum();
}

Eigen::MatrixXd Symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd TraceRenormalized(const Eigen::MatrixXd& m, int r) {
  return (static_cast<double>(r) / m.trace()) * m;
}

}  // namespace

RelaxedProjection::RelaxedProjection(Eigen::MatrixXd matrix, int r,
                                     Constraint constraint)
    : matrix_(std::move(matrix)) {
  const auto d = matrix_.rows();
  if (matrix_.cols() != d || r < 1 || r >= d) {
    throw std::invalid_argument("relaxed projection needs a D x D matrix, 1 <= r < D");
  }
  if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("relaxed projection is not symmetric");
  }
  const Eigen::VectorXd eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(matrix_, Eigen::EigenvaluesOnly)
          .eigenvalues();
  const double trace_error = std::abs(matrix_.trace() - r);
  if (constraint == Constraint::kInH) {
    if (eig.minCoeff() < -1e-9 || eig.maxCoeff() > 1 + 1e-9 || trace_error > 1e-6) {
      throw std::invalid_argument("matrix is outside {0 <= P <= I, tr P = r}");
    }
  } else if (eig.minCoeff() < -1e-9 || trace_error > 1e-8) {
    throw std::invalid_argument("matrix is not PSD with trace r");
  }
}

double ReaperValue(const Eigen::MatrixXd& p, const Eigen::MatrixXd& points) {
  CheckPoints(p, points);
  const Eigen::MatrixXd residual = points - points * p.transpose();
  return residual.rowwise().norm().mean();
}

Eigen::MatrixXd ReaperSubgradient(const Eigen::MatrixXd& p,
                                  const Eigen::MatrixXd& points,
                                  double tolerance) {
  CheckPoints(p, points);
  const Eigen::MatrixXd residual = points - points * p.transpose();
  Eigen::VectorXd weights = residual.rowwise().norm();
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    weights(i) = weights(i) > tolerance ? 1.0 / weights(i) : 0.0;
  }
  const Eigen::MatrixXd half = residual.transpose() * weights.asDiagonal() * points;
  return (-0.5 / static_cast<double>(points.rows())) * (half + half.transpose());
}

HProjection ProjectOntoH(const Eigen::MatrixXd& a, int r) {
  const auto d = a.rows();
  if (a.cols() != d || r < 1 || r >= d) {
    throw std::invalid_argument("ProjectOntoH needs a D x D matrix, 1 <= r < D");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Symmetrized(a));
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed in ProjectOntoH");
  }
  const Eigen::VectorXd& values = eig.eigenvalues();
  double lo = values.minCoeff() - 1.0;  // sum = D > r
  double hi = values.maxCoeff();        // sum = 0 < r
  double t = 0.5 * (lo + hi);
  bool converged = false;
  for (int it = 0; it < kMaxBisection; ++it) {
    t = 0.5 * (lo + hi);
    const double excess = WaterLevelSum(values, t) - r;
    if (std::abs(excess) <= kWaterTolerance) {
      converged = true;
      break;
    }
    (excess > 0 ? lo : hi) = t;
  }
  if (!converged) {
    throw std::runtime_error("water-filling bisection did not converge");
  }
  const Eigen::VectorXd clipped = (values.array() - t).max(0.0).min(1.0).matrix();
  const Eigen::MatrixXd& u = eig.eigenvectors();
  Eigen::MatrixXd p = Symmetrized(u * clipped.asDiagonal() * u.transpose());
  return {RelaxedProjection(std::move(p), r), t, values, clipped};
}

double HDiameter(int dim, int r) {
  const int overlap = std::max(0, 2 * r - dim);
  return std::sqrt(2.0 * (r - overlap));
}

void ReaperConfig::Validate() const {
  if (iterations < 1) throw std::invalid_argument("REAPER needs T >= 1");
  if (!(step0 > 0)) throw std::invalid_argument("step0 must be positive");
  if (batch_size && *batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(noise_variance >= 0)) throw std::invalid_argument("noise variance must be >= 0");
  if (!(eig_floor > 0)) throw std::invalid_argument("eigenvalue floor must be positive");
}

SpectralSubspace PrincipalSubspace(const Eigen::MatrixXd& p, int r) {
  return TopEigenspace(Symmetrized(p), r);
}

ReaperResult RunReaper(const LabeledDataset& data, int r,
                       const ReaperConfig& cfg) {
  cfg.Validate();
  const int d = data.dim();
  if (r < 1 || r >= d) throw std::invalid_argument("REAPER needs 1 <= r < D");
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const bool mirror = cfg.solver == ReaperSolver::kMirror;

  Rng rng(cfg.seed);
  const Eigen::MatrixXd a = GaussianMatrix(d, d, 1.0, 0.1, rng);
  Eigen::MatrixXd p = a.transpose() * a;
  p = mirror ? TraceRenormalized(p, r) : ProjectOntoH(p, r).projection.matrix();

  std::vector<IterationRecord> records;
  std::vector<int> floored;
  records.reserve(cfg.iterations + 1);
  auto record = [&](int k, const Eigen::MatrixXd& current) {
    IterationRecord rec;
    rec.iteration = k;
    if (data.truth) {
      const SpectralSubspace s = PrincipalSubspace(current, r);
      rec.dr2 = Dr2(s.basis, *data.truth);
      rec.dist2 = GrassmannDist2(s.basis, *data.truth);
    } else {
      rec.dr2 = rec.dist2 = kNaN;
    }
    rec.objective = cfg.record_objective ? ReaperValue(current, data.points) : kNaN;
    rec.seconds = cfg.record_time
        ? std::chrono::duration<double>(Clock::now() - start).count()
        : kNaN;
    records.push_back(rec);
  };
  record(0, p);

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  for (int k = 1; k <= cfg.iterations; ++k) {
    Eigen::MatrixXd g = cfg.batch_size
        ? ReaperSubgradient(p, SampleMinibatch(data.points, *cfg.batch_size, rng),
                            cfg.residual_tolerance)
        : ReaperSubgradient(p, data.points, cfg.residual_tolerance);
    if (cfg.noise_variance > 0) g += SymmetricNoise(d, cfg.noise_variance, rng);
    const double eta = cfg.step0 / std::sqrt(static_cast<double>(k));

    if (mirror) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Symmetrized(p));
      Eigen::VectorXd lambda = eig.eigenvalues();
      if (lambda.minCoeff() < cfg.eig_floor) {
        floored.push_back(k);
        lambda = lambda.cwiseMax(cfg.eig_floor);
      }
      const Eigen::MatrixXd& u = eig.eigenvectors();
      const Eigen::MatrixXd log_p =
          u * lambda.array().log().matrix().asDiagonal() * u.transpose();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> next(
          Symmetrized(log_p - eta * g));
      // Shifting the exponent by its largest eigenvalue avoids overflow and
      // cancels in the trace renormalization.
      const Eigen::VectorXd mu = next.eigenvalues();
      const Eigen::VectorXd e = (mu.array() - mu.maxCoeff()).exp().matrix();
      const Eigen::MatrixXd& w = next.eigenvectors();
      p = TraceRenormalized(Symmetrized(w * e.asDiagonal() * w.transpose()), r);
    } else {
      p = ProjectOntoH(p - eta * g, r).projection.matrix();
    }
    sum += p;
    record(k, sum / static_cast<double>(k));
  }

  Eigen::MatrixXd averaged = sum / static_cast<double>(cfg.iterations);
  const Eigen::MatrixXd hygienic =
      mirror ? ProjectOntoH(averaged, r).projection.matrix() : averaged;
  SpectralSubspace principal = PrincipalSubspace(hygienic, r);
  return {std::move(averaged), std::move(principal), std::move(records),
          std::move(floored)};
}

}  // namespace rsr
