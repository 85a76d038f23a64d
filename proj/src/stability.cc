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

#include "rsr/stability.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rsr/glad.h"
#include "rsr/random.h"

namespace rsr {
namespace {

void RequireLabels(const LabeledDataset& data) {
  if (!data.has_labels()) {
    throw std::invalid_argument("stability statistics need inlier/outlier labels");
  }
}

void RequireGamma(double gamma) {
  if (!(gamma > 0 && gamma <= 1)) throw std::invalid_argument("gamma must lie in (0, 1]");
}

double SpectralNormSquared(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) return 0.0;
  const Eigen::MatrixXd gram = rows.transpose() * rows;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

// r-th largest eigenvalue of a symmetric matrix.
double RthEigenvalue(const Eigen::MatrixXd& sym, int r) {
  const Eigen::VectorXd ascending =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly)
          .eigenvalues();
  return ascending(ascending.size() - r);
}

// Average absolute projection of the coordinate rows onto the unit vector u.
double MeanAbsProjection(const Eigen::MatrixXd& coords, const Eigen::VectorXd& u,
                         int n_total) {
  return (coords * u).cwiseAbs().sum() / n_total;
}

// Exact minimum over the unit circle for two-dimensional coordinates.
double MinOverCircle(const Eigen::MatrixXd& coords, int n_total) {
  std::vector<double> candidates;
  candidates.reserve(coords.rows() + 180);
  for (int deg = 0; deg < 180; ++deg) {
    candidates.push_back(deg * std::numbers::pi / 180.0);
  }
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    if (coords.row(i).norm() == 0) continue;
    candidates.push_back(std::atan2(coords(i, 1), coords(i, 0)) + std::numbers::pi / 2);
  }
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd u(2);
  for (double phi : candidates) {
    u << std::cos(phi), std::sin(phi);
    best = std::min(best, MeanAbsProjection(coords, u, n_total));
  }
  return best;
}

// Multistart random-direction descent over the unit sphere in R^r.
double MinOverSphere(const Eigen::MatrixXd& coords, int n_total, int r) {
  constexpr int kStarts = 64;
  constexpr int kMaxSteps = 4000;
  Rng rng(0x5eed);
  std::normal_distribution<double> normal;
  double best = std::numeric_limits<double>::infinity();
  for (int start = 0; start < kStarts; ++start) {
    Eigen::VectorXd u(r);
    if (start < r) {
      u = Eigen::VectorXd::Unit(r, start);
    } else {
      for (int j = 0; j < r; ++j) u(j) = normal(rng);
      u.normalize();
    }
    double value = MeanAbsProjection(coords, u, n_total);
    double step = 0.5;
    for (int it = 0; it < kMaxSteps && step > 1e-8; ++it) {
      Eigen::VectorXd z(r);
      for (int j = 0; j < r; ++j) z(j) = normal(rng);
      const Eigen::VectorXd candidate = (u + step * z.normalized()).normalized();
      const double v = MeanAbsProjection(coords, candidate, n_total);
      if (v < value) {
        u = candidate;
        value = v;
        step = std::min(1.0, step * 1.5);
      } else {
        step *= 0.8;
      }
    }
    best = std::min(best, value);
  }
  return best;
}

}  // namespace

double Permeance(const Eigen::MatrixXd& inliers, int dim, int n_total, int r) {
  if (n_total < 1 || r < 1 || r > dim) {
    throw std::invalid_argument("permeance needs N >= 1 and 1 <= r <= D");
  }
  if (inliers.rows() == 0) return 0.0;
  if (inliers.cols() != dim) throw std::invalid_argument("inlier dimension mismatch");
  const Eigen::VectorXd norms = inliers.rowwise().norm();
  Eigen::VectorXd weights(norms.size());
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    weights(i) = norms(i) > 0 ? 1.0 / norms(i) : 0.0;
  }
  const Eigen::MatrixXd moment =
      inliers.transpose() * weights.asDiagonal() * inliers / static_cast<double>(n_total);
  return std::max(0.0, RthEigenvalue(moment, r));
}

double AlignmentAt(const SubspaceBasis& basis, const Eigen::MatrixXd& outliers,
                   int n_total) {
  if (outliers.rows() == 0) return 0.0;
  const Eigen::MatrixXd g = GladGradient(basis, outliers).matrix *
                            (static_cast<double>(outliers.rows()) / n_total);
  return Eigen::JacobiSVD<Eigen::MatrixXd>(g).singularValues()(0);
}

AlignmentBounds Alignment(const Eigen::MatrixXd& outliers, int dim, int n_total,
                          int r, const AlignmentSearch& search) {
  if (n_total < 1 || r < 1 || r >= dim) {
    throw std::invalid_argument("alignment needs N >= 1 and 1 <= r < D");
  }
  AlignmentBounds bounds;
  if (outliers.rows() == 0) return bounds;
  if (outliers.cols() != dim) throw std::invalid_argument("outlier dimension mismatch");
  bounds.upper = outliers.rowwise().norm().sum() / n_total;

  Rng rng(search.seed);
  std::vector<SubspaceBasis> starts;
  if (outliers.rows() >= r) starts.push_back(PcaInit(outliers, r).basis);
  for (int s = 0; s < search.restarts; ++s) {
    starts.emplace_back(RandomOrthonormalFrame(dim, r, rng));
  }
  for (const SubspaceBasis& start : starts) {
    SubspaceBasis v = start;
    double value = AlignmentAt(v, outliers, n_total);
    double step = 0.5;
    for (int it = 0; it < search.iterations && step > 1e-8; ++it) {
      const Eigen::MatrixXd z =
          TangentProject(v, GaussianMatrix(dim, r, 0.0, 1.0, rng)).matrix;
      const double norm = z.norm();
      if (norm == 0) continue;
      SubspaceBasis candidate = ProjectStiefel(v.matrix() + (step / norm) * z);
      const double cv = AlignmentAt(candidate, outliers, n_total);
      if (cv > value) {
        v = std::move(candidate);
        value = cv;
        step = std::min(1.0, step * 1.5);
      } else {
        step *= 0.7;
      }
    }
    bounds.lower = std::max(bounds.lower, value);
  }
  bounds.lower = std::min(bounds.lower, bounds.upper);
  return bounds;
}

StabilityReport StabilityGlad(const LabeledDataset& data, int r, double gamma,
                              const AlignmentSearch& search) {
  RequireLabels(data);
  RequireGamma(gamma);
  StabilityReport report;
  report.gamma = gamma;
  const Eigen::MatrixXd inliers = data.Rows(Label::kInlier);
  report.permeance = Permeance(inliers, data.dim(), data.size(), r);
  report.permeance_rank_deficient = inliers.rows() < r;
  const AlignmentBounds a =
      Alignment(data.Rows(Label::kOutlier), data.dim(), data.size(), r, search);
  report.alignment_lower = a.lower;
  report.alignment_upper = a.upper;
  report.stability_lower = gamma * report.permeance - a.upper;
  report.stability_upper = gamma * report.permeance - a.lower;
  return report;
}

double StabilityPca(const LabeledDataset& data, int r, double gamma) {
  RequireLabels(data);
  RequireGamma(gamma);
  const Eigen::MatrixXd inliers = data.Rows(Label::kInlier);
  const double inlier_term =
      inliers.rows() == 0
          ? 0.0
          : std::max(0.0, RthEigenvalue(inliers.transpose() * inliers, r));
  return 2.0 * std::sin(std::acos(gamma)) * inlier_term -
         SpectralNormSquared(data.Rows(Label::kOutlier));
}

MonteCarloEstimate StabilityExpected(const LabeledDataset& data, int r,
                                     double gamma, int batch_size, int samples,
                                     uint64_t seed) {
  RequireLabels(data);
  RequireGamma(gamma);
  if (batch_size < 1 || samples < 1) {
    throw std::invalid_argument("need B >= 1 and at least one sample");
  }
  std::vector<double> values(samples);
  for (int i = 0; i < samples; ++i) {
    Rng rng(DeriveSeed(seed, {static_cast<uint64_t>(i)}));
    const std::vector<int> idx = SampleIndices(data.size(), batch_size, rng);
    std::vector<int> in_rows;
    double outlier_mass = 0.0;
    for (int j : idx) {
      if (data.labels[j] == Label::kInlier) {
        in_rows.push_back(j);
      } else {
        outlier_mass += data.points.row(j).norm();
      }
    }
    Eigen::MatrixXd inliers(static_cast<Eigen::Index>(in_rows.size()), data.dim());
    for (size_t k = 0; k < in_rows.size(); ++k) {
      inliers.row(static_cast<Eigen::Index>(k)) = data.points.row(in_rows[k]);
    }
    values[i] = gamma * Permeance(inliers, data.dim(), batch_size, r) -
                outlier_mass / batch_size;
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= samples;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  MonteCarloEstimate out;
  out.mean = mean;
  out.std_error = samples > 1 ? std::sqrt(var / (samples - 1) / samples) : 0.0;
  return out;
}

ReaperStabilityReport ReaperStats(const LabeledDataset& data) {
  RequireLabels(data);
  if (!data.truth) throw std::invalid_argument("REAPER statistics need the true subspace");
  const SubspaceBasis& truth = *data.truth;
  if (truth.ambient_dim() != data.dim()) {
    throw std::invalid_argument("truth dimension does not match data");
  }
  const int r = truth.rank();
  const int n = data.size();
  ReaperStabilityReport report;

  const Eigen::MatrixXd coords = data.Rows(Label::kInlier) * truth.matrix();
  if (coords.rows() > 0) {
    if (r == 1) {
      report.permeance = coords.cwiseAbs().sum() / n;
    } else if (r == 2) {
      report.permeance = MinOverCircle(coords, n);
    } else {
      report.permeance = MinOverSphere(coords, n, r);
    }
  }

  const Eigen::MatrixXd outliers = data.Rows(Label::kOutlier);
  if (outliers.rows() > 0) {
    const Eigen::MatrixXd v = truth.matrix();
    const Eigen::MatrixXd residual = outliers - (outliers * v) * v.transpose();
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < residual.rows(); ++i) {
      if (residual.row(i).norm() > 1e-12) kept.push_back(i);
    }
    Eigen::MatrixXd normalized(static_cast<Eigen::Index>(kept.size()), data.dim());
    for (size_t k = 0; k < kept.size(); ++k) {
      normalized.row(static_cast<Eigen::Index>(k)) = residual.row(kept[k]).normalized();
    }
    report.alignment = std::sqrt(SpectralNormSquared(outliers)) *
                       std::sqrt(SpectralNormSquared(normalized)) / n;
  }
  report.stability = report.permeance / (4.0 * std::sqrt(static_cast<double>(r))) -
                     report.alignment;
  return report;
}

}  // namespace rsr
