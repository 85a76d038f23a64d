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

#include "rsr/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rsr {
namespace {

void CheckSameShape(const SubspaceBasis& v1, const SubspaceBasis& v2) {
  if (v1.ambient_dim() != v2.ambient_dim() || v1.rank() != v2.rank()) {
    throw std::invalid_argument("subspace dimensions differ: " +
                                std::to_string(v1.ambient_dim()) + "x" +
                                std::to_string(v1.rank()) + " vs " +
                                std::to_string(v2.ambient_dim()) + "x" +
                                std::to_string(v2.rank()));
  }
}

// Orders the pair by the raw matrix entries so that symmetric quantities are
// evaluated by the identical floating point sequence regardless of argument
// order.
bool LexicographicallyLess(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

}  // namespace

SubspaceBasis::SubspaceBasis(Eigen::MatrixXd matrix, double tolerance)
    : matrix_(std::move(matrix)) {
  const auto d = matrix_.rows();
  const auto r = matrix_.cols();
  if (r < 1 || r >= d) {
    throw std::invalid_argument("subspace basis needs 1 <= r < D, got D=" +
                                std::to_string(d) + " r=" + std::to_string(r));
  }
  const double deviation =
      (matrix_.transpose() * matrix_ - Eigen::MatrixXd::Identity(r, r))
          .cwiseAbs()
          .maxCoeff();
  if (!(deviation <= tolerance)) {
    throw std::invalid_argument(
        "basis columns are not orthonormal (max |V^T V - I| = " +
        std::to_string(deviation) + ")");
  }
}

SubspaceBasis SubspaceBasis::Canonical(int ambient_dim, int rank) {
  return SubspaceBasis(Eigen::MatrixXd::Identity(ambient_dim, rank));
}

TangentVector TangentProject(const SubspaceBasis& basis,
                             const Eigen::MatrixXd& direction) {
  const Eigen::MatrixXd& v = basis.matrix();
  if (direction.rows() != v.rows() || direction.cols() != v.cols()) {
    throw std::invalid_argument("tangent direction shape does not match basis");
  }
  return {direction - v * (v.transpose() * direction)};
}

SubspaceBasis ProjectStiefel(const Eigen::MatrixXd& a) {
  if (a.cols() < 1 || a.cols() >= a.rows()) {
    throw std::invalid_argument("ProjectStiefel needs a tall D x r matrix");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double sigma_r = svd.singularValues()(a.cols() - 1);
  if (!(sigma_r > kRankTolerance)) {
    throw DegenerateInputError("rank-deficient input to ProjectStiefel (sigma_r = " +
                               std::to_string(sigma_r) + ")");
  }
  return SubspaceBasis(svd.matrixU() * svd.matrixV().transpose());
}

Eigen::VectorXd PrincipalAngles(const SubspaceBasis& v1,
                                const SubspaceBasis& v2) {
  CheckSameShape(v1, v2);
  const bool swap = LexicographicallyLess(v2.matrix(), v1.matrix());
  const Eigen::MatrixXd& a = swap ? v2.matrix() : v1.matrix();
  const Eigen::MatrixXd& b = swap ? v1.matrix() : v2.matrix();
  const int r = v1.rank();

  const Eigen::MatrixXd cross = a.transpose() * b;
  // Descending cosines correspond to ascending angles.
  const Eigen::VectorXd cosines =
      Eigen::JacobiSVD<Eigen::MatrixXd>(cross).singularValues();
  // Descending sines correspond to descending angles.
  const Eigen::VectorXd sines =
      Eigen::JacobiSVD<Eigen::MatrixXd>(b - a * cross).singularValues();

  Eigen::VectorXd angles(r);
  for (int j = 0; j < r; ++j) {
    const double s = std::clamp(sines(j), 0.0, 1.0);
    const double c = std::clamp(cosines(r - 1 - j), 0.0, 1.0);
    angles(j) = (s * s <= 0.5) ? std::asin(s) : std::acos(c);
  }
  // The two branches can disagree in the last ulp at the switch point.
  std::sort(angles.data(), angles.data() + r, std::greater<double>());
  return angles;
}

double Dr2(const SubspaceBasis& v1, const SubspaceBasis& v2) {
  const double theta = PrincipalAngles(v1, v2)(0);
  const double half = std::sin(theta / 2.0);
  return 2.0 * half * half;
}

double GrassmannDist2(const SubspaceBasis& v1, const SubspaceBasis& v2) {
  return PrincipalAngles(v1, v2).squaredNorm();
}

SubspaceBasis RetractStep(const SubspaceBasis& basis,
                          const TangentVector& direction, double eta) {
  if (direction.matrix.rows() != basis.ambient_dim() ||
      direction.matrix.cols() != basis.rank()) {
    throw std::invalid_argument("retraction direction shape does not match basis");
  }
  if (eta == 0.0) return basis;
  return ProjectStiefel(basis.matrix() - eta * direction.matrix);
}

SpectralSubspace TopEigenspace(const Eigen::MatrixXd& sym, int r) {
  const auto d = sym.rows();
  if (sym.cols() != d || r < 1 || r >= d) {
    throw std::invalid_argument("TopEigenspace needs a square D x D matrix and 1 <= r < D");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigendecomposition failed");
  }
  const Eigen::VectorXd ascending = eig.eigenvalues();
  const Eigen::VectorXd descending = ascending.reverse();
  Eigen::MatrixXd top = eig.eigenvectors().rightCols(r).rowwise().reverse();
  const double gap = descending(r - 1) - descending(r);
  return {SubspaceBasis(std::move(top)), descending, gap, gap <= 1e-12};
}

}  // namespace rsr
