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

#ifndef RSR_GEOMETRY_H_
#define RSR_GEOMETRY_H_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rsr {

// Thrown when a matrix that must have full column rank does not.
class DegenerateInputError : public std::runtime_error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : std::runtime_error(what) {}
};

// Smallest singular value accepted by ProjectStiefel.
inline constexpr double kRankTolerance = 1e-12;

// A D x r matrix with orthonormal columns, 1 <= r < D. Represents a point on
// the Grassmannian G(D, r) through its column span.
class SubspaceBasis {
 public:
  // Validates orthonormality (max-entry deviation of V^T V from I below
  // `tolerance`) and 1 <= r < D. Throws std::invalid_argument otherwise.
  explicit SubspaceBasis(Eigen::MatrixXd matrix, double tolerance = 1e-10);

  // First r columns of the D x D identity.
  static SubspaceBasis Canonical(int ambient_dim, int rank);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  int ambient_dim() const { return static_cast<int>(matrix_.rows()); }
  int rank() const { return static_cast<int>(matrix_.cols()); }

  // Orthogonal projector V V^T onto the span.
  Eigen::MatrixXd Projector() const { return matrix_ * matrix_.transpose(); }

 private:
  Eigen::MatrixXd matrix_;
};

// Element of the horizontal tangent space at `base`: V^T G = 0.
struct TangentVector {
  Eigen::MatrixXd matrix;
};

// Q_V A = (I - V V^T) A.
TangentVector TangentProject(const SubspaceBasis& basis,
                             const Eigen::MatrixXd& direction);

// Nearest semiorthogonal matrix in Frobenius norm (polar factor U W^T of the
// thin SVD A = U S W^T). Throws DegenerateInputError when sigma_r(A) <=
// kRankTolerance.
SubspaceBasis ProjectStiefel(const Eigen::MatrixXd& a);

// Principal angles theta_1 >= ... >= theta_r in [0, pi/2]. Small angles are
// taken from the sines (singular values of (I - V1 V1^T) V2) and large angles
// from the clamped cosines, which keeps full relative accuracy near zero.
Eigen::VectorXd PrincipalAngles(const SubspaceBasis& v1,
                                const SubspaceBasis& v2);

// 1 - sigma_r(V1^T V2) = 1 - cos(theta_1), evaluated as 2 sin^2(theta_1 / 2).
double Dr2(const SubspaceBasis& v1, const SubspaceBasis& v2);

// Squared geodesic distance sum_j theta_j^2.
double GrassmannDist2(const SubspaceBasis& v1, const SubspaceBasis& v2);

// ProjectStiefel(V - eta * G).
SubspaceBasis RetractStep(const SubspaceBasis& basis,
                          const TangentVector& direction, double eta);

// Leading r-dimensional eigenspace of a symmetric matrix.
struct SpectralSubspace {
  SubspaceBasis basis;
  // All eigenvalues, descending.
  Eigen::VectorXd eigenvalues;
  // lambda_r - lambda_{r+1}.
  double eigengap;
  // Set when eigengap <= 1e-12: the subspace is not uniquely defined and
  // `basis` is one arbitrary valid choice.
  bool ill_defined;
};

// Top-r eigenvectors of the symmetric matrix `sym` (only its lower triangle
// is read).
SpectralSubspace TopEigenspace(const Eigen::MatrixXd& sym, int r);

}  // namespace rsr

#endif  // RSR_GEOMETRY_H_
