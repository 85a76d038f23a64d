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

#ifndef RSR_DATA_H_
#define RSR_DATA_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rsr/geometry.h"

namespace rsr {

enum class Label { kInlier, kOutlier };

// N points in R^D stored as rows. After NormalizeToSphere every row has unit
// Euclidean norm.
struct LabeledDataset {
  Eigen::MatrixXd points;
  // Empty when the dataset is unlabeled; otherwise one entry per row.
  std::vector<Label> labels;
  std::optional<SubspaceBasis> truth;
  // Rows removed by NormalizeToSphere because their norm was <= 1e-12.
  int dropped_rows = 0;

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  bool has_labels() const { return !labels.empty(); }
  int count(Label label) const;
  // Rows carrying `label`, in original order. Requires labels.
  Eigen::MatrixXd Rows(Label label) const;
};

// Scales every row to the unit sphere, dropping rows with norm <= 1e-12.
// `labels`, when non-empty, must have one entry per row and is filtered in
// step. Throws std::invalid_argument if nothing survives.
LabeledDataset NormalizeToSphere(const Eigen::MatrixXd& raw,
                                 std::vector<Label> labels = {});

struct HaystackParams {
  int r = 2;
  int D = 20;
  int n_in = 1000;
  int n_out = 1000;
  double inlier_scale = 1.0;
  double outlier_scale = 1.0;
  uint64_t seed = 0;
};

// Haystack model: a Haar-random V_star, inliers V_star w with
// w ~ N(0, inlier_scale^2 I_r / r), outliers ~ N(0, outlier_scale^2 I_D / D),
// all normalized to the sphere. Inlier rows come first. Deterministic in seed.
LabeledDataset GenerateHaystack(const HaystackParams& params);

class CsvParseError : public std::runtime_error {
 public:
  CsvParseError(const std::string& path, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

// Reads a points CSV: optional header line, D numeric columns per row and an
// optional trailing `label` column with values `in` / `out`. Points are used
// as written (no normalization).
LabeledDataset LoadCsv(const std::string& path);

// Writes a header `x1,...,xD[,label]` then one row per point, 17 significant
// digits.
void SaveCsv(const LabeledDataset& dataset, const std::string& path);

// Basis CSV: D rows of r comma-separated values, no header.
SubspaceBasis LoadBasisCsv(const std::string& path);
void SaveBasisCsv(const SubspaceBasis& basis, const std::string& path);

// Shortest decimal form with 17 significant digits.
std::string FormatDouble(double value);

}  // namespace rsr

#endif  // RSR_DATA_H_
