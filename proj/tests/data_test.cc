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

#include "rsr/data.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "rsr/random.h"

namespace rsr {
namespace {

using Eigen::MatrixXd;

std::string TempPath(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "rsr_data_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

double MaxResidual(const LabeledDataset& data) {
  const MatrixXd q = MatrixXd::Identity(data.dim(), data.dim()) - data.truth->Projector();
  return (data.points * q).rowwise().norm().maxCoeff();
}

TEST(NormalizeToSphereTest, ScalesRows) {
  MatrixXd raw(1, 3);
  raw << 3, 4, 0;
  const LabeledDataset d = NormalizeToSphere(raw);
  EXPECT_NEAR(d.points(0, 0), 0.6, 1e-16);
  EXPECT_NEAR(d.points(0, 1), 0.8, 1e-16);
  EXPECT_EQ(d.points(0, 2), 0.0);
  EXPECT_EQ(d.dropped_rows, 0);
}

TEST(NormalizeToSphereTest, UnitRowsUnchanged) {
  Rng rng(1);
  MatrixXd raw = GaussianMatrix(20, 5, 0, 1, rng);
  raw.rowwise().normalize();
  EXPECT_LT((NormalizeToSphere(raw).points - raw).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NormalizeToSphereTest, DropsZeroRowWithItsLabel) {
  MatrixXd raw(3, 2);
  raw << 1, 1, 0, 0, 0, 2;
  const LabeledDataset d =
      NormalizeToSphere(raw, {Label::kInlier, Label::kOutlier, Label::kOutlier});
  EXPECT_EQ(d.size(), 2);
  EXPECT_EQ(d.dropped_rows, 1);
  EXPECT_EQ(d.labels, (std::vector<Label>{Label::kInlier, Label::kOutlier}));
  for (int i = 0; i < d.size(); ++i) EXPECT_NEAR(d.points.row(i).norm(), 1.0, 1e-12);
}

TEST(NormalizeToSphereTest, AllZeroThrows) {
  EXPECT_THROW(NormalizeToSphere(MatrixXd::Zero(2, 3)), std::invalid_argument);
}

TEST(HaystackTest, InliersOnlyLieInTruth) {
  HaystackParams p;
  p.n_out = 0;
  p.seed = 3;
  const LabeledDataset d = GenerateHaystack(p);
  EXPECT_LE(MaxResidual(d), 1e-10);
  EXPECT_EQ(d.count(Label::kInlier), 1000);
}

TEST(HaystackTest, DeterministicAndLabeled) {
  HaystackParams p;
  p.n_in = 300;
  p.n_out = 700;
  p.seed = 11;
  const LabeledDataset a = GenerateHaystack(p);
  const LabeledDataset b = GenerateHaystack(p);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.truth->matrix(), b.truth->matrix());
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.count(Label::kInlier), 300);
  EXPECT_EQ(a.count(Label::kOutlier), 700);
  for (int i = 0; i < a.size(); ++i) EXPECT_NEAR(a.points.row(i).norm(), 1.0, 1e-12);
  p.seed = 12;
  EXPECT_NE(GenerateHaystack(p).points, a.points);
}

TEST(HaystackTest, InvalidParamsThrow) {
  HaystackParams p;
  p.r = 20;
  EXPECT_THROW(GenerateHaystack(p), std::invalid_argument);
  p = HaystackParams{};
  p.n_in = 0;
  p.n_out = 0;
  EXPECT_THROW(GenerateHaystack(p), std::invalid_argument);
}

TEST(HaystackTest, OutlierResidualMatchesMonteCarlo) {
  HaystackParams p;
  p.seed = 21;
  const LabeledDataset d = GenerateHaystack(p);
  const MatrixXd q = MatrixXd::Identity(20, 20) - d.truth->Projector();
  const Eigen::VectorXd res = (d.Rows(Label::kOutlier) * q).rowwise().norm();
  const double mean = res.mean();
  const double var = (res.array() - mean).square().sum() / (res.size() - 1);

  // By rotation invariance the residual of a normalized isotropic Gaussian is
  // the norm of its last D - r coordinates over the full norm.
  std::mt19937_64 gen(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int samples = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < samples; ++i) {
    double head = 0, tail = 0;
    for (int j = 0; j < 20; ++j) {
      const double z = normal(gen);
      (j < 2 ? head : tail) += z * z;
    }
    const double v = std::sqrt(tail / (head + tail));
    s += v;
    s2 += v * v;
  }
  const double oracle = s / samples;
  const double oracle_var = s2 / samples - oracle * oracle;
  const double se = std::sqrt(var / res.size() + oracle_var / samples);
  EXPECT_NEAR(mean, oracle, 3 * se);
}

TEST(HaystackTest, InlierMomentEigenvaluesConcentrate) {
  HaystackParams p;
  p.r = 3;
  p.D = 10;
  p.n_in = 10000;
  p.n_out = 0;
  p.seed = 5;
  const LabeledDataset d = GenerateHaystack(p);
  const MatrixXd m = d.points.transpose() * d.points / p.n_in;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m);
  for (int j = 7; j < 10; ++j) EXPECT_NEAR(eig.eigenvalues()(j), 1.0 / 3, 0.1 / 3);
  EXPECT_LT(eig.eigenvalues()(6), 1e-12);
}

TEST(CsvTest, RoundTripUnlabeled) {
  LabeledDataset d;
  d.points.resize(2, 3);
  d.points << 1.0 / 3, -2.5e-8, 7, 0.1, 1e300, -0.0;
  const std::string path = TempPath("plain.csv");
  SaveCsv(d, path);
  const LabeledDataset back = LoadCsv(path);
  EXPECT_EQ(back.points, d.points);
  EXPECT_FALSE(back.has_labels());
}

TEST(CsvTest, RoundTripLabeledHaystack) {
  HaystackParams p;
  p.n_in = 40;
  p.n_out = 60;
  p.D = 6;
  const LabeledDataset d = GenerateHaystack(p);
  const std::string path = TempPath("labeled.csv");
  SaveCsv(d, path);
  const LabeledDataset back = LoadCsv(path);
  EXPECT_LT((back.points - d.points).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(back.labels, d.labels);
  SaveCsv(back, TempPath("labeled2.csv"));
  EXPECT_EQ(ReadFile(path), ReadFile(TempPath("labeled2.csv")));
}

TEST(CsvTest, HeaderAndLabelColumn) {
  const std::string path = TempPath("header.csv");
  WriteFile(path, "a,b,label\n1,2,in\n3,4,out\n");
  const LabeledDataset d = LoadCsv(path);
  EXPECT_EQ(d.dim(), 2);
  EXPECT_EQ(d.labels, (std::vector<Label>{Label::kInlier, Label::kOutlier}));
  EXPECT_EQ(d.points(1, 0), 3.0);
}

TEST(CsvTest, WrongArityNamesLine) {
  const std::string path = TempPath("arity.csv");
  WriteFile(path, "x1,x2\n1,2\n3,4\n5\n");
  try {
    LoadCsv(path);
    FAIL() << "expected a parse error";
  } catch (const CsvParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos);
  }
}

TEST(CsvTest, NonNumericNamesLine) {
  const std::string path = TempPath("nan.csv");
  WriteFile(path, "1,2\n3,abc\n");
  try {
    LoadCsv(path);
    FAIL() << "expected a parse error";
  } catch (const CsvParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(CsvTest, BadLabelRejected) {
  const std::string path = TempPath("label.csv");
  WriteFile(path, "x,y,label\n1,2,in\n3,4,maybe\n");
  EXPECT_THROW(LoadCsv(path), CsvParseError);
}

TEST(CsvTest, BasisRoundTripAndValidation) {
  Rng rng(8);
  const SubspaceBasis v(RandomOrthonormalFrame(7, 2, rng));
  const std::string path = TempPath("basis.csv");
  SaveBasisCsv(v, path);
  EXPECT_LT((LoadBasisCsv(path).matrix() - v.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  WriteFile(path, "1,1\n0,1\n0,0\n");
  EXPECT_THROW(LoadBasisCsv(path), CsvParseError);
}

TEST(CsvTest, MissingFileThrows) {
  EXPECT_THROW(LoadCsv(TempPath("does_not_exist.csv")), std::runtime_error);
}

TEST(FormatDoubleTest, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3, -2.5e-300, 12345.678}) {
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
  EXPECT_EQ(FormatDouble(0.1), "0.10000000000000001");
}

}  // namespace
}  // namespace rsr
