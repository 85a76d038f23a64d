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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rsr/random.h"

namespace rsr {
namespace {

constexpr double kZeroRowNorm = 1e-12;

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // Trim surrounding blanks and a trailing CR from CRLF files.
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos
                         ? std::string()
                         : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool ParseDouble(const std::string& text, double& value) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

std::optional<Label> ParseLabel(const std::string& text) {
  if (text == "in") return Label::kInlier;
  if (text == "out") return Label::kOutlier;
  return std::nullopt;
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

bool IsBlank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

int LabeledDataset::count(Label label) const {
  int n = 0;
  for (Label l : labels) n += (l == label);
  return n;
}

Eigen::MatrixXd LabeledDataset::Rows(Label label) const {
  if (!has_labels()) throw std::invalid_argument("dataset has no labels");
  Eigen::MatrixXd out(count(label), dim());
  int k = 0;
  for (int i = 0; i < size(); ++i) {
    if (labels[i] == label) out.row(k++) = points.row(i);
  }
  return out;
}

LabeledDataset NormalizeToSphere(const Eigen::MatrixXd& raw,
                                 std::vector<Label> labels) {
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != raw.rows()) {
    throw std::invalid_argument("label count does not match row count");
  }
  std::vector<Eigen::Index> kept;
  kept.reserve(raw.rows());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    if (raw.row(i).norm() > kZeroRowNorm) kept.push_back(i);
  }
  if (kept.empty()) {
    throw std::invalid_argument("dataset is empty after dropping zero rows");
  }
  LabeledDataset out;
  out.points.resize(static_cast<Eigen::Index>(kept.size()), raw.cols());
  for (size_t k = 0; k < kept.size(); ++k) {
    const auto row = raw.row(kept[k]);
    out.points.row(static_cast<Eigen::Index>(k)) = row / row.norm();
    if (!labels.empty()) out.labels.push_back(labels[kept[k]]);
  }
  out.dropped_rows = static_cast<int>(raw.rows()) - static_cast<int>(kept.size());
  return out;
}

LabeledDataset GenerateHaystack(const HaystackParams& p) {
  if (p.r < 1 || p.D <= p.r) {
    throw std::invalid_argument("haystack needs 1 <= r < D");
  }
  if (p.n_in < 0 || p.n_out < 0 || p.n_in + p.n_out < 1) {
    throw std::invalid_argument("haystack needs n_in, n_out >= 0 and N >= 1");
  }
  if (!(p.inlier_scale > 0) || !(p.outlier_scale > 0)) {
    throw std::invalid_argument("haystack scales must be positive");
  }
  Rng rng(p.seed);
  const Eigen::MatrixXd truth = RandomOrthonormalFrame(p.D, p.r, rng);
  const Eigen::MatrixXd weights = GaussianMatrix(
      p.n_in, p.r, 0.0, p.inlier_scale / std::sqrt(static_cast<double>(p.r)), rng);
  const Eigen::MatrixXd outliers = GaussianMatrix(
      p.n_out, p.D, 0.0, p.outlier_scale / std::sqrt(static_cast<double>(p.D)), rng);

  Eigen::MatrixXd raw(p.n_in + p.n_out, p.D);
  raw.topRows(p.n_in) = weights * truth.transpose();
  raw.bottomRows(p.n_out) = outliers;
  std::vector<Label> labels(p.n_in, Label::kInlier);
  labels.insert(labels.end(), p.n_out, Label::kOutlier);

  LabeledDataset out = NormalizeToSphere(raw, std::move(labels));
  out.truth.emplace(truth);
  return out;
}

CsvParseError::CsvParseError(const std::string& path, int line,
                             const std::string& what)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
      line_(line) {}

LabeledDataset LoadCsv(const std::string& path) {
  const std::vector<std::string> lines = ReadLines(path);
  size_t first = 0;
  while (first < lines.size() && IsBlank(lines[first])) ++first;
  if (first == lines.size()) throw CsvParseError(path, 1, "no data rows");

  bool header = false;
  bool labeled = false;
  int width = -1;
  {
    const auto fields = SplitFields(lines[first]);
    double unused;
    if (!fields.empty() && !ParseDouble(fields[0], unused)) {
      header = true;
      labeled = fields.back() == "label";
      width = static_cast<int>(fields.size());
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<Label> labels;
  for (size_t i = first + (header ? 1 : 0); i < lines.size(); ++i) {
    if (IsBlank(lines[i])) continue;
    const int line_no = static_cast<int>(i) + 1;
    auto fields = SplitFields(lines[i]);
    if (width < 0) {
      width = static_cast<int>(fields.size());
      labeled = ParseLabel(fields.back()).has_value();
    }
    if (static_cast<int>(fields.size()) != width) {
      throw CsvParseError(path, line_no,
                          "expected " + std::to_string(width) + " columns, got " +
                              std::to_string(fields.size()));
    }
    if (labeled) {
      const auto label = ParseLabel(fields.back());
      if (!label) {
        throw CsvParseError(path, line_no,
                            "label must be 'in' or 'out', got '" + fields.back() + "'");
      }
      labels.push_back(*label);
      fields.pop_back();
    }
    std::vector<double> row(fields.size());
    for (size_t j = 0; j < fields.size(); ++j) {
      if (!ParseDouble(fields[j], row[j])) {
        throw CsvParseError(path, line_no,
                            "non-numeric entry '" + fields[j] + "' in column " +
                                std::to_string(j + 1));
      }
    }
    rows.push_back(std::move(row));
  }
  const int dim = width - (labeled ? 1 : 0);
  if (rows.empty() || dim < 1) {
    throw CsvParseError(path, static_cast<int>(lines.size()), "no data rows");
  }

  LabeledDataset out;
  out.points.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < dim; ++j) out.points(static_cast<Eigen::Index>(i), j) = rows[i][j];
  }
  out.labels = std::move(labels);
  return out;
}

std::string FormatDouble(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void SaveCsv(const LabeledDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (int j = 0; j < dataset.dim(); ++j) {
    out << (j ? "," : "") << 'x' << (j + 1);
  }
  if (dataset.has_labels()) out << ",label";
  out << '\n';
  for (int i = 0; i < dataset.size(); ++i) {
    for (int j = 0; j < dataset.dim(); ++j) {
      out << (j ? "," : "") << FormatDouble(dataset.points(i, j));
    }
    if (dataset.has_labels()) {
      out << ',' << (dataset.labels[i] == Label::kInlier ? "in" : "out");
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

SubspaceBasis LoadBasisCsv(const std::string& path) {
  LabeledDataset table = LoadCsv(path);
  if (table.has_labels()) {
    throw CsvParseError(path, 1, "basis file must not carry labels");
  }
  try {
    return SubspaceBasis(std::move(table.points), 1e-8);
  } catch (const std::invalid_argument& e) {
    throw CsvParseError(path, 1, e.what());
  }
}

void SaveBasisCsv(const SubspaceBasis& basis, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const Eigen::MatrixXd& v = basis.matrix();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      out << (j ? "," : "") << FormatDouble(v(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace rsr
