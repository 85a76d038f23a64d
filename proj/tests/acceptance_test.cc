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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "rsr/experiment.h"
#include "rsr/glad.h"
#include "rsr/privacy.h"
#include "rsr/random.h"
#include "rsr/reaper.h"
#include "rsr/stability.h"

namespace {

namespace fs = std::filesystem;
using Eigen::MatrixXd;
using rsr::Label;
using rsr::LabeledDataset;
using rsr::Rng;
using rsr::SubspaceBasis;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string FreshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rsr_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

LabeledDataset Haystack(int d, int n_in, int n_out, uint64_t seed) {
  rsr::HaystackParams p;
  p.D = d;
  p.n_in = n_in;
  p.n_out = n_out;
  p.seed = seed;
  return rsr::GenerateHaystack(p);
}

// Least-squares slope of y against x.
double Slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// GGD with PCA init on the r = 2, D = 20, N = 500 half-outlier haystack.
rsr::Trajectory Criterion1Run(uint64_t seed, const LabeledDataset& data) {
  rsr::GladConfig cfg;
  cfg.iterations = 1000;
  cfg.schedule = rsr::StepSchedule::Halving(1.0, 50);
  cfg.record_objective = false;
  cfg.seed = seed;
  return rsr::RunGlad(data, rsr::PcaInit(data.points, 2).basis, cfg);
}

LabeledDataset Criterion1Data(int seed) { return Haystack(20, 250, 250, 5000 + seed); }

Outcome ExactRecoveryNonconvex() {
  const auto start = std::chrono::steady_clock::now();
  int recovered = 0;
  double worst = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const double err = Criterion1Run(seed, Criterion1Data(seed)).records.back().dist2;
    worst = std::max(worst, err);
    recovered += err <= 1e-8;
  }
  const double secs = Seconds(start);
  return {recovered >= 18 && secs < 30,
          Fmt("%.0f/20 seeds reach dist2 <= 1e-8 (worst %.3g) in %.1f s", recovered, worst,
              secs)};
}

Outcome ExactRecoveryConvex() {
  const auto start = std::chrono::steady_clock::now();
  rsr::ExperimentConfig cfg;
  cfg.n = 1000;
  cfg.inlier_ratio = 0.9;
  cfg.seed = 1;
  cfg.out_dir = FreshDir("convex");
  const rsr::GenerateOutput gen = rsr::CmdGenerate(cfg);
  rsr::ExperimentConfig stats_cfg = cfg;
  stats_cfg.data_path = gen.points_path;
  stats_cfg.truth_path = gen.truth_path;
  const rsr::StatsOutput stats = rsr::CmdStats(stats_cfg);

  LabeledDataset raw = rsr::LoadCsv(gen.points_path);
  LabeledDataset data = rsr::NormalizeToSphere(raw.points, raw.labels);
  data.truth.emplace(rsr::LoadBasisCsv(gen.truth_path));
  rsr::ReaperConfig rc;
  rc.iterations = 20000;
  rc.record_objective = false;
  const rsr::ReaperResult res = rsr::RunReaper(data, 2, rc);
  const double frob = (res.averaged - data.truth->Projector()).norm();
  const double secs = Seconds(start);
  return {stats.stability_reap > 0 && frob <= 1e-2 && secs < 120,
          Fmt("S_REAP = %.4f, ||P - P*||_F = %.3g after T = 20000 in %.1f s",
              stats.stability_reap, frob, secs)};
}

Outcome FigureOneOrdering() {
  const auto start = std::chrono::steady_clock::now();
  auto median_for = [](rsr::Algorithm a) {
    rsr::ExperimentConfig cfg;
    cfg.algorithm = a;
    cfg.private_run = true;
    cfg.reps = 20;
    cfg.seed = 2024;
    cfg.record_objective = false;
    cfg.out_dir = FreshDir(std::string("ordering_") + rsr::AlgorithmName(a));
    return rsr::CmdRun(cfg).final_median_log10;
  };
  const double sggd = median_for(rsr::Algorithm::kNsggd);
  const double sgd_reap = median_for(rsr::Algorithm::kSgdReap);
  const double smd_reap = median_for(rsr::Algorithm::kSmdReap);
  const double secs = Seconds(start);
  return {sggd < sgd_reap && sggd < smd_reap && secs < 600,
          Fmt("median final log10 dist2: dp-SGGD %.2f, dp-SGD-REAP %.2f, dp-SMD-REAP %.2f "
              "(%.1f s)",
              sggd, sgd_reap, smd_reap, secs)};
}

Outcome RateContrast() {
  std::vector<std::vector<double>> ggd_logs, reap_logs;
  for (int seed = 0; seed < 20; ++seed) {
    const LabeledDataset data = Criterion1Data(seed);
    const rsr::Trajectory t = Criterion1Run(seed, data);
    rsr::ReaperConfig rc;
    rc.iterations = 1000;
    rc.seed = seed;
    rc.record_objective = false;
    const rsr::ReaperResult r = rsr::RunReaper(data, 2, rc);
    std::vector<double> g, p;
    for (int k = 100; k <= 1000; ++k) {
      g.push_back(rsr::SafeLog10(t.records[k].dist2));
      p.push_back(rsr::SafeLog10(r.records[k].dist2));
    }
    ggd_logs.push_back(g);
    reap_logs.push_back(p);
  }
  // Fit the median log-error curves over seeds.
  std::vector<double> ks, ggd_median, reap_median;
  for (int i = 0; i <= 900; ++i) {
    std::vector<double> a, b;
    for (int s = 0; s < 20; ++s) {
      a.push_back(ggd_logs[s][i]);
      b.push_back(reap_logs[s][i]);
    }
    ks.push_back(100 + i);
    ggd_median.push_back(rsr::Quantile(a, 0.5));
    reap_median.push_back(rsr::Quantile(b, 0.5));
  }
  const double ggd_slope = Slope(ks, ggd_median);
  const double reap_slope = Slope(ks, reap_median);
  const double ratio = ggd_slope / reap_slope;
  return {ggd_slope < 0 && reap_slope < 0 && ratio >= 3,
          Fmt("log10-error slopes over k = 100..1000: GGD %.3g, GD-REAP %.3g (ratio %.1f)",
              ggd_slope, reap_slope, ratio)};
}

Outcome GradientCorrectness() {
  Rng rng(55);
  double worst_glad = 0, worst_reap = 0;
  int glad = 0;
  while (glad < 50) {
    const LabeledDataset data = Haystack(8, 20, 20, 700 + glad);
    const SubspaceBasis v(rsr::RandomOrthonormalFrame(8, 2, rng));
    const MatrixXd q = MatrixXd::Identity(8, 8) - v.Projector();
    if ((data.points * q).rowwise().norm().minCoeff() <= 1e-3) continue;
    MatrixXd xi = rsr::TangentProject(v, rsr::GaussianMatrix(8, 2, 0, 1, rng)).matrix;
    xi /= xi.norm();
    const double h = 1e-6;
    const double fd =
        (rsr::GladValue(rsr::ProjectStiefel(v.matrix() + h * xi), data.points) -
         rsr::GladValue(rsr::ProjectStiefel(v.matrix() - h * xi), data.points)) /
        (2 * h);
    const double an = (rsr::GladGradient(v, data.points).matrix.array() * xi.array()).sum();
    worst_glad = std::max(worst_glad, std::abs(fd - an) / std::abs(an));
    ++glad;
  }
  int reap = 0;
  while (reap < 50) {
    const LabeledDataset data = Haystack(7, 20, 20, 800 + reap);
    const MatrixXd a = rsr::GaussianMatrix(7, 7, 0, 1, rng);
    const MatrixXd p = rsr::ProjectOntoH(a + a.transpose(), 2).projection.matrix();
    const MatrixXd q = MatrixXd::Identity(7, 7) - p;
    if ((data.points * q).rowwise().norm().minCoeff() <= 1e-3) continue;
    MatrixXd xi = rsr::GaussianMatrix(7, 7, 0, 1, rng);
    xi = xi + xi.transpose().eval();
    xi /= xi.norm();
    const double h = 1e-6;
    const double fd = (rsr::ReaperValue(p + h * xi, data.points) -
                       rsr::ReaperValue(p - h * xi, data.points)) /
                      (2 * h);
    const double an = (rsr::ReaperSubgradient(p, data.points).array() * xi.array()).sum();
    worst_reap = std::max(worst_reap, std::abs(fd - an) / std::abs(an));
    ++reap;
  }
  return {worst_glad <= 1e-4 && worst_reap <= 1e-4,
          Fmt("worst relative error vs central differences: GLAD %.2g, REAPER %.2g (50 each)",
              worst_glad, worst_reap)};
}

Outcome ProjectionCorrectness() {
  Rng rng(66);
  const MatrixXd a = rsr::GaussianMatrix(12, 3, 0, 1, rng);
  const double best = (rsr::ProjectStiefel(a).matrix().transpose() * a).trace();
  int beaten = 0;
  for (int i = 0; i < 1000; ++i) {
    const MatrixXd w = rsr::RandomOrthonormalFrame(12, 3, rng);
    beaten += (w.transpose() * a).trace() > best;
  }
  double kkt = 0, expansion = -1e9;
  for (int trial = 0; trial < 100; ++trial) {
    MatrixXd x = rsr::GaussianMatrix(10, 10, 0, 1, rng);
    MatrixXd y = rsr::GaussianMatrix(10, 10, 0, 1, rng);
    x = x + x.transpose().eval();
    y = y + y.transpose().eval();
    const rsr::HProjection px = rsr::ProjectOntoH(x, 3);
    const rsr::HProjection py = rsr::ProjectOntoH(y, 3);
    expansion = std::max(expansion, (px.projection.matrix() - py.projection.matrix()).norm() -
                                        (x - y).norm());
    for (int i = 0; i < 10; ++i) {
      const double l = px.output_eigenvalues(i);
      const double slack = l - px.input_eigenvalues(i) + px.shift;
      if (l > 1e-12 && l < 1 - 1e-12) {
        kkt = std::max(kkt, std::abs(slack));
      } else if (l <= 1e-12) {
        kkt = std::max({kkt, -slack, std::abs(l)});
      } else {
        kkt = std::max({kkt, slack, std::abs(l - 1)});
      }
    }
    kkt = std::max(kkt, std::abs(px.output_eigenvalues.sum() - 3));
  }
  return {beaten == 0 && kkt <= 1e-8 && expansion <= 1e-12,
          Fmt("Stiefel beaten %.0f/1000 times; H KKT residual %.2g; max expansion %.2g",
              beaten, kkt, expansion)};
}

Outcome MinibatchUnbiasedness() {
  const LabeledDataset data = Haystack(6, 25, 25, 77);
  Rng rng(78);
  SubspaceBasis v = SubspaceBasis::Canonical(6, 2);
  for (;;) {
    v = SubspaceBasis(rsr::RandomOrthonormalFrame(6, 2, rng));
    const MatrixXd q = MatrixXd::Identity(6, 6) - v.Projector();
    if ((data.points * q).rowwise().norm().minCoeff() > 1e-3) break;
  }
  const MatrixXd full = rsr::GladGradient(v, data.points).matrix;
  const int draws = 100000;
  MatrixXd sum = MatrixXd::Zero(6, 2), sum2 = MatrixXd::Zero(6, 2);
  for (int i = 0; i < draws; ++i) {
    const MatrixXd g = rsr::GladGradient(v, rsr::SampleMinibatch(data.points, 8, rng)).matrix;
    sum += g;
    sum2 += g.cwiseProduct(g);
  }
  double worst = 0;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double mean = sum(i, j) / draws;
      const double se = std::sqrt((sum2(i, j) / draws - mean * mean) / draws);
      worst = std::max(worst, std::abs(mean - full(i, j)) / se);
    }
  }
  return {worst <= 4, Fmt("max |mean - full| = %.2f standard errors (B = 8, 1e5 draws)", worst)};
}

Outcome CalibrationAudit() {
  rsr::PrivacyBudget b;
  b.epsilon = 0.8;
  b.n = 2000;
  b.iterations = 2000;
  b.delta = 1 / std::sqrt(2000.0);
  b.batch_size = rsr::BatchSizeRule(2000, 0.8, 2000);
  // Hand-computed references.
  const struct {
    rsr::Mechanism m;
    double expected;
  } refs[] = {{rsr::Mechanism::kNggd, 0.011283929335834544},
              {rsr::Mechanism::kNsggd, 2.9691025232586257e-07},
              {rsr::Mechanism::kReapFull, 3.2497716487203494},
              {rsr::Mechanism::kReapStochastic, 2.9691025232586257e-07}};
  double worst = 0;
  bool monotone = *b.batch_size == 20;
  for (const auto& ref : refs) {
    const double s = rsr::Calibrate(ref.m, b).sigma2;
    worst = std::max(worst, std::abs(s - ref.expected) / ref.expected);
    rsr::PrivacyBudget t = b, n = b, e = b;
    t.iterations *= 2;
    n.n = 2500;
    e.epsilon = 1.0;
    monotone &= rsr::Calibrate(ref.m, t).sigma2 > s;
    monotone &= rsr::Calibrate(ref.m, n).sigma2 < s;
    monotone &= rsr::Calibrate(ref.m, e).sigma2 < s;
  }
  return {worst <= 1e-12 && monotone,
          Fmt("max relative deviation %.2g; monotone in T, N, eps: ", worst) +
              (monotone ? "yes" : "no")};
}

bool SameFiles(const fs::path& a, const fs::path& b, int& compared) {
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    std::ifstream fa(entry.path()), fb(b / rel);
    if (!fb) return false;
    const std::string sa((std::istreambuf_iterator<char>(fa)), {});
    const std::string sb((std::istreambuf_iterator<char>(fb)), {});
    if (sa != sb) return false;
    ++compared;
  }
  return true;
}

Outcome Determinism() {
  const std::string root = FreshDir("determinism");
  const std::vector<std::string> commands = {
      "generate --seed 7",
      "run --algorithm nsggd --private --reps 3 --n 400 --seed 3",
      "run --algorithm smd-reap --private --reps 2 --n 300 --seed 3",
      "stats --n 600 --seed 4",
      "phase --algorithms nsggd,sgd-reap --private --n-grid 100,200 --d-grid 5,10 --reps 2 "
      "--threads 2 --seed 5",
  };
  int compared = 0;
  bool same = true;
  for (size_t i = 0; i < commands.size(); ++i) {
    for (const char* pass : {"a", "b"}) {
      const std::string out = root + "/" + std::to_string(i) + pass;
      const std::string cmd =
          std::string(RSR_CLI_PATH) + " " + commands[i] + " --out " + out + " >/dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + commands[i]};
    }
    same &= SameFiles(root + "/" + std::to_string(i) + "a", root + "/" + std::to_string(i) + "b",
                      compared);
  }
  return {same && compared > 0,
          Fmt("%.0f output files byte-identical across reruns of 5 commands", compared)};
}

Outcome PhaseTrend() {
  const auto start = std::chrono::steady_clock::now();
  rsr::ExperimentConfig cfg;
  cfg.algorithms = {rsr::Algorithm::kNsggd, rsr::Algorithm::kSgdReap};
  cfg.private_run = true;
  cfg.n_grid = {500, 1000, 2000};
  cfg.d_grid = {10, 20, 40};
  cfg.reps = 10;
  cfg.seed = 99;
  cfg.out_dir = FreshDir("phase");
  const rsr::PhaseOutput phase = rsr::CmdPhase(cfg);
  int wins = 0;
  std::string cells;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double a = phase.cells[0][i][j], b = phase.cells[1][i][j];
      wins += a < b;
      cells += Fmt(" %.1f/%.1f", a, b);
    }
  }
  const double secs = Seconds(start);
  return {wins >= 7 && secs < 1800,
          Fmt("dp-SGGD wins %.0f/9 cells in %.0f s; cells (SGGD/SGD-REAP):", wins, secs) + cells};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"exact recovery, nonconvex", ExactRecoveryNonconvex},
      {"exact recovery, convex", ExactRecoveryConvex},
      {"private convergence ordering", FigureOneOrdering},
      {"linear vs sublinear rate", RateContrast},
      {"gradient correctness", GradientCorrectness},
      {"projection correctness", ProjectionCorrectness},
      {"minibatch unbiasedness", MinibatchUnbiasedness},
      {"calibration audit", CalibrationAudit},
      {"determinism", Determinism},
      {"phase-transition trend", PhaseTrend},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
