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

#include "rsr/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "rsr/reaper.h"
#include "rsr/stability.h"

namespace rsr {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct AlgorithmEntry {
  Algorithm algorithm;
  const char* name;
};

constexpr AlgorithmEntry kAlgorithms[] = {
    {Algorithm::kGgd, "ggd"},         {Algorithm::kNggd, "nggd"},
    {Algorithm::kSggd, "sggd"},       {Algorithm::kNsggd, "nsggd"},
    {Algorithm::kGdReap, "gd-reap"},  {Algorithm::kSgdReap, "sgd-reap"},
    {Algorithm::kMdReap, "md-reap"},  {Algorithm::kSmdReap, "smd-reap"},
};

bool IsNoiseFree(Algorithm a) {
  return a == Algorithm::kGgd || a == Algorithm::kSggd;
}

Mechanism MechanismFor(Algorithm a) {
  switch (a) {
    case Algorithm::kNggd: return Mechanism::kNggd;
    case Algorithm::kNsggd: return Mechanism::kNsggd;
    case Algorithm::kGdReap:
    case Algorithm::kMdReap: return Mechanism::kReapFull;
    case Algorithm::kSgdReap:
    case Algorithm::kSmdReap: return Mechanism::kReapStochastic;
    default: break;
  }
  throw UsageError(std::string(AlgorithmName(a)) + " has no privacy mechanism");
}

std::string OutPath(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void EnsureOutDir(const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + cfg.out_dir + ": " + ec.message());
}

StepSchedule ScheduleOf(const ExperimentConfig& cfg) {
  if (cfg.schedule == "halving") return StepSchedule::Halving(cfg.step0, cfg.halving_period);
  if (cfg.schedule == "constant") return StepSchedule::Constant(cfg.step0);
  if (cfg.schedule == "power") {
    return StepSchedule::PowerLaw(cfg.power_c1, cfg.power_a, cfg.power_nu);
  }
  throw UsageError("unknown schedule '" + cfg.schedule +
                   "' (valid: halving, constant, power)");
}

LabeledDataset LoadData(const ExperimentConfig& cfg, uint64_t seed) {
  if (cfg.data_path.empty()) return GenerateHaystack(HaystackFor(cfg, cfg.n, cfg.dim, seed));
  LabeledDataset raw = LoadCsv(cfg.data_path);
  LabeledDataset data = NormalizeToSphere(raw.points, raw.labels);
  if (!cfg.truth_path.empty()) {
    data.truth.emplace(LoadBasisCsv(cfg.truth_path));
    if (data.truth->ambient_dim() != data.dim()) {
      throw UsageError("truth basis has D=" + std::to_string(data.truth->ambient_dim()) +
                       " but data has D=" + std::to_string(data.dim()));
    }
  }
  return data;
}

int RankOf(const ExperimentConfig& cfg, const LabeledDataset& data) {
  return data.truth ? data.truth->rank() : cfg.r;
}

std::string Line(const std::string& key, double value) {
  return key + "=" + FormatDouble(value) + "\n";
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

const char* AlgorithmName(Algorithm algorithm) {
  for (const auto& e : kAlgorithms) {
    if (e.algorithm == algorithm) return e.name;
  }
  return "unknown";
}

Algorithm ParseAlgorithm(std::string_view name) {
  for (const auto& e : kAlgorithms) {
    if (name == e.name) return e.algorithm;
  }
  std::string valid;
  for (const auto& e : kAlgorithms) valid += std::string(valid.empty() ? "" : ", ") + e.name;
  throw UsageError("unknown algorithm '" + std::string(name) + "' (valid: " + valid + ")");
}

bool IsStochastic(Algorithm a) {
  return a == Algorithm::kSggd || a == Algorithm::kNsggd ||
         a == Algorithm::kSgdReap || a == Algorithm::kSmdReap;
}

bool IsReaper(Algorithm a) {
  return a == Algorithm::kGdReap || a == Algorithm::kSgdReap ||
         a == Algorithm::kMdReap || a == Algorithm::kSmdReap;
}

void ValidateExperiment(const ExperimentConfig& cfg) {
  if (cfg.data_path.empty()) {
    if (cfg.r < 1 || cfg.dim <= cfg.r) {
      throw UsageError("need 1 <= r < D (got r=" + std::to_string(cfg.r) +
                       ", D=" + std::to_string(cfg.dim) + ")");
    }
    if (cfg.n < 1) throw UsageError("N must be >= 1");
    if (!(cfg.inlier_ratio >= 0 && cfg.inlier_ratio <= 1)) {
      throw UsageError("inlier ratio must lie in [0, 1]");
    }
  } else if (!std::filesystem::exists(cfg.data_path)) {
    throw UsageError("data file not found: " + cfg.data_path);
  }
  if (!cfg.truth_path.empty() && !std::filesystem::exists(cfg.truth_path)) {
    throw UsageError("truth file not found: " + cfg.truth_path);
  }
  if (cfg.reps < 1) throw UsageError("reps must be >= 1");
  if (cfg.threads < 1) throw UsageError("threads must be >= 1");
  if (!(cfg.epsilon > 0)) throw UsageError("epsilon must be positive");
  if (cfg.delta && !(*cfg.delta > 0 && *cfg.delta < 1)) {
    throw UsageError("delta must lie in (0, 1)");
  }
  if (cfg.iterations && *cfg.iterations < 1) throw UsageError("iterations must be >= 1");
  if (!(cfg.noise_variance >= 0)) throw UsageError("noise variance must be >= 0");
  if (!(cfg.gamma > 0 && cfg.gamma <= 1)) throw UsageError("gamma must lie in (0, 1]");
  if (cfg.init != "auto" && cfg.init != "pca" && cfg.init != "dp-pca") {
    throw UsageError("unknown init '" + cfg.init + "' (valid: auto, pca, dp-pca)");
  }
  try {
    ScheduleOf(cfg).Validate();
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::vector<Algorithm> algs =
      cfg.algorithms.empty() ? std::vector<Algorithm>{cfg.algorithm} : cfg.algorithms;
  for (Algorithm a : algs) {
    if (cfg.batch_size) {
      if (!IsStochastic(a)) {
        throw UsageError(std::string("batch size given but ") + AlgorithmName(a) +
                         " is not a stochastic algorithm");
      }
      if (*cfg.batch_size < 1) throw UsageError("batch size must be >= 1");
    }
    if (IsNoiseFree(a) && (cfg.private_run || cfg.noise_variance > 0)) {
      throw UsageError(std::string(AlgorithmName(a)) +
                       " is noise-free; use nggd/nsggd for noisy or private runs");
    }
  }
}

void ParallelFor(int count, int threads, const std::function<void(int)>& fn) {
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min(threads, count));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

HaystackParams HaystackFor(const ExperimentConfig& cfg, int n, int dim,
                           uint64_t seed) {
  HaystackParams p;
  p.r = cfg.r;
  p.D = dim;
  p.n_in = static_cast<int>(std::lround(n * cfg.inlier_ratio));
  p.n_out = n - p.n_in;
  p.inlier_scale = cfg.inlier_scale;
  p.outlier_scale = cfg.outlier_scale;
  p.seed = seed;
  return p;
}

RepetitionResult RunAlgorithm(const ExperimentConfig& cfg, Algorithm algorithm,
                              const LabeledDataset& data, uint64_t seed) {
  RepetitionResult out;
  const int n = data.size();
  const int r = RankOf(cfg, data);
  out.iterations = cfg.iterations.value_or(n);
  if (IsStochastic(algorithm)) {
    out.batch_size = cfg.batch_size.value_or(BatchSizeRule(n, cfg.epsilon, out.iterations));
  }

  double sigma2 = cfg.noise_variance;
  if (cfg.private_run) {
    PrivacyBudget budget;
    budget.epsilon = cfg.epsilon;
    budget.delta = cfg.delta.value_or(1.0 / std::sqrt(static_cast<double>(n)));
    budget.iterations = out.iterations;
    budget.n = n;
    budget.batch_size = out.batch_size;
    budget.c = cfg.c;
    budget.c2 = cfg.c2;
    const Mechanism mechanism = MechanismFor(algorithm);
    out.noise = Calibrate(mechanism, budget);
    out.warnings = ValidateBudget(budget, mechanism);
    sigma2 = out.noise->sigma2;
  }

  if (IsReaper(algorithm)) {
    ReaperConfig rc;
    rc.iterations = out.iterations;
    rc.step0 = cfg.reap_step0;
    rc.batch_size = out.batch_size;
    rc.noise_variance = sigma2;
    rc.solver = (algorithm == Algorithm::kMdReap || algorithm == Algorithm::kSmdReap)
                    ? ReaperSolver::kMirror
                    : ReaperSolver::kGradient;
    rc.seed = DeriveSeed(seed, {1});
    rc.record_objective = cfg.record_objective;
    rc.record_time = cfg.timing;
    out.records = RunReaper(data, r, rc).records;
    return out;
  }

  const bool dp_init = cfg.init == "dp-pca" || (cfg.init == "auto" && cfg.private_run);
  Rng init_rng(DeriveSeed(seed, {2}));
  const double delta = cfg.delta.value_or(1.0 / std::sqrt(static_cast<double>(n)));
  const SpectralSubspace init = dp_init
      ? DpPcaInit(data.points, r, cfg.epsilon, delta, init_rng)
      : PcaInit(data.points, r);
  if (init.ill_defined) out.warnings.push_back("initial PCA subspace has a zero eigengap");

  GladConfig gc;
  gc.iterations = out.iterations;
  gc.schedule = ScheduleOf(cfg);
  gc.batch_size = out.batch_size;
  gc.noise_variance = sigma2;
  gc.seed = DeriveSeed(seed, {1});
  gc.record_objective = cfg.record_objective;
  gc.record_time = cfg.timing;
  out.records = RunGlad(data, init.basis, gc).records;
  return out;
}

double SafeLog10(double value) { return std::log10(std::max(value, 1e-300)); }

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double pos = q * (values.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

GenerateOutput CmdGenerate(const ExperimentConfig& cfg) {
  ValidateExperiment(cfg);
  if (!cfg.data_path.empty()) throw UsageError("generate does not take --data");
  EnsureOutDir(cfg);
  const LabeledDataset data = GenerateHaystack(HaystackFor(cfg, cfg.n, cfg.dim, cfg.seed));
  GenerateOutput out;
  out.points_path = OutPath(cfg, "points.csv");
  out.truth_path = OutPath(cfg, "truth.csv");
  SaveCsv(data, out.points_path);
  SaveBasisCsv(*data.truth, out.truth_path);
  out.rows = data.size();
  out.inliers = data.count(Label::kInlier);
  return out;
}

RunSummary CmdRun(const ExperimentConfig& cfg) {
  ValidateExperiment(cfg);
  EnsureOutDir(cfg);
  const Algorithm alg = cfg.algorithm;
  std::vector<RepetitionResult> results(cfg.reps);
  ParallelFor(cfg.reps, cfg.threads, [&](int rep) {
    const auto r = static_cast<uint64_t>(rep);
    const LabeledDataset data = LoadData(cfg, DeriveSeed(cfg.seed, {0, r, 0}));
    if (!data.truth) throw UsageError("run needs a truth basis to measure errors");
    try {
      results[rep] = RunAlgorithm(cfg, alg, data, DeriveSeed(cfg.seed, {0, r, 1}));
    } catch (const DegenerateInputError& e) {
      throw DegenerateInputError("repetition " + std::to_string(rep) + ": " + e.what());
    }
  });

  RunSummary summary;
  const std::string name = AlgorithmName(alg);
  for (int rep = 0; rep < cfg.reps; ++rep) {
    const std::string path = OutPath(cfg, name + "_rep" + std::to_string(rep) + ".csv");
    SaveTrajectoryCsv(results[rep].records, path);
    summary.trajectory_paths.push_back(path);
    summary.final_dist2.push_back(results[rep].records.back().dist2);
  }

  summary.summary_path = OutPath(cfg, name + "_summary.csv");
  {
    std::ofstream out(summary.summary_path);
    if (!out) throw std::runtime_error("cannot write " + summary.summary_path);
    out << "iter,median_log10_dist2,q25_log10_dist2,q75_log10_dist2\n";
    const size_t length = results[0].records.size();
    for (size_t k = 0; k < length; ++k) {
      std::vector<double> logs;
      for (const auto& res : results) logs.push_back(SafeLog10(res.records[k].dist2));
      out << k << ',' << FormatDouble(Quantile(logs, 0.5)) << ','
          << FormatDouble(Quantile(logs, 0.25)) << ','
          << FormatDouble(Quantile(logs, 0.75)) << '\n';
    }
  }

  std::vector<double> final_logs;
  double sum = 0.0;
  for (double e : summary.final_dist2) {
    final_logs.push_back(SafeLog10(e));
    sum += final_logs.back();
  }
  summary.final_median_log10 = Quantile(final_logs, 0.5);
  summary.final_mean_log10 = sum / cfg.reps;
  summary.noise = results[0].noise;
  summary.warnings = results[0].warnings;

  std::ostringstream text;
  text << "algorithm=" << name << '\n'
       << "reps=" << cfg.reps << '\n'
       << "T=" << results[0].iterations << '\n'
       << "B=" << (results[0].batch_size ? std::to_string(*results[0].batch_size) : "none")
       << '\n'
       << "private=" << (cfg.private_run ? "true" : "false") << '\n';
  if (summary.noise) {
    const std::string noise_path = OutPath(cfg, name + "_noise.txt");
    std::string provenance = summary.noise->Provenance();
    for (const auto& w : summary.warnings) provenance += "warning=" + w + "\n";
    WriteText(noise_path, provenance);
    text << provenance;
  } else {
    for (const auto& w : summary.warnings) text << "warning=" << w << '\n';
  }
  text << Line("final_median_log10_dist2", summary.final_median_log10)
       << Line("final_mean_log10_dist2", summary.final_mean_log10)
       << "summary=" << summary.summary_path << '\n';
  summary.text = text.str();
  return summary;
}

StatsOutput CmdStats(const ExperimentConfig& cfg) {
  ValidateExperiment(cfg);
  EnsureOutDir(cfg);
  const LabeledDataset data = LoadData(cfg, cfg.seed);
  if (!data.has_labels()) throw UsageError("stats needs a labeled dataset (label column)");
  if (!data.truth) throw UsageError("stats needs a truth basis (--truth)");
  const int r = data.truth->rank();

  AlignmentSearch search;
  search.seed = DeriveSeed(cfg.seed, {3});
  const StabilityReport glad = StabilityGlad(data, r, cfg.gamma, search);
  const double pca = StabilityPca(data, r, cfg.gamma);
  const ReaperStabilityReport reap = ReaperStats(data);

  const std::vector<std::pair<std::string, double>> rows = {
      {"N", data.size()},
      {"D", data.dim()},
      {"r", r},
      {"inliers", data.count(Label::kInlier)},
      {"outliers", data.count(Label::kOutlier)},
      {"gamma", cfg.gamma},
      {"permeance", glad.permeance},
      {"alignment_lower", glad.alignment_lower},
      {"alignment_upper", glad.alignment_upper},
      {"stability_lower", glad.stability_lower},
      {"stability_upper", glad.stability_upper},
      {"permeance_rank_deficient", glad.permeance_rank_deficient ? 1.0 : 0.0},
      {"stability_pca", pca},
      {"permeance_reap", reap.permeance},
      {"alignment_reap", reap.alignment},
      {"stability_reap", reap.stability},
      {"h_diameter", HDiameter(data.dim(), r)},
  };
  StatsOutput out;
  out.csv_path = OutPath(cfg, "stats.csv");
  std::ostringstream csv;
  std::ostringstream text;
  csv << "key,value\n";
  for (const auto& [key, value] : rows) {
    csv << key << ',' << FormatDouble(value) << '\n';
    text << Line(key, value);
  }
  WriteText(out.csv_path, csv.str());
  out.text = text.str();
  out.stability_lower = glad.stability_lower;
  out.stability_upper = glad.stability_upper;
  out.stability_pca = pca;
  out.stability_reap = reap.stability;
  return out;
}

PhaseOutput CmdPhase(const ExperimentConfig& cfg) {
  ValidateExperiment(cfg);
  if (!cfg.data_path.empty()) throw UsageError("phase generates its own data; drop --data");
  if (cfg.n_grid.empty() || cfg.d_grid.empty()) throw UsageError("phase needs --n-grid and --d-grid");
  for (int d : cfg.d_grid) {
    if (d <= cfg.r) throw UsageError("every D in the grid must exceed r");
  }
  for (int n : cfg.n_grid) {
    if (n < 1) throw UsageError("every N in the grid must be >= 1");
  }
  const std::vector<Algorithm> algs =
      cfg.algorithms.empty() ? std::vector<Algorithm>{cfg.algorithm} : cfg.algorithms;
  const int nn = static_cast<int>(cfg.n_grid.size());
  const int nd = static_cast<int>(cfg.d_grid.size());
  auto iterations_for = [&](int n) { return cfg.iterations.value_or(2 * n); };

  PhaseOutput out;
  for (size_t a = 0; a < algs.size(); ++a) {
    for (int n : cfg.n_grid) out.work += static_cast<long long>(nd) * cfg.reps * iterations_for(n);
  }
  std::ostringstream text;
  text << "algorithms=" << algs.size() << '\n'
       << "cells=" << nn * nd << '\n'
       << "reps=" << cfg.reps << '\n'
       << "work_iterations=" << out.work << '\n';
  if (cfg.dry_run) {
    text << "dry_run=true\n";
    out.text = text.str();
    return out;
  }
  EnsureOutDir(cfg);

  const int per_alg = nn * nd * cfg.reps;
  const int total = static_cast<int>(algs.size()) * per_alg;
  std::vector<double> final_error(total, kNaN);
  std::vector<std::string> failure(total);
  ParallelFor(total, cfg.threads, [&](int task) {
    const int a = task / per_alg;
    const int cell = (task % per_alg) / cfg.reps;
    const int rep = task % cfg.reps;
    const int n = cfg.n_grid[cell / nd];
    const int d = cfg.d_grid[cell % nd];
    const auto c = static_cast<uint64_t>(cell);
    const auto rp = static_cast<uint64_t>(rep);
    try {
      ExperimentConfig cell_cfg = cfg;
      cell_cfg.n = n;
      cell_cfg.dim = d;
      cell_cfg.iterations = iterations_for(n);
      cell_cfg.record_objective = false;
      const LabeledDataset data =
          GenerateHaystack(HaystackFor(cfg, n, d, DeriveSeed(cfg.seed, {c, rp, 0})));
      const RepetitionResult res =
          RunAlgorithm(cell_cfg, algs[a], data, DeriveSeed(cfg.seed, {c, rp, 1}));
      final_error[task] = res.records.back().dist2;
    } catch (const std::exception& e) {
      failure[task] = e.what();
    }
  });

  out.cells.assign(algs.size(), std::vector<std::vector<double>>(nn, std::vector<double>(nd)));
  for (size_t a = 0; a < algs.size(); ++a) {
    const std::string name = AlgorithmName(algs[a]);
    std::string log;
    std::ostringstream csv;
    csv << "N\\D";
    for (int d : cfg.d_grid) csv << ',' << d;
    csv << '\n';
    for (int i = 0; i < nn; ++i) {
      csv << cfg.n_grid[i];
      for (int j = 0; j < nd; ++j) {
        double sum = 0.0;
        bool failed = false;
        for (int rep = 0; rep < cfg.reps; ++rep) {
          const int task = static_cast<int>(a) * per_alg + (i * nd + j) * cfg.reps + rep;
          if (!failure[task].empty()) {
            failed = true;
            log += "N=" + std::to_string(cfg.n_grid[i]) + " D=" +
                   std::to_string(cfg.d_grid[j]) + " rep=" + std::to_string(rep) +
                   ": " + failure[task] + "\n";
          } else {
            sum += SafeLog10(final_error[task]);
          }
        }
        const double value = failed ? kNaN : sum / cfg.reps;
        out.cells[a][i][j] = value;
        csv << ',' << FormatDouble(value);
      }
      csv << '\n';
    }
    const std::string path = OutPath(cfg, "phase_" + name + ".csv");
    WriteText(path, csv.str());
    out.csv_paths.push_back(path);
    text << "csv=" << path << '\n';
    if (!log.empty()) {
      const std::string log_path = OutPath(cfg, "phase_" + name + ".log");
      WriteText(log_path, log);
      text << "failures=" << log_path << '\n';
    }
  }
  out.text = text.str();
  return out;
}

}  // namespace rsr
