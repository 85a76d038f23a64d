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

#ifndef RSR_EXPERIMENT_H_
#define RSR_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rsr/data.h"
#include "rsr/glad.h"
#include "rsr/privacy.h"

namespace rsr {

// Invalid or inconsistent experiment settings. The CLI maps this to exit 1.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

enum class Algorithm { kGgd, kNggd, kSggd, kNsggd, kGdReap, kSgdReap, kMdReap, kSmdReap };

const char* AlgorithmName(Algorithm algorithm);
// Throws UsageError listing the valid names.
Algorithm ParseAlgorithm(std::string_view name);
bool IsStochastic(Algorithm algorithm);
bool IsReaper(Algorithm algorithm);

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kNsggd;
  std::vector<Algorithm> algorithms;  // phase sweeps; empty means {algorithm}

  // Data: a haystack instance unless data_path is set.
  int r = 2;
  int dim = 20;
  int n = 2000;
  double inlier_ratio = 0.5;
  double inlier_scale = 1.0;
  double outlier_scale = 1.0;
  std::string data_path;
  std::string truth_path;

  // Privacy. delta defaults to 1/sqrt(N).
  bool private_run = false;
  double epsilon = 0.8;
  std::optional<double> delta;
  double c = 1.0;
  double c2 = 1.0;
  // Explicit per-entry noise variance for non-private nggd/nsggd/REAP runs.
  double noise_variance = 0.0;

  // Iterations default to N (run) or 2N (phase).
  std::optional<int> iterations;
  // Defaults to BatchSizeRule(N, epsilon, T) for stochastic algorithms.
  std::optional<int> batch_size;

  // GLAD step schedule: "halving", "constant" or "power".
  std::string schedule = "halving";
  double step0 = 1.0;
  int halving_period = 50;
  double power_c1 = 1.0;
  double power_a = 1.0;
  double power_nu = 0.75;
  // "auto" (dp-pca for private runs, pca otherwise), "pca" or "dp-pca".
  std::string init = "auto";

  double reap_step0 = 8.0;

  double gamma = 0.5;

  int reps = 10;
  uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = ".";
  bool timing = false;
  bool record_objective = true;

  std::vector<int> n_grid;
  std::vector<int> d_grid;
  bool dry_run = false;
};

// Throws UsageError on inconsistent settings.
void ValidateExperiment(const ExperimentConfig& cfg);

// Runs fn(0..count-1) on `threads` workers. The first exception thrown by any
// task is rethrown after all workers finish.
void ParallelFor(int count, int threads, const std::function<void(int)>& fn);

// Haystack parameters for (n, dim) under cfg's ratio and scales.
HaystackParams HaystackFor(const ExperimentConfig& cfg, int n, int dim,
                           uint64_t seed);

struct RepetitionResult {
  std::vector<IterationRecord> records;
  std::optional<NoisePlan> noise;
  std::vector<std::string> warnings;
  int iterations = 0;
  std::optional<int> batch_size;
};

// One run of cfg.algorithm on `data` (which must carry a truth basis for
// error columns). All randomness comes from `seed`.
RepetitionResult RunAlgorithm(const ExperimentConfig& cfg, Algorithm algorithm,
                              const LabeledDataset& data, uint64_t seed);

// log10(max(value, 1e-300)).
double SafeLog10(double value);

// Linear-interpolation quantile of an unsorted sample.
double Quantile(std::vector<double> values, double q);

// --- subcommands ---

struct GenerateOutput {
  std::string points_path;
  std::string truth_path;
  int rows = 0;
  int inliers = 0;
};
GenerateOutput CmdGenerate(const ExperimentConfig& cfg);

struct RunSummary {
  std::string summary_path;
  std::vector<std::string> trajectory_paths;
  // Over repetitions, of log10 grassmann_dist2 of the final iterate.
  double final_median_log10 = 0.0;
  double final_mean_log10 = 0.0;
  std::vector<double> final_dist2;
  std::optional<NoisePlan> noise;
  std::vector<std::string> warnings;
  // key=value text printed by the CLI.
  std::string text;
};
RunSummary CmdRun(const ExperimentConfig& cfg);

struct StatsOutput {
  std::string csv_path;
  // key=value text printed by the CLI.
  std::string text;
  double stability_lower = 0.0;
  double stability_upper = 0.0;
  double stability_pca = 0.0;
  double stability_reap = 0.0;
};
StatsOutput CmdStats(const ExperimentConfig& cfg);

struct PhaseOutput {
  std::vector<std::string> csv_paths;
  // [algorithm][n index][d index] mean log10 final error (NaN when failed).
  std::vector<std::vector<std::vector<double>>> cells;
  long long work = 0;
  std::string text;
};
PhaseOutput CmdPhase(const ExperimentConfig& cfg);

}  // namespace rsr

#endif  // RSR_EXPERIMENT_H_
