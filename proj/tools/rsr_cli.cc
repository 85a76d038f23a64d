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

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rsr/experiment.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
  rsr::ExperimentConfig cfg;
  CLI::App app{"Robust subspace recovery experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value config file; flags override it");

  // All options live on the main app so that the flat config file can set
  // them; subcommands fall through to it.
  std::string algorithm = "nsggd";
  std::vector<std::string> algorithms;
  std::optional<int> reps;
  std::optional<int> iterations;
  std::optional<int> batch_size;
  std::optional<double> delta;
  bool paper_scale = false;
  bool no_objective = false;

  app.add_option("--seed", cfg.seed, "Master seed");
  app.add_option("--out", cfg.out_dir, "Output directory");
  app.add_option("--reps", reps, "Repetitions (run: 20, phase: 10)");
  app.add_option("--threads", cfg.threads, "Worker threads");
  app.add_flag("--paper-scale", paper_scale, "Default to 100 (run) or 50 (phase) repetitions");

  app.add_option("--algorithm", algorithm, "ggd, nggd, sggd, nsggd, gd-reap, sgd-reap, md-reap, smd-reap");
  app.add_option("--algorithms", algorithms, "Comma-separated algorithms for phase")->delimiter(',');
  app.add_option("--r", cfg.r, "Subspace dimension");
  app.add_option("--dim", cfg.dim, "Ambient dimension D");
  app.add_option("--n", cfg.n, "Number of points");
  app.add_option("--inlier-ratio", cfg.inlier_ratio, "Fraction of inliers");
  app.add_option("--inlier-scale", cfg.inlier_scale);
  app.add_option("--outlier-scale", cfg.outlier_scale);
  app.add_option("--data", cfg.data_path, "Points CSV (optional label column)");
  app.add_option("--truth", cfg.truth_path, "Ground-truth basis CSV");

  app.add_flag("--private", cfg.private_run, "Calibrate noise to (epsilon, delta)");
  app.add_option("--epsilon", cfg.epsilon);
  app.add_option("--delta", delta, "Defaults to 1/sqrt(N)");
  app.add_option("--c", cfg.c, "Calibration constant");
  app.add_option("--c2", cfg.c2, "Second calibration constant (stochastic REAP)");
  app.add_option("--noise-variance", cfg.noise_variance, "Explicit noise variance for non-private runs");

  app.add_option("--iterations", iterations, "T (run: N, phase: 2N)");
  app.add_option("--batch-size", batch_size, "Minibatch size for stochastic algorithms");
  app.add_option("--schedule", cfg.schedule, "halving, constant or power");
  app.add_option("--step0", cfg.step0);
  app.add_option("--halving-period", cfg.halving_period);
  app.add_option("--power-c1", cfg.power_c1);
  app.add_option("--power-a", cfg.power_a);
  app.add_option("--power-nu", cfg.power_nu);
  app.add_option("--init", cfg.init, "auto, pca or dp-pca");
  app.add_option("--reap-step0", cfg.reap_step0, "REAP step is reap-step0/sqrt(k)");
  app.add_option("--gamma", cfg.gamma);
  app.add_flag("--timing", cfg.timing, "Record wall time (breaks byte determinism)");
  app.add_flag("--no-objective", no_objective, "Skip the objective column");

  app.add_option("--n-grid", cfg.n_grid, "Comma-separated N values")->delimiter(',');
  app.add_option("--d-grid", cfg.d_grid, "Comma-separated D values")->delimiter(',');
  app.add_flag("--dry-run", cfg.dry_run, "Print the phase work estimate only");

  CLI::App* generate = app.add_subcommand("generate", "Write a haystack dataset");
  CLI::App* run = app.add_subcommand("run", "Run one algorithm over repetitions");
  CLI::App* stats = app.add_subcommand("stats", "Stability statistics of a labeled dataset");
  CLI::App* phase = app.add_subcommand("phase", "N-vs-D phase sweep");
  for (CLI::App* sub : {generate, run, stats, phase}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    cfg.algorithm = rsr::ParseAlgorithm(algorithm);
    for (const auto& name : algorithms) cfg.algorithms.push_back(rsr::ParseAlgorithm(name));
    cfg.iterations = iterations;
    cfg.batch_size = batch_size;
    cfg.delta = delta;
    cfg.record_objective = !no_objective;

    if (generate->parsed()) {
      const rsr::GenerateOutput out = rsr::CmdGenerate(cfg);
      std::printf("points=%s\ntruth=%s\nrows=%d\ninliers=%d\n", out.points_path.c_str(),
                  out.truth_path.c_str(), out.rows, out.inliers);
    } else if (run->parsed()) {
      cfg.reps = reps.value_or(paper_scale ? 100 : 20);
      std::fputs(rsr::CmdRun(cfg).text.c_str(), stdout);
    } else if (stats->parsed()) {
      std::fputs(rsr::CmdStats(cfg).text.c_str(), stdout);
    } else if (phase->parsed()) {
      cfg.reps = reps.value_or(paper_scale ? 50 : 10);
      std::fputs(rsr::CmdPhase(cfg).text.c_str(), stdout);
    }
  } catch (const rsr::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
