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

#ifndef RSR_PRIVACY_H_
#define RSR_PRIVACY_H_

#include <optional>
#include <string>
#include <vector>

namespace rsr {

struct PrivacyBudget {
  double epsilon = 0.8;
  double delta = 0.0;
  int iterations = 0;
  int n = 0;
  std::optional<int> batch_size;
  // Order-level constants of the composition theorems.
  double c = 1.0;
  double c2 = 1.0;

  // Throws std::invalid_argument unless eps > 0, 0 < delta < 1, T >= 0,
  // N >= 1 and 1 <= B <= N when B is present.
  void Validate() const;
};

enum class Mechanism { kNggd, kNsggd, kReapFull, kReapStochastic };

const char* MechanismName(Mechanism mechanism);

// Per-iteration Gaussian noise variance plus everything needed to recompute it.
struct NoisePlan {
  double sigma2 = 0.0;
  Mechanism mechanism = Mechanism::kNggd;
  PrivacyBudget budget;
  std::string formula;

  // Flat key=value lines for audit output.
  std::string Provenance() const;
};

// sigma^2 = c T log^2(1/delta) / (eps^2 N^2).
NoisePlan CalibrateNggd(const PrivacyBudget& budget);
// sigma^2 = c2 (B/N)^2 T log(1/delta) / (eps^2 N^2).
NoisePlan CalibrateNsggd(const PrivacyBudget& budget);
// sigma^2 = 32 T log^2(T/delta) / (eps^2 N^2).
NoisePlan CalibrateReapFull(const PrivacyBudget& budget);
// sigma^2 = c2 (B/N)^2 T log(1/delta) / (eps^2 N^2).
NoisePlan CalibrateReapStochastic(const PrivacyBudget& budget);

NoisePlan Calibrate(Mechanism mechanism, const PrivacyBudget& budget);

// Re-evaluates plan.mechanism on plan.budget.
double Reevaluate(const NoisePlan& plan);

// ceil(max(N sqrt(eps / (4T)), 1)) clamped to [1, N]. Values within 1e-9 of
// an integer are rounded to it before the ceiling so that e.g. 2000 * 0.01
// gives 20 rather than 21.
int BatchSizeRule(int n, double epsilon, int iterations);

// Non-blocking checks: T <= N^2 eps^2 (iteration ceiling, unit constant) and
// the eps < cT (NGGD) / eps < c q^2 T (stochastic mechanisms) regimes.
std::vector<std::string> ValidateBudget(const PrivacyBudget& budget,
                                        Mechanism mechanism);

}  // namespace rsr

#endif  // RSR_PRIVACY_H_
