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

#include "rsr/privacy.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rsr/data.h"

namespace rsr {
namespace {

double RequireBatchRatio(const PrivacyBudget& b) {
  if (!b.batch_size) {
    throw std::invalid_argument("stochastic calibration needs a batch size");
  }
  return static_cast<double>(*b.batch_size) / b.n;
}

double DenominatorOf(const PrivacyBudget& b) {
  const double n = b.n;
  return b.epsilon * b.epsilon * n * n;
}

NoisePlan MakePlan(double sigma2, Mechanism m, const PrivacyBudget& b,
                   std::string formula) {
  NoisePlan plan;
  plan.sigma2 = sigma2;
  plan.mechanism = m;
  plan.budget = b;
  plan.formula = std::move(formula);
  return plan;
}

}  // namespace

void PrivacyBudget::Validate() const {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (iterations < 0) throw std::invalid_argument("T must be >= 0");
  if (n < 1) throw std::invalid_argument("N must be >= 1");
  if (batch_size && (*batch_size < 1 || *batch_size > n)) {
    throw std::invalid_argument("batch size must lie in [1, N]");
  }
  if (!(c > 0) || !(c2 > 0)) throw std::invalid_argument("constants must be positive");
}

const char* MechanismName(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kNggd: return "nggd";
    case Mechanism::kNsggd: return "nsggd";
    case Mechanism::kReapFull: return "reap_full";
    case Mechanism::kReapStochastic: return "reap_stochastic";
  }
  return "unknown";
}

std::string NoisePlan::Provenance() const {
  std::ostringstream out;
  out << "mechanism=" << MechanismName(mechanism) << '\n'
      << "formula=" << formula << '\n'
      << "sigma2=" << FormatDouble(sigma2) << '\n'
      << "epsilon=" << FormatDouble(budget.epsilon) << '\n'
      << "delta=" << FormatDouble(budget.delta) << '\n'
      << "T=" << budget.iterations << '\n'
      << "N=" << budget.n << '\n'
      << "B=" << (budget.batch_size ? std::to_string(*budget.batch_size) : "none") << '\n'
      << "c=" << FormatDouble(budget.c) << '\n'
      << "c2=" << FormatDouble(budget.c2) << '\n';
  if (mechanism == Mechanism::kNsggd) {
    // A variant of the same bound uses log^2(1/delta); reported for
    // audit only.
    const double log_term = std::log(1.0 / budget.delta);
    out << "log_squared_formula=c2*(B/N)^2*T*log(1/delta)^2/(eps^2*N^2)\n"
        << "log_squared_sigma2=" << FormatDouble(sigma2 * log_term) << '\n';
  }
  return out.str();
}

NoisePlan CalibrateNggd(const PrivacyBudget& b) {
  b.Validate();
  const double log_term = std::log(1.0 / b.delta);
  const double sigma2 = b.c * b.iterations * log_term * log_term / DenominatorOf(b);
  return MakePlan(sigma2, Mechanism::kNggd, b, "c*T*log(1/delta)^2/(eps^2*N^2)");
}

NoisePlan CalibrateNsggd(const PrivacyBudget& b) {
  b.Validate();
  const double q = RequireBatchRatio(b);
  const double sigma2 =
      b.c2 * q * q * b.iterations * std::log(1.0 / b.delta) / DenominatorOf(b);
  return MakePlan(sigma2, Mechanism::kNsggd, b, "c2*(B/N)^2*T*log(1/delta)/(eps^2*N^2)");
}

NoisePlan CalibrateReapFull(const PrivacyBudget& b) {
  b.Validate();
  // T = 0 has no iterations to protect; log(0/delta) is undefined.
  const double log_term = b.iterations > 0 ? std::log(b.iterations / b.delta) : 0.0;
  const double sigma2 = 32.0 * b.iterations * log_term * log_term / DenominatorOf(b);
  return MakePlan(sigma2, Mechanism::kReapFull, b, "32*T*log(T/delta)^2/(eps^2*N^2)");
}

NoisePlan CalibrateReapStochastic(const PrivacyBudget& b) {
  b.Validate();
  const double q = RequireBatchRatio(b);
  const double sigma2 =
      b.c2 * q * q * b.iterations * std::log(1.0 / b.delta) / DenominatorOf(b);
  return MakePlan(sigma2, Mechanism::kReapStochastic, b,
                  "c2*(B/N)^2*T*log(1/delta)/(eps^2*N^2)");
}

NoisePlan Calibrate(Mechanism mechanism, const PrivacyBudget& budget) {
  switch (mechanism) {
    case Mechanism::kNggd: return CalibrateNggd(budget);
    case Mechanism::kNsggd: return CalibrateNsggd(budget);
    case Mechanism::kReapFull: return CalibrateReapFull(budget);
    case Mechanism::kReapStochastic: return CalibrateReapStochastic(budget);
  }
  throw std::invalid_argument("unknown mechanism");
}

double Reevaluate(const NoisePlan& plan) {
  return Calibrate(plan.mechanism, plan.budget).sigma2;
}

int BatchSizeRule(int n, double epsilon, int iterations) {
  if (n < 1 || !(epsilon > 0) || iterations < 1) {
    throw std::invalid_argument("batch size rule needs N, eps, T > 0");
  }
  double raw = std::max(n * std::sqrt(epsilon / (4.0 * iterations)), 1.0);
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) <= 1e-9 * std::max(1.0, nearest)) raw = nearest;
  const double clamped = std::min(std::ceil(raw), static_cast<double>(n));
  return std::max(1, static_cast<int>(clamped));
}

std::vector<std::string> ValidateBudget(const PrivacyBudget& b,
                                        Mechanism mechanism) {
  std::vector<std::string> warnings;
  const double ceiling = static_cast<double>(b.n) * b.n * b.epsilon * b.epsilon;
  if (b.iterations > ceiling) {
    warnings.push_back("T=" + std::to_string(b.iterations) +
                       " exceeds the iteration ceiling N^2 eps^2=" +
                       FormatDouble(ceiling));
  }
  double regime = 0.0;
  std::string regime_name;
  if (mechanism == Mechanism::kNggd || mechanism == Mechanism::kReapFull) {
    regime = b.c * b.iterations;
    regime_name = "c*T";
  } else if (b.batch_size && b.n > 0) {
    const double q = static_cast<double>(*b.batch_size) / b.n;
    regime = b.c * q * q * b.iterations;
    regime_name = "c*q^2*T";
  }
  if (!regime_name.empty() && !(b.epsilon < regime)) {
    warnings.push_back("eps=" + FormatDouble(b.epsilon) + " is not below " +
                       regime_name + "=" + FormatDouble(regime) +
                       "; the calibration theorem does not cover this regime");
  }
  return warnings;
}

}  // namespace rsr
