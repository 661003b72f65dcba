// Copyright 2026 The chshauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chshauth/chsh.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chshauth/errors.h"

namespace chshauth {

namespace {

void check_theta(double theta) {
  if (!(theta >= -1e-12 && theta <= std::numbers::pi / 4 + 1e-12)) {
    throw DomainError("theta must lie in [0, pi/4]");
  }
}

}  // namespace

double omega_of_concurrence(double concurrence) {
  if (!(concurrence >= 0.0 && concurrence <= 1.0)) {
    throw DomainError("concurrence must lie in [0, 1]");
  }
  return 0.5 + 0.25 * std::sqrt(1.0 + concurrence * concurrence);
}

double omega_of_theta(double theta) {
  check_theta(theta);
  const double c = std::sin(2.0 * std::clamp(theta, 0.0, std::numbers::pi / 4));
  return omega_of_concurrence(std::min(c, 1.0));
}

QuantumStrategy optimal_strategy(double theta) {
  check_theta(theta);
  const double beta =
      std::atan(std::sin(2.0 * std::clamp(theta, 0.0, std::numbers::pi / 4)));
  return QuantumStrategy{
      .alice = {MeasurementSetting(0.0),
                MeasurementSetting(std::numbers::pi / 2)},
      .bob = {MeasurementSetting(beta), MeasurementSetting(-beta)},
  };
}

double win_probability(const TwoQubitPureState& state,
                       const QuantumStrategy& strategy, QuestionPair q) {
  const JointDistribution dist =
      joint_distribution(state, strategy.alice[q.s], strategy.bob[q.t]);
  double win = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      if (is_win(q, a, b)) win += dist(a, b);
    }
  }
  return win;
}

double win_probability(const TwoQubitPureState& state,
                       const QuantumStrategy& strategy) {
  double total = 0.0;
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 2; ++t) total += win_probability(state, strategy, {s, t});
  }
  return total / 4.0;
}

double classical_win_probability(const ClassicalStrategy& strategy) {
  int wins = 0;
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 2; ++t) {
      wins += is_win({s, t}, strategy.alice_table[s], strategy.bob_table[t]);
    }
  }
  return wins / 4.0;
}

std::vector<ClassicalStrategy> all_classical_strategies() {
  std::vector<ClassicalStrategy> out;
  out.reserve(16);
  for (int bits = 0; bits < 16; ++bits) {
    out.push_back({.alice_table = {bits & 1, (bits >> 1) & 1},
                   .bob_table = {(bits >> 2) & 1, (bits >> 3) & 1}});
  }
  return out;
}

std::pair<ClassicalStrategy, double> classical_maximum() {
  std::pair<ClassicalStrategy, double> best{{}, -1.0};
  for (const ClassicalStrategy& strategy : all_classical_strategies()) {
    const double value = classical_win_probability(strategy);
    if (value > best.second) best = {strategy, value};
  }
  return best;
}

}  // namespace chshauth
