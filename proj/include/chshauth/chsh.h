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

// CHSH game: winning predicate, win probabilities and the optimal quantum and
// classical strategies.

#ifndef CHSHAUTH_CHSH_H_
#define CHSHAUTH_CHSH_H_

#include <array>
#include <utility>
#include <vector>

#include "chshauth/qsim.h"

namespace chshauth {

// s is the Authorizer's (Alice's) question, t the User's (Bob's).
struct QuestionPair {
  int s = 0;
  int t = 0;
};

// Won iff s AND t == a XOR b.
constexpr bool is_win(QuestionPair q, int a, int b) {
  return (q.s & q.t) == (a ^ b);
}

// Optimal quantum win probability 1/2 + sqrt(1 + C^2)/4 for concurrence C.
double omega_of_concurrence(double concurrence);

// omega_of_concurrence(sin 2 theta), theta in [0, pi/4].
double omega_of_theta(double theta);

struct QuantumStrategy {
  std::array<MeasurementSetting, 2> alice;  // indexed by s
  std::array<MeasurementSetting, 2> bob;    // indexed by t
};

// Alice measures Z for s = 0 and X for s = 1; Bob measures at +beta for t = 0
// and -beta for t = 1 with tan(beta) = sin(2 theta). Attains
// omega_of_theta(theta) on make_partially_entangled(theta).
QuantumStrategy optimal_strategy(double theta);

// Exact average over the four question pairs.
double win_probability(const TwoQubitPureState& state,
                       const QuantumStrategy& strategy);

// Pr(win | s, t) for a single question pair.
double win_probability(const TwoQubitPureState& state,
                       const QuantumStrategy& strategy, QuestionPair q);

struct ClassicalStrategy {
  std::array<int, 2> alice_table{};  // answer a for each s
  std::array<int, 2> bob_table{};    // answer b for each t
};

double classical_win_probability(const ClassicalStrategy& strategy);

// All 16 deterministic strategies.
std::vector<ClassicalStrategy> all_classical_strategies();

// First strategy (in enumeration order) attaining the maximum, and the
// maximum itself.
std::pair<ClassicalStrategy, double> classical_maximum();

}  // namespace chshauth

#endif  // CHSHAUTH_CHSH_H_
