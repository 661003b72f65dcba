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

// Authorization level tables and Chernoff-planned session parameters.

#ifndef CHSHAUTH_PLANNER_H_
#define CHSHAUTH_PLANNER_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace chshauth {

struct Level {
  int index = 0;             // 1-based
  double concurrence = 0.0;  // C_i
  double theta = 0.0;        // arcsin(C_i) / 2
  double omega = 0.0;        // optimal CHSH win probability at C_i
};

class LevelTable {
 public:
  LevelTable() = default;
  // Throws DomainError unless the concurrences are strictly increasing and in
  // (0, 1].
  explicit LevelTable(const std::vector<double>& concurrences);

  int size() const { return static_cast<int>(levels_.size()); }
  const std::vector<Level>& levels() const { return levels_; }
  // Throws DomainError unless 1 <= k <= size().
  const Level& level(int k) const;

 private:
  std::vector<Level> levels_;
};

// C_i = i / ell for i = 1..ell.
LevelTable build_level_table(int ell);

// c^2 N / 2, the base-2 exponent of the Chernoff tail bound.
double chernoff_exponent(double c, std::int64_t n);

// 2^(-c^2 N / 2), bounding Pr[|sum X_i - mu| >= c mu].
double chernoff_tail(double c, std::int64_t n);

enum class PlanMode { kPaper, kStrict };

std::string_view to_string(PlanMode mode);
// Throws DomainError for anything but "paper" or "strict".
PlanMode parse_plan_mode(std::string_view text);

struct ProtocolParams {
  int lambda = 0;              // security exponent in bits
  int ell = 0;                 // number of levels
  double c = 0.0;              // relative deviation
  std::int64_t n = 0;          // rounds per session
  double mu = 0.0;             // reference mean in wins, (3/4) N
  std::int64_t epsilon = 0;    // acceptance half-width in wins
  PlanMode mode = PlanMode::kPaper;

  friend bool operator==(const ProtocolParams&,
                         const ProtocolParams&) = default;
};

// Paper mode: c = 1/(2 ell), N = 2 lambda / c^2, mu = 3N/4, eps = c mu.
// Strict mode: eps and N chosen so that every pair of adjacent acceptance
// intervals is disjoint, the classical expectation 3N/4 lies below all of
// them, and the Chernoff tail still meets 2^-lambda. Throws DomainError on
// bad arguments and PlanningError when strict mode is infeasible.
ProtocolParams plan_params(int lambda, int ell, PlanMode mode,
                           const LevelTable& table);

// Parameters for a fixed round count. eps follows the mode's rule for that N
// and lambda records the security actually achieved, floor(c^2 N / 2).
ProtocolParams plan_with_rounds(int ell, PlanMode mode, std::int64_t n,
                                const LevelTable& table);

struct AcceptanceInterval {
  std::int64_t center = 0;
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  bool contains(std::int64_t wins) const { return lo <= wins && wins <= hi; }
};

// Closed interval [round(N omega_k) - eps, round(N omega_k) + eps], rounding
// half to even.
AcceptanceInterval acceptance_interval(int level_k,
                                       const ProtocolParams& params,
                                       const LevelTable& table);

struct OverlapReport {
  struct PairCheck {
    int lower_level = 0;
    int upper_level = 0;
    bool disjoint = false;
    // upper.lo - lower.hi - 1: number of win counts strictly between the two
    // intervals. Negative when they overlap.
    std::int64_t margin = 0;
  };
  std::vector<PairCheck> pairs;
  // 3N/4 lies outside every acceptance interval.
  bool classical_excluded = false;
  // Distance from 3N/4 to the nearest interval endpoint (negative if inside).
  double classical_margin = 0.0;

  bool pass() const;
};

OverlapReport check_no_overlap(const ProtocolParams& params,
                               const LevelTable& table);

nlohmann::json to_json(const ProtocolParams& params);
ProtocolParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LevelTable& table);
nlohmann::json to_json(const OverlapReport& report);

// Columns: level,C,theta,omega,lo,hi.
void write_table_csv(std::ostream& out, const LevelTable& table,
                     const ProtocolParams& params);

}  // namespace chshauth

#endif  // CHSHAUTH_PLANNER_H_
