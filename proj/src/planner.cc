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

#include "chshauth/planner.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "chshauth/chsh.h"
#include "chshauth/errors.h"

namespace chshauth {

namespace {

constexpr double kClassicalWinRate = 0.75;
constexpr std::int64_t kStrictSearchLimit = 10'000'000;

// 8 eps^2 >= 9 lambda N is c^2 N / 2 >= lambda with c = eps / (3N/4), kept
// in integers so the boundary case is decided exactly.
bool meets_security(std::int64_t epsilon, std::int64_t n, int lambda) {
  const std::int64_t lhs = std::int64_t{8} * epsilon * epsilon;
  const std::int64_t rhs = std::int64_t{9} * lambda * n;
  return lhs >= rhs;
}

ProtocolParams make_params(int lambda, int ell, PlanMode mode, std::int64_t n,
                           std::int64_t epsilon) {
  ProtocolParams p;
  p.lambda = lambda;
  p.ell = ell;
  p.mode = mode;
  p.n = n;
  p.mu = kClassicalWinRate * static_cast<double>(n);
  p.epsilon = epsilon;
  p.c = static_cast<double>(epsilon) / p.mu;
  return p;
}

double min_level_gap(const LevelTable& table) {
  double gap = std::numeric_limits<double>::infinity();
  double previous = kClassicalWinRate;
  for (const Level& level : table.levels()) {
    gap = std::min(gap, level.omega - previous);
    previous = level.omega;
  }
  if (!(gap > 0.0)) {
    throw PlanningError("strict planning needs omega_1 > 3/4 and distinct levels");
  }
  return gap;
}

// Largest eps <= N g / 2 keeping the intervals disjoint; 0 if none.
std::int64_t strict_epsilon(int lambda, int ell, std::int64_t n, double gap,
                            const LevelTable& table) {
  auto epsilon = static_cast<std::int64_t>(std::floor(n * gap / 2.0));
  // Rounded centers can be one win closer than N g; shrink until the
  // intervals really are disjoint.
  while (epsilon > 0 &&
         !check_no_overlap(
              make_params(lambda, ell, PlanMode::kStrict, n, epsilon), table)
              .pass()) {
    --epsilon;
  }
  return epsilon;
}

ProtocolParams plan_strict(int lambda, int ell, const LevelTable& table) {
  const double gap = min_level_gap(table);
  // eps <= N g / 2 caps c at 2g/3, so no N below 4.5 lambda / g^2 can work.
  const auto start = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::floor(4.5 * lambda / (gap * gap))));
  for (std::int64_t n = start; n < start + kStrictSearchLimit; ++n) {
    const std::int64_t epsilon = strict_epsilon(lambda, ell, n, gap, table);
    if (epsilon > 0 && meets_security(epsilon, n, lambda)) {
      return make_params(lambda, ell, PlanMode::kStrict, n, epsilon);
    }
  }
  throw PlanningError("strict planning did not converge");
}

}  // namespace

LevelTable::LevelTable(const std::vector<double>& concurrences) {
  double previous = 0.0;
  int index = 1;
  for (double c : concurrences) {
    if (!(c > previous && c <= 1.0)) {
      throw DomainError(
          "level concurrences must be strictly increasing within (0, 1]");
    }
    levels_.push_back({.index = index++,
                       .concurrence = c,
                       .theta = std::asin(c) / 2.0,
                       .omega = omega_of_concurrence(c)});
    previous = c;
  }
}

const Level& LevelTable::level(int k) const {
  if (k < 1 || k > size()) throw DomainError("level index out of range");
  return levels_[k - 1];
}

LevelTable build_level_table(int ell) {
  if (ell < 1) throw DomainError("level count must be at least 1");
  std::vector<double> concurrences;
  for (int i = 1; i <= ell; ++i) {
    concurrences.push_back(static_cast<double>(i) / ell);
  }
  return LevelTable(concurrences);
}

double chernoff_exponent(double c, std::int64_t n) {
  return c * c * static_cast<double>(n) / 2.0;
}

double chernoff_tail(double c, std::int64_t n) {
  return std::exp2(-chernoff_exponent(c, n));
}

std::string_view to_string(PlanMode mode) {
  return mode == PlanMode::kPaper ? "paper" : "strict";
}

PlanMode parse_plan_mode(std::string_view text) {
  if (text == "paper") return PlanMode::kPaper;
  if (text == "strict") return PlanMode::kStrict;
  throw DomainError("unknown plan mode: " + std::string(text));
}

ProtocolParams plan_params(int lambda, int ell, PlanMode mode,
                           const LevelTable& table) {
  if (lambda < 1) throw DomainError("lambda must be at least 1");
  if (ell < 1) throw DomainError("level count must be at least 1");
  if (table.size() != ell) {
    throw DomainError("level table does not have ell levels");
  }
  if (mode == PlanMode::kStrict) return plan_strict(lambda, ell, table);

  // c = 1/(2 ell): N = 2 lambda / c^2 = 8 lambda ell^2 and
  // eps = c (3N/4) = 3N / (8 ell), both exact in integers.
  const std::int64_t n = std::int64_t{8} * lambda * ell * ell;
  ProtocolParams p = make_params(lambda, ell, mode, n, (3 * n) / (8 * ell));
  p.c = 1.0 / (2.0 * ell);
  return p;
}

AcceptanceInterval acceptance_interval(int level_k,
                                       const ProtocolParams& params,
                                       const LevelTable& table) {
  const Level& level = table.level(level_k);
  // Default rounding mode: half to even.
  const auto center = static_cast<std::int64_t>(
      std::nearbyint(static_cast<double>(params.n) * level.omega));
  return {.center = center,
          .lo = center - params.epsilon,
          .hi = center + params.epsilon};
}

bool OverlapReport::pass() const {
  return classical_excluded &&
         std::all_of(pairs.begin(), pairs.end(),
                     [](const PairCheck& p) { return p.disjoint; });
}

OverlapReport check_no_overlap(const ProtocolParams& params,
                               const LevelTable& table) {
  OverlapReport report;
  std::vector<AcceptanceInterval> intervals;
  for (int k = 1; k <= table.size(); ++k) {
    intervals.push_back(acceptance_interval(k, params, table));
  }
  for (std::size_t i = 0; i + 1 < intervals.size(); ++i) {
    const std::int64_t margin = intervals[i + 1].lo - intervals[i].hi - 1;
    report.pairs.push_back({.lower_level = static_cast<int>(i + 1),
                            .upper_level = static_cast<int>(i + 2),
                            .disjoint = margin >= 0,
                            .margin = margin});
  }

  const double classical = kClassicalWinRate * static_cast<double>(params.n);
  double nearest = std::numeric_limits<double>::infinity();
  for (const AcceptanceInterval& iv : intervals) {
    const double lo = static_cast<double>(iv.lo);
    const double hi = static_cast<double>(iv.hi);
    double distance;
    if (classical < lo) {
      distance = lo - classical;
    } else if (classical > hi) {
      distance = classical - hi;
    } else {
      distance = -std::min(classical - lo, hi - classical);
    }
    nearest = std::min(nearest, distance);
  }
  report.classical_margin = nearest;
  report.classical_excluded = nearest > 0.0;
  return report;
}

nlohmann::json to_json(const ProtocolParams& params) {
  return {{"lambda", params.lambda}, {"ell", params.ell},
          {"c", params.c},           {"n", params.n},
          {"mu", params.mu},         {"epsilon", params.epsilon},
          {"mode", to_string(params.mode)}};
}

ProtocolParams params_from_json(const nlohmann::json& j) {
  ProtocolParams p;
  p.lambda = j.at("lambda").get<int>();
  p.ell = j.at("ell").get<int>();
  p.c = j.at("c").get<double>();
  p.n = j.at("n").get<std::int64_t>();
  p.mu = j.at("mu").get<double>();
  p.epsilon = j.at("epsilon").get<std::int64_t>();
  p.mode = parse_plan_mode(j.at("mode").get<std::string>());
  return p;
}

nlohmann::json to_json(const LevelTable& table) {
  nlohmann::json levels = nlohmann::json::array();
  for (const Level& l : table.levels()) {
    levels.push_back({{"level", l.index},
                      {"concurrence", l.concurrence},
                      {"theta", l.theta},
                      {"omega", l.omega}});
  }
  return levels;
}

nlohmann::json to_json(const OverlapReport& report) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back({{"lower_level", p.lower_level},
                     {"upper_level", p.upper_level},
                     {"disjoint", p.disjoint},
                     {"margin", p.margin}});
  }
  return {{"pairs", pairs},
          {"classical_excluded", report.classical_excluded},
          {"classical_margin", report.classical_margin},
          {"pass", report.pass()}};
}

void write_table_csv(std::ostream& out, const LevelTable& table,
                     const ProtocolParams& params) {
  out << "level,C,theta,omega,lo,hi\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(12);
  for (const Level& l : table.levels()) {
    const AcceptanceInterval iv = acceptance_interval(l.index, params, table);
    out << l.index << ',' << l.concurrence << ',' << l.theta << ','
        << l.omega << ',' << iv.lo << ',' << iv.hi << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

ProtocolParams plan_with_rounds(int ell, PlanMode mode, std::int64_t n,
                                const LevelTable& table) {
  if (ell < 1 || table.size() != ell) {
    throw DomainError("level table does not match the level count");
  }
  if (n < 1) throw DomainError("round count must be at least 1");
  std::int64_t epsilon = 0;
  if (mode == PlanMode::kPaper) {
    epsilon = 3 * n / (8 * static_cast<std::int64_t>(ell));
  } else {
    epsilon = strict_epsilon(0, ell, n, min_level_gap(table), table);
  }
  if (epsilon < 1) {
    throw PlanningError("too few rounds for a nonempty acceptance interval");
  }
  ProtocolParams p = make_params(0, ell, mode, n, epsilon);
  p.lambda = static_cast<int>(std::floor(chernoff_exponent(p.c, n)));
  return p;
}

}  // namespace chshauth
