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

#ifndef CHSHAUTH_SIMULATE_H_
#define CHSHAUTH_SIMULATE_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chshauth/planner.h"
#include "chshauth/protocol.h"

namespace chshauth {

struct SimulationConfig {
  ProtocolParams params;
  int true_level = 1;
  int requested_level = 1;
  UserBehavior behavior;
  std::int64_t runs = 1;
  std::uint64_t seed = 0;
  bool batched = false;
  VerdictPolicy policy;
  int jobs = 1;
};

// Throws DomainError when the configuration is inconsistent with the level
// table (bad levels, cross-level without a higher request, no runs).
void validate(const SimulationConfig& config, const LevelTable& table);

struct RunRow {
  std::int64_t run = 0;
  int true_level = 0;
  int requested_level = 0;
  std::int64_t wins = 0;
  // "granted:<k>" or "abort:<reason>".
  std::string verdict;
  friend bool operator==(const RunRow&, const RunRow&) = default;
};

// Run r uses seed derive_seed(config.seed, kRun, r); rows are returned in run
// order regardless of `jobs`.
std::vector<RunRow> simulate(const SimulationConfig& config,
                             const LevelTable& table);

struct SimulationSummary {
  std::int64_t runs = 0;
  std::int64_t accepted = 0;
  double acceptance_fraction = 0.0;
  double mean_wins = 0.0;
  double std_wins = 0.0;  // sample standard deviation
};

// A run counts as accepted when it was granted at the requested level.
SimulationSummary summarize(const std::vector<RunRow>& rows);
nlohmann::json to_json(const SimulationSummary& summary);

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& rows);
// Throws ValidationError on a wrong header or malformed row.
std::vector<RunRow> read_runs_csv(std::istream& in);

}  // namespace chshauth

#endif  // CHSHAUTH_SIMULATE_H_
