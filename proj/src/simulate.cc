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

#include "chshauth/simulate.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "chshauth/errors.h"
#include "chshauth/seeds.h"
#include "chshauth/session.h"

namespace chshauth {

namespace {

constexpr const char* kCsvHeader = "run,true_level,requested_level,wins,verdict";

RunRow run_one(const SimulationConfig& config, const LevelTable& table,
               std::int64_t run) {
  const SessionSpec spec{"user", config.true_level, config.requested_level,
                         config.behavior};
  SessionOptions options;
  options.batched = config.batched;
  options.policy = config.policy;
  const SessionResult result = run_session(
      config.params, table, spec,
      derive_seed(config.seed, StreamDomain::kRun,
                  static_cast<std::uint64_t>(run)),
      options);
  RunRow row{run, config.true_level, config.requested_level,
             result.transcript.wins(), ""};
  row.verdict = result.verdict.granted()
                    ? "granted:" + std::to_string(*result.verdict.granted_level)
                    : "abort:" + result.verdict.abort_reason;
  std::replace(row.verdict.begin(), row.verdict.end(), ',', ';');
  return row;
}

}  // namespace

void validate(const SimulationConfig& config, const LevelTable& table) {
  const int ell = table.size();
  if (config.true_level < 1 || config.true_level > ell) {
    throw DomainError("true level must be in 1.." + std::to_string(ell));
  }
  if (config.requested_level < 1 || config.requested_level > ell) {
    throw DomainError("requested level must be in 1.." + std::to_string(ell));
  }
  if (config.behavior.kind == UserBehavior::Kind::kCrossLevel &&
      config.requested_level <= config.true_level) {
    throw DomainError("cross-level adversary must request above its level");
  }
  if (config.runs < 1) throw DomainError("need at least one run");
  if (config.jobs < 1) throw DomainError("need at least one job");
  if (config.params.ell != ell) {
    throw DomainError("parameters were planned for a different level count");
  }
}

std::vector<RunRow> simulate(const SimulationConfig& config,
                             const LevelTable& table) {
  validate(config, table);
  std::vector<RunRow> rows(static_cast<std::size_t>(config.runs));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t r = next++; r < config.runs; r = next++) {
      rows[static_cast<std::size_t>(r)] = run_one(config, table, r);
    }
  };
  const int jobs = static_cast<int>(
      std::min<std::int64_t>(config.jobs, config.runs));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  return rows;
}

SimulationSummary summarize(const std::vector<RunRow>& rows) {
  SimulationSummary s;
  s.runs = static_cast<std::int64_t>(rows.size());
  if (rows.empty()) return s;
  double sum = 0.0;
  for (const RunRow& row : rows) {
    sum += static_cast<double>(row.wins);
    if (row.verdict == "granted:" + std::to_string(row.requested_level)) {
      ++s.accepted;
    }
  }
  s.mean_wins = sum / static_cast<double>(s.runs);
  if (s.runs > 1) {
    double ss = 0.0;
    for (const RunRow& row : rows) {
      const double d = static_cast<double>(row.wins) - s.mean_wins;
      ss += d * d;
    }
    s.std_wins = std::sqrt(ss / static_cast<double>(s.runs - 1));
  }
  s.acceptance_fraction =
      static_cast<double>(s.accepted) / static_cast<double>(s.runs);
  return s;
}

nlohmann::json to_json(const SimulationSummary& s) {
  return {{"runs", s.runs},
          {"accepted", s.accepted},
          {"acceptance_fraction", s.acceptance_fraction},
          {"mean_wins", s.mean_wins},
          {"std_wins", s.std_wins}};
}

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& rows) {
  out << kCsvHeader << "\n";
  for (const RunRow& row : rows) {
    std::string verdict = row.verdict;
    std::replace(verdict.begin(), verdict.end(), ',', ';');
    out << row.run << "," << row.true_level << "," << row.requested_level
        << "," << row.wins << "," << verdict << "\n";
  }
}

std::vector<RunRow> read_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ValidationError("runs CSV must start with '" +
                          std::string(kCsvHeader) + "'");
  }
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 5) {
      throw ValidationError("runs CSV row needs 5 cells: " + line);
    }
    try {
      rows.push_back({std::stoll(cells[0]), std::stoi(cells[1]),
                      std::stoi(cells[2]), std::stoll(cells[3]), cells[4]});
    } catch (const std::logic_error&) {
      throw ValidationError("runs CSV row has a bad number: " + line);
    }
  }
  return rows;
}

}  // namespace chshauth
