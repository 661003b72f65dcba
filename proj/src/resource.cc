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

#include "chshauth/resource.h"

#include <utility>

#include "chshauth/errors.h"
#include "chshauth/seeds.h"

namespace chshauth {

PairBatch::PairBatch(std::string session_id, int level, double theta,
                     std::int64_t count, std::uint64_t seed)
    : session_id_(std::move(session_id)),
      level_(level),
      theta_(theta),
      state_(make_partially_entangled(theta)),
      seed_(seed),
      pairs_(static_cast<std::size_t>(count)) {}

PairBatch::PairState& PairBatch::at(std::int64_t pair) {
  if (pair < 0 || pair >= count()) {
    throw ResourceError("unknown pair " + std::to_string(pair) +
                        " in session " + session_id_);
  }
  return pairs_[static_cast<std::size_t>(pair)];
}

PairStatus PairBatch::status(std::int64_t pair) const {
  return const_cast<PairBatch*>(this)->at(pair).status;
}

int PairBatch::measure_half(std::int64_t pair, Party party,
                            const MeasurementSetting& setting, double u) {
  PairState& p = at(pair);
  switch (p.status) {
    case PairStatus::kConsumed:
      throw ResourceError("pair " + std::to_string(pair) + " already consumed");
    case PairStatus::kHalfMeasured: {
      if (p.first_party == party) {
        throw ResourceError("half of pair " + std::to_string(pair) +
                            " already measured");
      }
      const bool a_first = p.first_party == Party::kA;
      const int outcome = conditional_outcome(
          state_, a_first ? p.first_setting : setting,
          a_first ? setting : p.first_setting, p.first_party, p.first_outcome,
          u);
      p.status = PairStatus::kConsumed;
      return outcome;
    }
    case PairStatus::kFresh:
      break;
  }
  const int outcome = marginal_outcome(state_, party, setting, u);
  p.status = PairStatus::kHalfMeasured;
  p.first_party = party;
  p.first_outcome = outcome;
  p.first_setting = setting;
  return outcome;
}

int PairBatch::measure_half(std::int64_t pair, Party party,
                            const MeasurementSetting& setting) {
  const std::uint64_t draw =
      2 * static_cast<std::uint64_t>(pair) +
      (status(pair) == PairStatus::kFresh ? 0 : 1);
  const double u = to_unit_interval(splitmix64(seed_ + splitmix64(draw)));
  return measure_half(pair, party, setting, u);
}

PairBatch provision(const std::string& session_id, int level_k,
                    std::int64_t count, const LevelTable& table,
                    std::uint64_t seed) {
  if (level_k < 1 || level_k > table.size()) {
    throw ResourceError("unknown level " + std::to_string(level_k));
  }
  if (count < 1) throw ResourceError("batch must hold at least one pair");
  return PairBatch(session_id, level_k, table.level(level_k).theta, count,
                   seed);
}

int measure_half(PairBatch& batch, std::int64_t pair, Party party,
                 const MeasurementSetting& setting, double u) {
  return batch.measure_half(pair, party, setting, u);
}

BatchAudit audit_batch(const PairBatch& batch) {
  BatchAudit audit;
  for (std::int64_t i = 0; i < batch.count(); ++i) {
    switch (batch.status(i)) {
      case PairStatus::kFresh: ++audit.fresh; break;
      case PairStatus::kHalfMeasured: ++audit.half_measured; break;
      case PairStatus::kConsumed: ++audit.consumed; break;
    }
  }
  return audit;
}

Distributor::Distributor(LevelTable table, std::uint64_t master_seed)
    : table_(std::move(table)), master_seed_(master_seed) {}

void Distributor::assign(const std::string& user_id, int level) {
  if (level < 1 || level > table_.size()) {
    throw ResourceError("unknown level " + std::to_string(level));
  }
  std::lock_guard lock(mutex_);
  assignments_[user_id] = level;
}

std::optional<int> Distributor::assigned_level(
    const std::string& user_id) const {
  std::lock_guard lock(mutex_);
  auto it = assignments_.find(user_id);
  if (it == assignments_.end()) return std::nullopt;
  return it->second;
}

void Distributor::provision(const std::string& session_id,
                            const std::string& user_id, std::int64_t count) {
  const std::optional<int> level = assigned_level(user_id);
  if (!level) throw ResourceError("no level established for user " + user_id);
  const std::uint64_t seed = derive_seed(
      master_seed_, StreamDomain::kDistributor, hash_string(session_id));
  auto entry = std::unique_ptr<Entry>(
      new Entry{{}, chshauth::provision(session_id, *level, count, table_,
                                        seed)});
  std::lock_guard lock(mutex_);
  if (!batches_.emplace(session_id, std::move(entry)).second) {
    throw ResourceError("session " + session_id + " already provisioned");
  }
}

Distributor::Entry& Distributor::entry(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = batches_.find(session_id);
  if (it == batches_.end()) {
    throw ResourceError("unknown session " + session_id);
  }
  return *it->second;
}

int Distributor::measure(const std::string& session_id, std::int64_t pair,
                         Party party, const MeasurementSetting& setting) {
  Entry& e = entry(session_id);
  std::lock_guard lock(e.mutex);
  return e.batch.measure_half(pair, party, setting);
}

BatchAudit Distributor::audit(const std::string& session_id) const {
  Entry& e = entry(session_id);
  std::lock_guard lock(e.mutex);
  return audit_batch(e.batch);
}

void Distributor::release(const std::string& session_id) {
  std::lock_guard lock(mutex_);
  batches_.erase(session_id);
}

}  // namespace chshauth
