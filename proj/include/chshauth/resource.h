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

// The Distributor's entanglement source. A classical simulation cannot hand
// out entangled halves, so both parties query the source, which samples the
// first query on a pair from that party's marginal and the second from the
// conditional given the recorded first outcome.

#ifndef CHSHAUTH_RESOURCE_H_
#define CHSHAUTH_RESOURCE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "chshauth/planner.h"
#include "chshauth/qsim.h"

namespace chshauth {

enum class PairStatus : std::uint8_t { kFresh, kHalfMeasured, kConsumed };

struct BatchAudit {
  std::int64_t fresh = 0;
  std::int64_t half_measured = 0;
  std::int64_t consumed = 0;

  friend bool operator==(const BatchAudit&, const BatchAudit&) = default;
};

class PairBatch {
 public:
  const std::string& session_id() const { return session_id_; }
  int level() const { return level_; }
  double theta() const { return theta_; }
  std::int64_t count() const { return static_cast<std::int64_t>(pairs_.size()); }
  const TwoQubitPureState& state() const { return state_; }
  PairStatus status(std::int64_t pair) const;

  // Measures one half of a pair with caller-supplied randomness u in [0, 1).
  // Throws ResourceError for an unknown pair or a half measured before.
  int measure_half(std::int64_t pair, Party party,
                   const MeasurementSetting& setting, double u);

  // Same, drawing u from the batch's counter-based stream: the first query
  // on pair i uses draw 2i and the second uses 2i + 1, independent of how
  // queries on different pairs interleave.
  int measure_half(std::int64_t pair, Party party,
                   const MeasurementSetting& setting);

 private:
  friend PairBatch provision(const std::string&, int, std::int64_t,
                             const LevelTable&, std::uint64_t);

  struct PairState {
    PairStatus status = PairStatus::kFresh;
    Party first_party = Party::kA;
    int first_outcome = 0;
    MeasurementSetting first_setting;
  };

  PairBatch(std::string session_id, int level, double theta,
            std::int64_t count, std::uint64_t seed);
  PairState& at(std::int64_t pair);

  std::string session_id_;
  int level_;
  double theta_;
  TwoQubitPureState state_;
  std::uint64_t seed_;
  std::vector<PairState> pairs_;
};

// `count` fresh pairs at theta_k. Throws ResourceError for an unknown level
// or count < 1.
PairBatch provision(const std::string& session_id, int level_k,
                    std::int64_t count, const LevelTable& table,
                    std::uint64_t seed);

int measure_half(PairBatch& batch, std::int64_t pair, Party party,
                 const MeasurementSetting& setting, double u);

BatchAudit audit_batch(const PairBatch& batch);

// What a protocol role needs from the entanglement source.
class ResourceAccess {
 public:
  virtual ~ResourceAccess() = default;

  // Provisions `count` pairs for `session_id` at the level established for
  // `user_id`.
  virtual void provision(const std::string& session_id,
                         const std::string& user_id, std::int64_t count) = 0;
  virtual int measure(const std::string& session_id, std::int64_t pair,
                      Party party, const MeasurementSetting& setting) = 0;
};

// In-process Distributor serving many sessions. Batches are keyed by session
// id; each batch serializes its own measurements.
class Distributor : public ResourceAccess {
 public:
  Distributor(LevelTable table, std::uint64_t master_seed);

  // Records the level established for a user during setup.
  void assign(const std::string& user_id, int level);
  std::optional<int> assigned_level(const std::string& user_id) const;

  void provision(const std::string& session_id, const std::string& user_id,
                 std::int64_t count) override;
  int measure(const std::string& session_id, std::int64_t pair, Party party,
              const MeasurementSetting& setting) override;

  BatchAudit audit(const std::string& session_id) const;
  void release(const std::string& session_id);

 private:
  struct Entry {
    std::mutex mutex;
    PairBatch batch;
  };

  Entry& entry(const std::string& session_id) const;

  LevelTable table_;
  std::uint64_t master_seed_;
  mutable std::mutex mutex_;
  std::map<std::string, int> assignments_;
  std::map<std::string, std::unique_ptr<Entry>> batches_;
};

}  // namespace chshauth

#endif  // CHSHAUTH_RESOURCE_H_
