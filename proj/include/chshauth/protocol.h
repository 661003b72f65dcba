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

// User and Authorizer state machines for the N-round CHSH authorization
// session.
//
// Each round: the User samples t, measures its half, commits to (t, b); the
// Authorizer, holding that commitment, samples s, measures, commits to
// (s, a) and reveals; the User reveals once it holds the Authorizer's
// commitment. Neither side reveals before holding the peer's commitment for
// the round. After N rounds the Authorizer counts wins and grants the
// requested level iff the count falls in that level's acceptance interval.

#ifndef CHSHAUTH_PROTOCOL_H_
#define CHSHAUTH_PROTOCOL_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "chshauth/chsh.h"
#include "chshauth/commit.h"
#include "chshauth/message.h"
#include "chshauth/planner.h"
#include "chshauth/resource.h"
#include "chshauth/seeds.h"

namespace chshauth {

enum class Phase {
  kIdle,
  kRequested,
  kCommitting,  // waiting for the peer's commitment for the current round
  kRevealing,   // waiting for the peer's reveal for the current round
  kAwaitingVerdict,
  kDone,
  kAborted,
};

std::string_view to_string(Phase phase);

struct GameRecord {
  int s = 0;
  int t = 0;
  int a = 0;
  int b = 0;
  bool won = false;
  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

struct CommitRecord {
  Digest digest{};
  Salt salt{};
  friend bool operator==(const CommitRecord&, const CommitRecord&) = default;
};

struct Transcript {
  std::string session_id;
  std::string user_id;
  int requested_level = 0;
  ProtocolParams params;
  bool batched = false;
  std::vector<GameRecord> rounds;
  // One entry per round, or a single entry in batched mode.
  std::vector<CommitRecord> user_commitments;
  std::vector<CommitRecord> authorizer_commitments;

  std::int64_t wins() const;
  friend bool operator==(const Transcript&, const Transcript&) = default;
};

nlohmann::json to_json(const Transcript& transcript);
Transcript transcript_from_json(const nlohmann::json& j);

struct VerdictPolicy {
  // When the win count misses the requested level's interval but lands in
  // another level's, grant that level instead of aborting.
  bool grant_matching_level = false;
};

// Recomputes every won flag and commitment, counts wins and decides. Throws
// ValidationError for an incomplete or inconsistent transcript.
Verdict verify_transcript(const Transcript& transcript,
                          const ProtocolParams& params,
                          const LevelTable& table,
                          const VerdictPolicy& policy = {});

// SHA-256 hex of the canonical JSON of the session parameters.
std::string params_digest(const ProtocolParams& params, bool batched);

// Commitments over all N rounds in batched mode.
Digest commit_batch(Role role, std::span<const std::uint8_t> questions,
                    std::span<const std::uint8_t> answers, const Salt& salt);

struct Services {
  ResourceAccess* resource = nullptr;
  Rng* rng = nullptr;
};

struct StartEvent {};
struct TimeoutEvent {};
using Event = std::variant<StartEvent, TimeoutEvent, Message>;

// How the User plays. Everything but kHonest is an adversary.
struct UserBehavior {
  enum class Kind {
    kHonest,          // optimal settings for the requested level
    kCrossLevel,      // requests above its resource, best response for it
    kClassical,       // measures Z only and answers from a classical table
    kFabricate,       // never measures; answers are private coin flips
    kAngles,          // measures at caller-chosen angles
    kDelayedReveal,   // waits for the Authorizer's reveal, then reveals a
                      // winning answer regardless of its commitment
    kWithholdCommit,  // never commits
  };

  Kind kind = Kind::kHonest;
  std::array<int, 2> classical_table{0, 0};
  std::array<double, 2> angles{0.0, 0.0};

  // "honest", "classical", "cross-level", "fabricate", "angles:B0,B1",
  // "delayed-reveal", "withhold-commit". Throws DomainError.
  static UserBehavior Parse(std::string_view spec);
  std::string to_string() const;
};

struct UserConfig {
  std::string user_id;
  int requested_level = 1;
  // Level of the resource actually held; used by the cross-level
  // adversary's best response. 0 means the requested level.
  int true_level = 0;
  UserBehavior behavior;
};

class UserMachine {
 public:
  UserMachine(UserConfig config, LevelTable table, ProtocolParams params,
              bool batched);

  std::vector<Message> step(const Event& event, Services& services);

  Phase phase() const { return phase_; }
  bool finished() const {
    return phase_ == Phase::kDone || phase_ == Phase::kAborted;
  }
  // Granted at exactly the requested level.
  bool granted() const { return phase_ == Phase::kDone; }
  const std::optional<Verdict>& verdict() const { return verdict_; }
  const std::string& abort_reason() const { return abort_reason_; }
  const Transcript& transcript() const { return transcript_; }

 private:
  std::vector<Message> on_message(const Message& message, Services& services);
  std::vector<Message> begin_round(Services& services);
  std::vector<Message> begin_batch(Services& services);
  std::vector<Message> on_peer_reveal(const RoundReveal& reveal,
                                      Services& services);
  std::vector<Message> on_peer_batch_reveal(const BatchReveal& reveal);
  int play(std::int64_t round, int t, Services& services);
  std::vector<Message> abort(std::string reason);

  UserConfig config_;
  LevelTable table_;
  ProtocolParams params_;
  bool batched_;
  QuantumStrategy strategy_;
  Phase phase_ = Phase::kIdle;
  std::int64_t round_ = 0;
  Transcript transcript_;
  std::optional<Verdict> verdict_;
  std::string abort_reason_;

  // Current round (or batch) state.
  std::vector<std::uint8_t> questions_;
  std::vector<std::uint8_t> answers_;
  Salt salt_{};
  Digest peer_digest_{};
};

class AuthorizerMachine {
 public:
  AuthorizerMachine(std::string session_id, LevelTable table,
                    ProtocolParams params, bool batched,
                    VerdictPolicy policy = {});

  std::vector<Message> step(const Event& event, Services& services);

  Phase phase() const { return phase_; }
  bool finished() const {
    return phase_ == Phase::kDone || phase_ == Phase::kAborted;
  }
  // Set once the session ends, whether by verdict or abort.
  const std::optional<Verdict>& verdict() const { return verdict_; }
  const std::string& abort_reason() const { return abort_reason_; }
  const Transcript& transcript() const { return transcript_; }
  const std::string& session_id() const { return transcript_.session_id; }
  const std::string& user_id() const { return transcript_.user_id; }

 private:
  std::vector<Message> on_message(const Message& message, Services& services);
  std::vector<Message> abort(std::string reason);
  std::vector<Message> finish();

  LevelTable table_;
  ProtocolParams params_;
  bool batched_;
  VerdictPolicy policy_;
  QuantumStrategy strategy_;
  Phase phase_ = Phase::kIdle;
  std::int64_t round_ = 0;
  Transcript transcript_;
  std::optional<Verdict> verdict_;
  std::string abort_reason_;

  Digest peer_digest_{};
  std::vector<std::uint8_t> questions_;
  std::vector<std::uint8_t> answers_;
};

}  // namespace chshauth

#endif  // CHSHAUTH_PROTOCOL_H_
