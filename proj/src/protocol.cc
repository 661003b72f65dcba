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

#include "chshauth/protocol.h"

#include <algorithm>
#include <numbers>
#include <utility>

#include "chshauth/codec.h"
#include "chshauth/errors.h"

namespace chshauth {

namespace {

// Round field of a batched commitment; never a valid per-round index.
constexpr std::int64_t kBatchRound = -1;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Salt fresh_salt(Rng& rng) {
  Salt salt;
  rng.fill(salt);
  return salt;
}

double theta_for_level(const LevelTable& table, int level) {
  if (level < 1 || level > table.size()) return std::numbers::pi / 4;
  return table.level(level).theta;
}

nlohmann::json commitments_to_json(const std::vector<CommitRecord>& records) {
  nlohmann::json out = nlohmann::json::array();
  for (const CommitRecord& r : records) {
    out.push_back({{"digest", to_hex(r.digest)}, {"salt", to_hex(r.salt)}});
  }
  return out;
}

std::vector<CommitRecord> commitments_from_json(const nlohmann::json& j) {
  std::vector<CommitRecord> out;
  for (const auto& r : j) {
    out.push_back({from_hex_array<32>(r.at("digest").get<std::string>()),
                   from_hex_array<16>(r.at("salt").get<std::string>())});
  }
  return out;
}

void check_commitments(const Transcript& t, Role role,
                       const std::vector<CommitRecord>& records) {
  const bool user = role == Role::kUser;
  if (t.batched) {
    if (records.size() != 1) {
      throw ValidationError("batched transcript needs one commitment per party");
    }
    std::vector<std::uint8_t> questions;
    std::vector<std::uint8_t> answers;
    for (const GameRecord& g : t.rounds) {
      questions.push_back(static_cast<std::uint8_t>(user ? g.t : g.s));
      answers.push_back(static_cast<std::uint8_t>(user ? g.b : g.a));
    }
    if (commit_batch(role, questions, answers, records[0].salt) !=
        records[0].digest) {
      throw ValidationError("batched commitment does not match the reveal");
    }
    return;
  }
  if (records.size() != t.rounds.size()) {
    throw ValidationError("transcript needs one commitment per round");
  }
  for (std::size_t r = 0; r < records.size(); ++r) {
    const GameRecord& g = t.rounds[r];
    if (!verify_reveal(records[r].digest, static_cast<std::int64_t>(r), role,
                       user ? g.t : g.s, user ? g.b : g.a, records[r].salt)) {
      throw ValidationError("commitment mismatch in round " +
                            std::to_string(r));
    }
  }
}

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kIdle: return "idle";
    case Phase::kRequested: return "requested";
    case Phase::kCommitting: return "committing";
    case Phase::kRevealing: return "revealing";
    case Phase::kAwaitingVerdict: return "awaiting_verdict";
    case Phase::kDone: return "done";
    case Phase::kAborted: return "aborted";
  }
  return "unknown";
}

std::int64_t Transcript::wins() const {
  return std::count_if(rounds.begin(), rounds.end(),
                       [](const GameRecord& g) { return g.won; });
}

nlohmann::json to_json(const Transcript& t) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const GameRecord& g : t.rounds) {
    rounds.push_back(
        {{"s", g.s}, {"t", g.t}, {"a", g.a}, {"b", g.b}, {"won", g.won}});
  }
  return {{"session_id", t.session_id},
          {"user_id", t.user_id},
          {"requested_level", t.requested_level},
          {"params", to_json(t.params)},
          {"batched", t.batched},
          {"rounds", rounds},
          {"user_commitments", commitments_to_json(t.user_commitments)},
          {"authorizer_commitments",
           commitments_to_json(t.authorizer_commitments)}};
}

Transcript transcript_from_json(const nlohmann::json& j) {
  try {
    Transcript t;
    t.session_id = j.at("session_id").get<std::string>();
    t.user_id = j.at("user_id").get<std::string>();
    t.requested_level = j.at("requested_level").get<int>();
    t.params = params_from_json(j.at("params"));
    t.batched = j.at("batched").get<bool>();
    for (const auto& g : j.at("rounds")) {
      t.rounds.push_back({g.at("s").get<int>(), g.at("t").get<int>(),
                          g.at("a").get<int>(), g.at("b").get<int>(),
                          g.at("won").get<bool>()});
    }
    t.user_commitments = commitments_from_json(j.at("user_commitments"));
    t.authorizer_commitments =
        commitments_from_json(j.at("authorizer_commitments"));
    return t;
  } catch (const std::exception& e) {
    throw ValidationError(std::string("malformed transcript: ") + e.what());
  }
}

Verdict verify_transcript(const Transcript& transcript,
                          const ProtocolParams& params,
                          const LevelTable& table,
                          const VerdictPolicy& policy) {
  if (!(transcript.params == params)) {
    throw ValidationError("transcript was recorded under different parameters");
  }
  if (static_cast<std::int64_t>(transcript.rounds.size()) != params.n) {
    throw ValidationError("transcript has " +
                          std::to_string(transcript.rounds.size()) +
                          " rounds, expected " + std::to_string(params.n));
  }
  for (std::size_t r = 0; r < transcript.rounds.size(); ++r) {
    const GameRecord& g = transcript.rounds[r];
    for (int bit : {g.s, g.t, g.a, g.b}) {
      if (bit != 0 && bit != 1) {
        throw ValidationError("non-binary value in round " + std::to_string(r));
      }
    }
    if (g.won != is_win({g.s, g.t}, g.a, g.b)) {
      throw ValidationError("won flag inconsistent in round " +
                            std::to_string(r));
    }
  }
  check_commitments(transcript, Role::kUser, transcript.user_commitments);
  check_commitments(transcript, Role::kAuthorizer,
                    transcript.authorizer_commitments);

  if (transcript.requested_level < 1 ||
      transcript.requested_level > table.size()) {
    throw ValidationError("requested level outside the level table");
  }
  const std::int64_t wins = transcript.wins();
  if (acceptance_interval(transcript.requested_level, params, table)
          .contains(wins)) {
    return Verdict::Granted(transcript.requested_level);
  }
  if (policy.grant_matching_level) {
    for (int k = table.size(); k >= 1; --k) {
      if (acceptance_interval(k, params, table).contains(wins)) {
        return Verdict::Granted(k);
      }
    }
  }
  return Verdict::Aborted("level-mismatch");
}

std::string params_digest(const ProtocolParams& params, bool batched) {
  const std::string canonical =
      nlohmann::json{{"batched", batched}, {"params", to_json(params)}}.dump();
  return to_hex(sha256(std::span(
      reinterpret_cast<const std::uint8_t*>(canonical.data()),
      canonical.size())));
}

Digest commit_batch(Role role, std::span<const std::uint8_t> questions,
                    std::span<const std::uint8_t> answers, const Salt& salt) {
  std::vector<std::uint8_t> value(questions.begin(), questions.end());
  value.insert(value.end(), answers.begin(), answers.end());
  return commit(kBatchRound, role, value, salt);
}

UserBehavior UserBehavior::Parse(std::string_view spec) {
  UserBehavior b;
  if (spec == "honest" || spec == "none") return b;
  if (spec == "classical") {
    b.kind = Kind::kClassical;
  } else if (spec == "cross-level" || spec.starts_with("cross-level:")) {
    b.kind = Kind::kCrossLevel;
  } else if (spec == "fabricate") {
    b.kind = Kind::kFabricate;
  } else if (spec == "delayed-reveal") {
    b.kind = Kind::kDelayedReveal;
  } else if (spec == "withhold-commit") {
    b.kind = Kind::kWithholdCommit;
  } else if (spec.starts_with("angles:")) {
    b.kind = Kind::kAngles;
    const std::string rest(spec.substr(7));
    const auto comma = rest.find(',');
    if (comma == std::string::npos) {
      throw DomainError("angles adversary needs two comma-separated angles");
    }
    try {
      b.angles = {std::stod(rest.substr(0, comma)),
                  std::stod(rest.substr(comma + 1))};
    } catch (const std::exception&) {
      throw DomainError("bad angle in adversary spec: " + std::string(spec));
    }
  } else {
    throw DomainError("unknown user behavior: " + std::string(spec));
  }
  return b;
}

std::string UserBehavior::to_string() const {
  switch (kind) {
    case Kind::kHonest: return "honest";
    case Kind::kCrossLevel: return "cross-level";
    case Kind::kClassical: return "classical";
    case Kind::kFabricate: return "fabricate";
    case Kind::kAngles:
      return "angles:" + std::to_string(angles[0]) + "," +
             std::to_string(angles[1]);
    case Kind::kDelayedReveal: return "delayed-reveal";
    case Kind::kWithholdCommit: return "withhold-commit";
  }
  return "honest";
}

// ---------------------------------------------------------------------------
// User

UserMachine::UserMachine(UserConfig config, LevelTable table,
                         ProtocolParams params, bool batched)
    : config_(std::move(config)),
      table_(std::move(table)),
      params_(params),
      batched_(batched) {
  const int strategy_level =
      config_.behavior.kind == UserBehavior::Kind::kCrossLevel &&
              config_.true_level > 0
          ? config_.true_level
          : config_.requested_level;
  strategy_ = optimal_strategy(theta_for_level(table_, strategy_level));
  if (config_.behavior.kind == UserBehavior::Kind::kAngles) {
    strategy_.bob = {MeasurementSetting(config_.behavior.angles[0]),
                     MeasurementSetting(config_.behavior.angles[1])};
  }
  transcript_.user_id = config_.user_id;
  transcript_.requested_level = config_.requested_level;
  transcript_.params = params_;
  transcript_.batched = batched_;
}

std::vector<Message> UserMachine::abort(std::string reason) {
  phase_ = Phase::kAborted;
  abort_reason_ = reason;
  return {Abort{std::move(reason)}};
}

int UserMachine::play(std::int64_t round, int t, Services& services) {
  using Kind = UserBehavior::Kind;
  switch (config_.behavior.kind) {
    case Kind::kFabricate:
      return services.rng->bit();
    case Kind::kClassical: {
      const int shared = services.resource->measure(
          transcript_.session_id, round, Party::kB, MeasurementSetting(0.0));
      return shared ^ config_.behavior.classical_table[t];
    }
    default:
      return services.resource->measure(transcript_.session_id, round,
                                        Party::kB, strategy_.bob[t]);
  }
}

std::vector<Message> UserMachine::begin_round(Services& services) {
  phase_ = Phase::kCommitting;
  if (config_.behavior.kind == UserBehavior::Kind::kWithholdCommit) return {};
  const int t = services.rng->bit();
  const int b = play(round_, t, services);
  salt_ = fresh_salt(*services.rng);
  questions_.assign(1, static_cast<std::uint8_t>(t));
  answers_.assign(1, static_cast<std::uint8_t>(b));
  const Digest digest = commit(round_, Role::kUser, t, b, salt_);
  return {RoundCommit{round_, digest}};
}

std::vector<Message> UserMachine::begin_batch(Services& services) {
  phase_ = Phase::kCommitting;
  if (config_.behavior.kind == UserBehavior::Kind::kWithholdCommit) return {};
  questions_.resize(static_cast<std::size_t>(params_.n));
  answers_.resize(static_cast<std::size_t>(params_.n));
  for (std::int64_t r = 0; r < params_.n; ++r) {
    const int t = services.rng->bit();
    questions_[r] = static_cast<std::uint8_t>(t);
    answers_[r] = static_cast<std::uint8_t>(play(r, t, services));
  }
  salt_ = fresh_salt(*services.rng);
  return {BatchCommit{commit_batch(Role::kUser, questions_, answers_, salt_)}};
}

std::vector<Message> UserMachine::on_peer_reveal(const RoundReveal& reveal,
                                                 Services& services) {
  if (!verify_reveal(peer_digest_, round_, Role::kAuthorizer, reveal.question,
                     reveal.answer, reveal.salt)) {
    return abort("commitment-mismatch");
  }
  std::vector<Message> out;
  const int t = questions_[0];
  int b = answers_[0];
  if (config_.behavior.kind == UserBehavior::Kind::kDelayedReveal) {
    b = reveal.answer ^ (reveal.question & t);
    out.push_back(RoundReveal{round_, t, b, salt_});
  }
  transcript_.rounds.push_back({reveal.question, t, reveal.answer, b,
                                is_win({reveal.question, t}, reveal.answer, b)});
  transcript_.user_commitments.push_back(
      {commit(round_, Role::kUser, t, answers_[0], salt_), salt_});
  transcript_.authorizer_commitments.push_back({peer_digest_, reveal.salt});

  if (++round_ < params_.n) {
    std::vector<Message> next = begin_round(services);
    out.insert(out.end(), next.begin(), next.end());
  } else {
    phase_ = Phase::kAwaitingVerdict;
  }
  return out;
}

std::vector<Message> UserMachine::on_peer_batch_reveal(
    const BatchReveal& reveal) {
  const auto n = static_cast<std::size_t>(params_.n);
  if (reveal.questions.size() != n || reveal.answers.size() != n) {
    return abort("malformed-reveal");
  }
  if (commit_batch(Role::kAuthorizer, reveal.questions, reveal.answers,
                   reveal.salt) != peer_digest_) {
    return abort("commitment-mismatch");
  }
  std::vector<Message> out;
  std::vector<std::uint8_t> reported = answers_;
  if (config_.behavior.kind == UserBehavior::Kind::kDelayedReveal) {
    for (std::size_t r = 0; r < n; ++r) {
      reported[r] = reveal.answers[r] ^ (reveal.questions[r] & questions_[r]);
    }
    out.push_back(BatchReveal{questions_, reported, salt_});
  }
  for (std::size_t r = 0; r < n; ++r) {
    const int s = reveal.questions[r];
    const int a = reveal.answers[r];
    transcript_.rounds.push_back({s, questions_[r], a, reported[r],
                                  is_win({s, questions_[r]}, a, reported[r])});
  }
  transcript_.user_commitments.push_back(
      {commit_batch(Role::kUser, questions_, answers_, salt_), salt_});
  transcript_.authorizer_commitments.push_back({peer_digest_, reveal.salt});
  phase_ = Phase::kAwaitingVerdict;
  return out;
}

std::vector<Message> UserMachine::on_message(const Message& message,
                                             Services& services) {
  const bool delayed =
      config_.behavior.kind == UserBehavior::Kind::kDelayedReveal;
  return std::visit(
      Overloaded{
          [&](const SessionAccept& m) -> std::vector<Message> {
            if (phase_ != Phase::kRequested) return abort("out-of-phase");
            if (m.params_digest != params_digest(params_, batched_)) {
              return abort("params-mismatch");
            }
            transcript_.session_id = m.session_id;
            round_ = 0;
            return batched_ ? begin_batch(services) : begin_round(services);
          },
          [&](const RoundCommit& m) -> std::vector<Message> {
            if (batched_ || phase_ != Phase::kCommitting || m.round != round_ ||
                questions_.empty()) {
              return abort("out-of-phase");
            }
            peer_digest_ = m.digest;
            phase_ = Phase::kRevealing;
            if (delayed) return {};
            return {RoundReveal{round_, questions_[0], answers_[0], salt_}};
          },
          [&](const RoundReveal& m) -> std::vector<Message> {
            if (batched_ || phase_ != Phase::kRevealing || m.round != round_) {
              return abort("out-of-phase");
            }
            return on_peer_reveal(m, services);
          },
          [&](const BatchCommit& m) -> std::vector<Message> {
            if (!batched_ || phase_ != Phase::kCommitting || questions_.empty()) {
              return abort("out-of-phase");
            }
            peer_digest_ = m.digest;
            phase_ = Phase::kRevealing;
            if (delayed) return {};
            return {BatchReveal{questions_, answers_, salt_}};
          },
          [&](const BatchReveal& m) -> std::vector<Message> {
            if (!batched_ || phase_ != Phase::kRevealing) {
              return abort("out-of-phase");
            }
            return on_peer_batch_reveal(m);
          },
          [&](const Verdict& m) -> std::vector<Message> {
            verdict_ = m;
            if (!m.granted()) {
              phase_ = Phase::kAborted;
              abort_reason_ = m.abort_reason;
              return {};
            }
            if (phase_ != Phase::kAwaitingVerdict) return abort("out-of-phase");
            // The User knows its own level; any other grant means the
            // Authorizer misbehaved.
            if (*m.granted_level != config_.requested_level) {
              return abort("verdict-mismatch");
            }
            phase_ = Phase::kDone;
            return {};
          },
          [&](const Abort& m) -> std::vector<Message> {
            phase_ = Phase::kAborted;
            abort_reason_ = m.reason;
            return {};
          },
          [&](const auto&) -> std::vector<Message> {
            return abort("out-of-phase");
          },
      },
      message);
}

std::vector<Message> UserMachine::step(const Event& event, Services& services) {
  if (finished()) return {};
  try {
    return std::visit(
        Overloaded{
            [&](const StartEvent&) -> std::vector<Message> {
              if (phase_ != Phase::kIdle) return abort("out-of-phase");
              phase_ = Phase::kRequested;
              return {AuthRequest{config_.user_id, config_.requested_level}};
            },
            [&](const TimeoutEvent&) -> std::vector<Message> {
              return abort("timeout");
            },
            [&](const Message& m) { return on_message(m, services); },
        },
        event);
  } catch (const ResourceError& e) {
    return abort(std::string("resource-failure: ") + e.what());
  } catch (const TransportError& e) {
    return abort(std::string("resource-failure: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Authorizer

AuthorizerMachine::AuthorizerMachine(std::string session_id, LevelTable table,
                                     ProtocolParams params, bool batched,
                                     VerdictPolicy policy)
    : table_(std::move(table)),
      params_(params),
      batched_(batched),
      policy_(policy),
      strategy_(optimal_strategy(std::numbers::pi / 4)) {
  transcript_.session_id = std::move(session_id);
  transcript_.params = params_;
  transcript_.batched = batched_;
}

std::vector<Message> AuthorizerMachine::abort(std::string reason) {
  phase_ = Phase::kAborted;
  abort_reason_ = reason;
  verdict_ = Verdict::Aborted(reason);
  return {Abort{std::move(reason)}};
}

std::vector<Message> AuthorizerMachine::finish() {
  verdict_ = verify_transcript(transcript_, params_, table_, policy_);
  if (verdict_->granted()) {
    phase_ = Phase::kDone;
  } else {
    phase_ = Phase::kAborted;
    abort_reason_ = verdict_->abort_reason;
  }
  return {*verdict_};
}

std::vector<Message> AuthorizerMachine::on_message(const Message& message,
                                                   Services& services) {
  return std::visit(
      Overloaded{
          [&](const AuthRequest& m) -> std::vector<Message> {
            if (phase_ != Phase::kIdle) return abort("out-of-phase");
            transcript_.user_id = m.user_id;
            transcript_.requested_level = m.requested_level;
            if (m.requested_level < 1 || m.requested_level > table_.size()) {
              return abort("invalid-level");
            }
            // Alice's optimal settings are Z and X at every level.
            strategy_ =
                optimal_strategy(table_.level(m.requested_level).theta);
            services.resource->provision(transcript_.session_id, m.user_id,
                                         params_.n);
            phase_ = Phase::kCommitting;
            round_ = 0;
            return {SessionAccept{transcript_.session_id,
                                  params_digest(params_, batched_)}};
          },
          [&](const RoundCommit& m) -> std::vector<Message> {
            if (batched_ || phase_ != Phase::kCommitting || m.round != round_) {
              return abort("out-of-phase");
            }
            peer_digest_ = m.digest;
            const int s = services.rng->bit();
            const int a = services.resource->measure(
                transcript_.session_id, round_, Party::kA, strategy_.alice[s]);
            const Salt salt = fresh_salt(*services.rng);
            const Digest digest = commit(round_, Role::kAuthorizer, s, a, salt);
            questions_.assign(1, static_cast<std::uint8_t>(s));
            answers_.assign(1, static_cast<std::uint8_t>(a));
            transcript_.authorizer_commitments.push_back({digest, salt});
            phase_ = Phase::kRevealing;
            return {RoundCommit{round_, digest},
                    RoundReveal{round_, s, a, salt}};
          },
          [&](const RoundReveal& m) -> std::vector<Message> {
            if (batched_ || phase_ != Phase::kRevealing || m.round != round_) {
              return abort("out-of-phase");
            }
            if (!verify_reveal(peer_digest_, round_, Role::kUser, m.question,
                               m.answer, m.salt)) {
              return abort("commitment-mismatch");
            }
            const int s = questions_[0];
            const int a = answers_[0];
            transcript_.rounds.push_back(
                {s, m.question, a, m.answer,
                 is_win({s, m.question}, a, m.answer)});
            transcript_.user_commitments.push_back({peer_digest_, m.salt});
            if (++round_ < params_.n) {
              phase_ = Phase::kCommitting;
              return {};
            }
            return finish();
          },
          [&](const BatchCommit& m) -> std::vector<Message> {
            if (!batched_ || phase_ != Phase::kCommitting) {
              return abort("out-of-phase");
            }
            peer_digest_ = m.digest;
            const auto n = static_cast<std::size_t>(params_.n);
            questions_.resize(n);
            answers_.resize(n);
            for (std::size_t r = 0; r < n; ++r) {
              const int s = services.rng->bit();
              questions_[r] = static_cast<std::uint8_t>(s);
              answers_[r] = static_cast<std::uint8_t>(services.resource->measure(
                  transcript_.session_id, static_cast<std::int64_t>(r),
                  Party::kA, strategy_.alice[s]));
            }
            const Salt salt = fresh_salt(*services.rng);
            const Digest digest =
                commit_batch(Role::kAuthorizer, questions_, answers_, salt);
            transcript_.authorizer_commitments.push_back({digest, salt});
            phase_ = Phase::kRevealing;
            return {BatchCommit{digest}, BatchReveal{questions_, answers_, salt}};
          },
          [&](const BatchReveal& m) -> std::vector<Message> {
            if (!batched_ || phase_ != Phase::kRevealing) {
              return abort("out-of-phase");
            }
            const auto n = static_cast<std::size_t>(params_.n);
            if (m.questions.size() != n || m.answers.size() != n) {
              return abort("malformed-reveal");
            }
            if (commit_batch(Role::kUser, m.questions, m.answers, m.salt) !=
                peer_digest_) {
              return abort("commitment-mismatch");
            }
            for (std::size_t r = 0; r < n; ++r) {
              const int s = questions_[r];
              const int a = answers_[r];
              const int t = m.questions[r];
              const int b = m.answers[r];
              transcript_.rounds.push_back({s, t, a, b, is_win({s, t}, a, b)});
            }
            transcript_.user_commitments.push_back({peer_digest_, m.salt});
            return finish();
          },
          [&](const Abort& m) -> std::vector<Message> {
            phase_ = Phase::kAborted;
            abort_reason_ = m.reason;
            verdict_ = Verdict::Aborted("user-abort: " + m.reason);
            return {};
          },
          [&](const auto&) -> std::vector<Message> {
            return abort("out-of-phase");
          },
      },
      message);
}

std::vector<Message> AuthorizerMachine::step(const Event& event,
                                             Services& services) {
  if (finished()) return {};
  try {
    return std::visit(
        Overloaded{
            [&](const StartEvent&) -> std::vector<Message> { return {}; },
            [&](const TimeoutEvent&) -> std::vector<Message> {
              return abort("timeout");
            },
            [&](const Message& m) { return on_message(m, services); },
        },
        event);
  } catch (const ResourceError& e) {
    return abort(std::string("resource-failure: ") + e.what());
  } catch (const TransportError& e) {
    return abort(std::string("resource-failure: ") + e.what());
  }
}

}  // namespace chshauth
