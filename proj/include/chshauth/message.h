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

// Protocol, resource and database messages and their JSON form.
//
// Every message serializes to one JSON object with a "type" tag and
// snake_case fields; digests and salts are lowercase hex.

#ifndef CHSHAUTH_MESSAGE_H_
#define CHSHAUTH_MESSAGE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "chshauth/commit.h"
#include "chshauth/qsim.h"

namespace chshauth {

struct AuthRequest {
  std::string user_id;
  int requested_level = 0;
  friend bool operator==(const AuthRequest&, const AuthRequest&) = default;
};

struct SessionAccept {
  std::string session_id;
  std::string params_digest;
  friend bool operator==(const SessionAccept&, const SessionAccept&) = default;
};

struct RoundCommit {
  std::int64_t round = 0;
  Digest digest{};
  friend bool operator==(const RoundCommit&, const RoundCommit&) = default;
};

struct RoundReveal {
  std::int64_t round = 0;
  int question = 0;
  int answer = 0;
  Salt salt{};
  friend bool operator==(const RoundReveal&, const RoundReveal&) = default;
};

// Batched mode: one commitment over all N questions and answers.
struct BatchCommit {
  Digest digest{};
  friend bool operator==(const BatchCommit&, const BatchCommit&) = default;
};

struct BatchReveal {
  std::vector<std::uint8_t> questions;
  std::vector<std::uint8_t> answers;
  Salt salt{};
  friend bool operator==(const BatchReveal&, const BatchReveal&) = default;
};

struct Verdict {
  std::optional<int> granted_level;
  std::string abort_reason;

  static Verdict Granted(int level) { return {level, {}}; }
  static Verdict Aborted(std::string reason) {
    return {std::nullopt, std::move(reason)};
  }
  bool granted() const { return granted_level.has_value(); }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct Abort {
  std::string reason;
  friend bool operator==(const Abort&, const Abort&) = default;
};

struct ProvisionRequest {
  std::string session_id;
  std::string user_id;
  std::int64_t count = 0;
  friend bool operator==(const ProvisionRequest&,
                         const ProvisionRequest&) = default;
};

struct ProvisionReply {
  std::string session_id;
  std::int64_t count = 0;
  friend bool operator==(const ProvisionReply&,
                         const ProvisionReply&) = default;
};

struct MeasureRequest {
  std::string session_id;
  std::int64_t pair_index = 0;
  Party party = Party::kA;
  MeasurementSetting setting;
  friend bool operator==(const MeasureRequest&,
                         const MeasureRequest&) = default;
};

struct MeasureReply {
  int outcome = 0;
  friend bool operator==(const MeasureReply&, const MeasureReply&) = default;
};

struct QueryRequest {
  std::string session_id;
  std::string record_id;
  friend bool operator==(const QueryRequest&, const QueryRequest&) = default;
};

// status is "ok", "denied" or "not_found"; data is base64 and empty unless ok.
struct QueryReply {
  std::string record_id;
  std::string status;
  std::string data;
  friend bool operator==(const QueryReply&, const QueryReply&) = default;
};

using Message =
    std::variant<AuthRequest, SessionAccept, RoundCommit, RoundReveal,
                 BatchCommit, BatchReveal, Verdict, Abort, ProvisionRequest,
                 ProvisionReply, MeasureRequest, MeasureReply, QueryRequest,
                 QueryReply>;

std::string_view message_type(const Message& message);

nlohmann::json to_json(const Message& message);
// Throws DecodeError for unknown tags, missing fields or invalid values.
Message message_from_json(const nlohmann::json& j);

std::string encode_message(const Message& message);
Message decode_message(std::string_view text);

}  // namespace chshauth

#endif  // CHSHAUTH_MESSAGE_H_
