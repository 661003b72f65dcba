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

#include "chshauth/message.h"

#include "chshauth/codec.h"
#include "chshauth/errors.h"

namespace chshauth {

namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int bit_field(const json& j, const char* key) {
  const int v = j.at(key).get<int>();
  if (v != 0 && v != 1) {
    throw DecodeError(std::string("field ") + key + " must be 0 or 1");
  }
  return v;
}

Party party_field(const json& j) {
  const std::string p = j.at("party").get<std::string>();
  if (p == "a") return Party::kA;
  if (p == "b") return Party::kB;
  throw DecodeError("party must be \"a\" or \"b\"");
}

Message parse(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "auth_request") {
    return AuthRequest{j.at("user_id").get<std::string>(),
                       j.at("requested_level").get<int>()};
  }
  if (type == "session_accept") {
    return SessionAccept{j.at("session_id").get<std::string>(),
                         j.at("params_digest").get<std::string>()};
  }
  if (type == "round_commit") {
    return RoundCommit{j.at("round").get<std::int64_t>(),
                       from_hex_array<32>(j.at("digest").get<std::string>())};
  }
  if (type == "round_reveal") {
    return RoundReveal{j.at("round").get<std::int64_t>(),
                       bit_field(j, "question"), bit_field(j, "answer"),
                       from_hex_array<16>(j.at("salt").get<std::string>())};
  }
  if (type == "batch_commit") {
    return BatchCommit{from_hex_array<32>(j.at("digest").get<std::string>())};
  }
  if (type == "batch_reveal") {
    const auto count = j.at("count").get<std::size_t>();
    return BatchReveal{
        unpack_bits_hex(j.at("questions").get<std::string>(), count),
        unpack_bits_hex(j.at("answers").get<std::string>(), count),
        from_hex_array<16>(j.at("salt").get<std::string>())};
  }
  if (type == "verdict") {
    if (j.contains("granted_level")) {
      return Verdict::Granted(j.at("granted_level").get<int>());
    }
    return Verdict::Aborted(j.at("abort_reason").get<std::string>());
  }
  if (type == "abort") return Abort{j.at("reason").get<std::string>()};
  if (type == "provision_request") {
    return ProvisionRequest{j.at("session_id").get<std::string>(),
                            j.at("user_id").get<std::string>(),
                            j.at("count").get<std::int64_t>()};
  }
  if (type == "provision_reply") {
    return ProvisionReply{j.at("session_id").get<std::string>(),
                          j.at("count").get<std::int64_t>()};
  }
  if (type == "measure_request") {
    return MeasureRequest{j.at("session_id").get<std::string>(),
                          j.at("pair_index").get<std::int64_t>(),
                          party_field(j),
                          MeasurementSetting(j.at("angle").get<double>())};
  }
  if (type == "measure_reply") return MeasureReply{bit_field(j, "outcome")};
  if (type == "query_request") {
    return QueryRequest{j.at("session_id").get<std::string>(),
                        j.at("record_id").get<std::string>()};
  }
  if (type == "query_reply") {
    return QueryReply{j.at("record_id").get<std::string>(),
                      j.at("status").get<std::string>(),
                      j.at("data").get<std::string>()};
  }
  throw DecodeError("unknown message type: " + type);
}

}  // namespace

std::string_view message_type(const Message& message) {
  static constexpr std::string_view kNames[] = {
      "auth_request",      "session_accept", "round_commit",
      "round_reveal",      "batch_commit",   "batch_reveal",
      "verdict",           "abort",          "provision_request",
      "provision_reply",   "measure_request", "measure_reply",
      "query_request",     "query_reply"};
  static_assert(std::size(kNames) == std::variant_size_v<Message>);
  return kNames[message.index()];
}

json to_json(const Message& message) {
  json j = std::visit(
      Overloaded{
          [](const AuthRequest& m) -> json {
            return {{"user_id", m.user_id},
                    {"requested_level", m.requested_level}};
          },
          [](const SessionAccept& m) -> json {
            return {{"session_id", m.session_id},
                    {"params_digest", m.params_digest}};
          },
          [](const RoundCommit& m) -> json {
            return {{"round", m.round}, {"digest", to_hex(m.digest)}};
          },
          [](const RoundReveal& m) -> json {
            return {{"round", m.round},
                    {"question", m.question},
                    {"answer", m.answer},
                    {"salt", to_hex(m.salt)}};
          },
          [](const BatchCommit& m) -> json {
            return {{"digest", to_hex(m.digest)}};
          },
          [](const BatchReveal& m) -> json {
            return {{"count", m.questions.size()},
                    {"questions", pack_bits_hex(m.questions)},
                    {"answers", pack_bits_hex(m.answers)},
                    {"salt", to_hex(m.salt)}};
          },
          [](const Verdict& m) -> json {
            if (m.granted_level) return {{"granted_level", *m.granted_level}};
            return {{"abort_reason", m.abort_reason}};
          },
          [](const Abort& m) -> json { return {{"reason", m.reason}}; },
          [](const ProvisionRequest& m) -> json {
            return {{"session_id", m.session_id},
                    {"user_id", m.user_id},
                    {"count", m.count}};
          },
          [](const ProvisionReply& m) -> json {
            return {{"session_id", m.session_id}, {"count", m.count}};
          },
          [](const MeasureRequest& m) -> json {
            return {{"session_id", m.session_id},
                    {"pair_index", m.pair_index},
                    {"party", m.party == Party::kA ? "a" : "b"},
                    {"angle", m.setting.angle()}};
          },
          [](const MeasureReply& m) -> json {
            return {{"outcome", m.outcome}};
          },
          [](const QueryRequest& m) -> json {
            return {{"session_id", m.session_id},
                    {"record_id", m.record_id}};
          },
          [](const QueryReply& m) -> json {
            return {{"record_id", m.record_id},
                    {"status", m.status},
                    {"data", m.data}};
          },
      },
      message);
  j["type"] = message_type(message);
  return j;
}

Message message_from_json(const json& j) {
  if (!j.is_object()) throw DecodeError("message is not a JSON object");
  try {
    return parse(j);
  } catch (const json::exception& e) {
    throw DecodeError(std::string("malformed message: ") + e.what());
  } catch (const DomainError& e) {
    throw DecodeError(std::string("malformed message: ") + e.what());
  }
}

std::string encode_message(const Message& message) {
  return to_json(message).dump();
}

Message decode_message(std::string_view text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw DecodeError("payload is not valid JSON");
  return message_from_json(j);
}

}  // namespace chshauth
