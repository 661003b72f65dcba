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

#ifndef CHSHAUTH_SESSION_H_
#define CHSHAUTH_SESSION_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "chshauth/authdb.h"
#include "chshauth/planner.h"
#include "chshauth/protocol.h"
#include "chshauth/tcp.h"

namespace chshauth {

inline constexpr std::chrono::milliseconds kDefaultTimeout{30000};

struct SessionSpec {
  std::string user_id = "user";
  // Level of the pairs the Distributor hands this user.
  int true_level = 1;
  int requested_level = 1;
  UserBehavior behavior;
};

struct SessionOptions {
  bool batched = false;
  VerdictPolicy policy;
  std::uint64_t session_index = 0;
};

struct SessionResult {
  // The Authorizer's verdict; an abort verdict if the session never reached
  // one.
  Verdict verdict;
  Transcript transcript;  // as recorded by the Authorizer
  Phase user_phase = Phase::kIdle;
  Phase authorizer_phase = Phase::kIdle;
  std::string user_abort_reason;

  bool granted_at(int level) const {
    return verdict.granted() && *verdict.granted_level == level &&
           user_phase == Phase::kDone;
  }
};

// Runs one session over an in-process loopback with a private Distributor.
// Deterministic in `seed`. Silence is detected immediately and delivered as a
// timeout to every unfinished role.
SessionResult run_session(const ProtocolParams& params,
                          const LevelTable& table, const SessionSpec& spec,
                          std::uint64_t seed,
                          const SessionOptions& options = {});

struct ServerConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = kDefaultPort;
  std::string distributor_host = "127.0.0.1";
  std::uint16_t distributor_port = kDefaultPort + 1;
  ProtocolParams params;
  bool batched = false;
  VerdictPolicy policy;
  std::uint64_t seed = 0;
  std::chrono::milliseconds timeout = kDefaultTimeout;
  // Written as <session_id>.json when set.
  std::optional<std::filesystem::path> transcript_dir;
};

struct SessionRecord {
  std::string session_id;
  std::string user_id;
  Verdict verdict;
  Transcript transcript;
};

// TCP Authorizer. Accepts one User per connection; the i-th accepted
// connection runs session index i. After a grant the connection stays open
// for QueryRequest frames until the User closes it.
class AuthorizerServer {
 public:
  AuthorizerServer(ServerConfig config, LevelTable table, LeveledDatabase db);
  ~AuthorizerServer();

  std::uint16_t port() const { return listener_.port(); }
  void start();
  void stop();
  // Blocks until `sessions` connections have finished, including any queries
  // after a grant (0 = until stop()).
  void wait(std::size_t sessions = 0);

  std::vector<SessionRecord> records() const;

 private:
  void serve(std::unique_ptr<TcpEndpoint> endpoint, std::uint64_t index);
  void serve_queries(TcpEndpoint& endpoint, const SessionRecord& record);

  ServerConfig config_;
  LevelTable table_;
  LeveledDatabase db_;
  TcpListener listener_;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::vector<std::thread> workers_;
  mutable std::mutex mutex_;
  std::condition_variable done_;
  std::vector<SessionRecord> records_;
  std::size_t finished_ = 0;
};

struct ClientConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = kDefaultPort;
  std::string distributor_host = "127.0.0.1";
  std::uint16_t distributor_port = kDefaultPort + 1;
  ProtocolParams params;
  bool batched = false;
  std::uint64_t seed = 0;
  std::chrono::milliseconds timeout = kDefaultTimeout;
  UserConfig user;
  std::vector<std::string> query_ids;
};

struct ClientResult {
  Phase phase = Phase::kIdle;
  std::optional<Verdict> verdict;
  std::string abort_reason;
  Transcript transcript;
  std::vector<QueryReply> queries;
};

// Runs the User role against a TCP Authorizer, then issues the queries if
// the session was granted.
ClientResult run_user_client(const ClientConfig& config,
                             const LevelTable& table);

}  // namespace chshauth

#endif  // CHSHAUTH_SESSION_H_
