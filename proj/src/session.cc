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

#include "chshauth/session.h"

#include <fstream>
#include <iostream>

#include "chshauth/errors.h"
#include "chshauth/seeds.h"

namespace chshauth {

namespace {

template <class Machine>
void deliver(Machine& machine, Services& services, Endpoint& endpoint,
             const Event& event) {
  for (const Message& m : machine.step(event, services)) {
    try {
      endpoint.send(m);
    } catch (const TransportError&) {
      // The peer is gone; the machine has already settled its own state.
    }
  }
}

template <class Machine>
void drive(Machine& machine, Services& services, Endpoint& endpoint,
           std::chrono::milliseconds timeout) {
  while (!machine.finished()) {
    std::optional<Message> m = endpoint.recv(timeout);
    deliver(machine, services, endpoint,
            m ? Event(std::move(*m)) : Event(TimeoutEvent{}));
  }
}

}  // namespace

SessionResult run_session(const ProtocolParams& params,
                          const LevelTable& table, const SessionSpec& spec,
                          std::uint64_t seed, const SessionOptions& options) {
  Distributor distributor(table, seed);
  distributor.assign(spec.user_id, spec.true_level);

  UserMachine user({spec.user_id, spec.requested_level, spec.true_level,
                    spec.behavior},
                   table, params, options.batched);
  AuthorizerMachine authorizer(derive_session_id(seed, options.session_index),
                               table, params, options.batched, options.policy);
  Rng user_rng(
      derive_seed(seed, StreamDomain::kUser, hash_string(spec.user_id)));
  Rng authorizer_rng(
      derive_seed(seed, StreamDomain::kAuthorizer, options.session_index));
  Services user_services{&distributor, &user_rng};
  Services authorizer_services{&distributor, &authorizer_rng};

  auto [user_end, authorizer_end] = loopback_pair();
  deliver(user, user_services, *user_end, StartEvent{});
  for (;;) {
    bool moved = false;
    while (authorizer_end->pending() > 0) {
      moved = true;
      deliver(authorizer, authorizer_services, *authorizer_end,
              *authorizer_end->recv(std::chrono::milliseconds(0)));
    }
    while (user_end->pending() > 0) {
      moved = true;
      deliver(user, user_services, *user_end,
              *user_end->recv(std::chrono::milliseconds(0)));
    }
    if (moved) continue;
    if (user.finished() && authorizer.finished()) break;
    if (!authorizer.finished()) {
      deliver(authorizer, authorizer_services, *authorizer_end, TimeoutEvent{});
    }
    if (!user.finished()) {
      deliver(user, user_services, *user_end, TimeoutEvent{});
    }
  }

  SessionResult result;
  result.verdict = authorizer.verdict().value_or(
      Verdict::Aborted(authorizer.abort_reason()));
  result.transcript = authorizer.transcript();
  result.user_phase = user.phase();
  result.authorizer_phase = authorizer.phase();
  result.user_abort_reason = user.abort_reason();
  return result;
}

// ---------------------------------------------------------------------------

AuthorizerServer::AuthorizerServer(ServerConfig config, LevelTable table,
                                   LeveledDatabase db)
    : config_(std::move(config)),
      table_(std::move(table)),
      db_(std::move(db)),
      listener_(config_.host, config_.port) {}

AuthorizerServer::~AuthorizerServer() { stop(); }

void AuthorizerServer::start() {
  running_ = true;
  accept_thread_ = std::thread([this] {
    std::uint64_t index = 0;
    while (running_) {
      auto endpoint = listener_.accept(std::chrono::milliseconds(100));
      if (!endpoint) continue;
      std::lock_guard lock(mutex_);
      workers_.emplace_back(
          [this, ep = std::move(endpoint), i = index++]() mutable {
            try {
              serve(std::move(ep), i);
            } catch (const std::exception& e) {
              std::cerr << "session " << i << " failed: " << e.what() << "\n";
              std::lock_guard lock(mutex_);
              ++finished_;
            }
            done_.notify_all();
          });
    }
  });
}

void AuthorizerServer::stop() {
  {
    std::lock_guard lock(mutex_);
    running_ = false;
  }
  done_.notify_all();
  if (accept_thread_.joinable()) accept_thread_.join();
  listener_.close();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mutex_);
    workers.swap(workers_);
  }
  for (std::thread& t : workers) t.join();
}

void AuthorizerServer::wait(std::size_t sessions) {
  std::unique_lock lock(mutex_);
  done_.wait(lock, [&] {
    return !running_ || (sessions > 0 && finished_ >= sessions);
  });
}

std::vector<SessionRecord> AuthorizerServer::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

void AuthorizerServer::serve(std::unique_ptr<TcpEndpoint> endpoint,
                             std::uint64_t index) {
  const std::string session_id = derive_session_id(config_.seed, index);
  AuthorizerMachine machine(session_id, table_, config_.params,
                            config_.batched, config_.policy);
  Rng rng(derive_seed(config_.seed, StreamDomain::kAuthorizer, index));
  RemoteResource resource(config_.distributor_host, config_.distributor_port,
                          config_.timeout);
  Services services{&resource, &rng};

  std::optional<std::string> transport_failure;
  try {
    drive(machine, services, *endpoint, config_.timeout);
  } catch (const TransportError& e) {
    transport_failure = e.what();
  }

  SessionRecord record{session_id, machine.user_id(),
                       machine.verdict().value_or(Verdict::Aborted(
                           "transport-failure: " +
                           transport_failure.value_or("unknown"))),
                       machine.transcript()};
  std::cerr << "session " << session_id << " user=" << record.user_id << " "
            << (record.verdict.granted()
                    ? "granted " + std::to_string(*record.verdict.granted_level)
                    : "aborted: " + record.verdict.abort_reason)
            << "\n";
  if (config_.transcript_dir) {
    std::filesystem::create_directories(*config_.transcript_dir);
    std::ofstream out(*config_.transcript_dir / (session_id + ".json"));
    out << to_json(record.transcript).dump() << "\n";
  }
  {
    std::lock_guard lock(mutex_);
    records_.push_back(record);
  }
  if (record.verdict.granted()) serve_queries(*endpoint, record);
  {
    std::lock_guard lock(mutex_);
    ++finished_;
  }
  done_.notify_all();
}

void AuthorizerServer::serve_queries(TcpEndpoint& endpoint,
                                     const SessionRecord& record) {
  const AccessGrant grant =
      issue_grant(record.verdict, record.user_id, record.session_id);
  try {
    while (running_) {
      std::optional<Message> m = endpoint.recv(config_.timeout);
      if (!m) return;
      const auto* q = std::get_if<QueryRequest>(&*m);
      if (q == nullptr) return;
      if (q->session_id != record.session_id) {
        endpoint.send(QueryReply{q->record_id, "denied", ""});
        continue;
      }
      endpoint.send(to_reply(q->record_id, query(db_, grant, q->record_id)));
    }
  } catch (const TransportError&) {
    // User closed the connection.
  }
}

// ---------------------------------------------------------------------------

ClientResult run_user_client(const ClientConfig& config,
                             const LevelTable& table) {
  ClientResult result;
  std::unique_ptr<TcpEndpoint> endpoint =
      tcp_connect(config.host, config.port);
  RemoteResource resource(config.distributor_host, config.distributor_port,
                          config.timeout);
  Rng rng(derive_seed(config.seed, StreamDomain::kUser,
                      hash_string(config.user.user_id)));
  Services services{&resource, &rng};
  UserMachine machine(config.user, table, config.params, config.batched);

  try {
    deliver(machine, services, *endpoint, StartEvent{});
    drive(machine, services, *endpoint, config.timeout);
  } catch (const TransportError& e) {
    result.abort_reason = std::string("transport-failure: ") + e.what();
  }
  result.phase = machine.finished() ? machine.phase() : Phase::kAborted;
  result.verdict = machine.verdict();
  if (result.abort_reason.empty()) result.abort_reason = machine.abort_reason();
  result.transcript = machine.transcript();

  if (machine.granted()) {
    for (const std::string& id : config.query_ids) {
      endpoint->send(QueryRequest{result.transcript.session_id, id});
      std::optional<Message> reply = endpoint->recv(config.timeout);
      if (!reply) throw TimeoutError("no reply to query " + id);
      const auto* q = std::get_if<QueryReply>(&*reply);
      if (q == nullptr) throw DecodeError("unexpected reply to query " + id);
      result.queries.push_back(*q);
    }
  }
  endpoint->close();
  return result;
}

}  // namespace chshauth
