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

#ifndef CHSHAUTH_TCP_H_
#define CHSHAUTH_TCP_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "chshauth/resource.h"
#include "chshauth/transport.h"

namespace chshauth {

inline constexpr std::uint16_t kDefaultPort = 7117;

// Framed messages over a connected stream socket. One writer and one reader
// may use an endpoint concurrently.
class TcpEndpoint : public Endpoint {
 public:
  explicit TcpEndpoint(int fd);
  ~TcpEndpoint() override;
  TcpEndpoint(const TcpEndpoint&) = delete;
  TcpEndpoint& operator=(const TcpEndpoint&) = delete;

  void send(const Message& message) override;
  std::optional<Message> recv(std::chrono::milliseconds timeout) override;
  void close() override;
  bool is_open() const override { return fd_ >= 0; }

  // Writes raw bytes; lets tests put malformed frames on the wire.
  void send_raw(std::span<const std::uint8_t> bytes);

 private:
  // Fills the read buffer to at least `want` bytes. Returns false on timeout.
  bool fill(std::size_t want, std::chrono::steady_clock::time_point deadline,
            bool mid_frame);

  std::atomic<int> fd_;
  std::mutex write_mutex_;
  std::vector<std::uint8_t> buffer_;
};

std::unique_ptr<TcpEndpoint> tcp_connect(const std::string& host,
                                         std::uint16_t port);

class TcpListener {
 public:
  // Port 0 binds an ephemeral port; see port().
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  // Returns nullptr on timeout or after close().
  std::unique_ptr<TcpEndpoint> accept(std::chrono::milliseconds timeout);
  void close();

 private:
  std::atomic<int> fd_;
  std::uint16_t port_ = 0;
};

// Serves a Distributor over TCP: one thread per connection, answering
// ProvisionRequest and MeasureRequest frames.
class DistributorServer {
 public:
  DistributorServer(Distributor& distributor, const std::string& host,
                    std::uint16_t port);
  ~DistributorServer();

  std::uint16_t port() const { return listener_.port(); }
  void start();
  void stop();
  // Blocks until stop() is called from another thread.
  void wait();

 private:
  void serve(std::unique_ptr<TcpEndpoint> endpoint);

  Distributor& distributor_;
  TcpListener listener_;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::mutex workers_mutex_;
  std::vector<std::thread> workers_;
};

// ResourceAccess backed by a remote Distributor. Not thread-safe; use one per
// session.
class RemoteResource : public ResourceAccess {
 public:
  RemoteResource(std::string host, std::uint16_t port,
                 std::chrono::milliseconds timeout);

  void provision(const std::string& session_id, const std::string& user_id,
                 std::int64_t count) override;
  int measure(const std::string& session_id, std::int64_t pair, Party party,
              const MeasurementSetting& setting) override;

 private:
  Message call(const Message& request);

  std::string host_;
  std::uint16_t port_;
  std::chrono::milliseconds timeout_;
  std::unique_ptr<TcpEndpoint> endpoint_;
};

}  // namespace chshauth

#endif  // CHSHAUTH_TCP_H_
