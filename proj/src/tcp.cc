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

#include "chshauth/tcp.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <iostream>

#include "chshauth/errors.h"

namespace chshauth {

namespace {

std::string errno_text(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

int wait_ms(std::chrono::steady_clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
  return left.count() < 0 ? 0 : static_cast<int>(std::min<long long>(
                                    left.count(), 1 << 30));
}

}  // namespace

TcpEndpoint::TcpEndpoint(int fd) : fd_(fd) { set_nodelay(fd); }

TcpEndpoint::~TcpEndpoint() { close(); }

void TcpEndpoint::close() {
  const int fd = fd_.exchange(-1);
  if (fd >= 0) {
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
  }
}

void TcpEndpoint::send_raw(std::span<const std::uint8_t> bytes) {
  std::lock_guard lock(write_mutex_);
  const int fd = fd_.load();
  if (fd < 0) throw TransportError("send on closed channel");
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n =
        ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_text("send"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

void TcpEndpoint::send(const Message& message) {
  send_raw(encode_frame(message));
}

bool TcpEndpoint::fill(std::size_t want,
                       std::chrono::steady_clock::time_point deadline,
                       bool mid_frame) {
  std::uint8_t chunk[1 << 16];
  while (buffer_.size() < want) {
    const int fd = fd_.load();
    if (fd < 0) throw TransportError("recv on closed channel");
    pollfd p{fd, POLLIN, 0};
    const int ready = ::poll(&p, 1, wait_ms(deadline));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_text("poll"));
    }
    if (ready == 0) {
      if (mid_frame) throw DecodeError("truncated frame: peer stalled mid-frame");
      return false;
    }
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw TransportError(errno_text("recv"));
    }
    if (n == 0) {
      if (mid_frame || !buffer_.empty()) {
        throw DecodeError("truncated frame: connection closed mid-frame");
      }
      throw TransportError("connection closed by peer");
    }
    buffer_.insert(buffer_.end(), chunk, chunk + n);
  }
  return true;
}

std::optional<Message> TcpEndpoint::recv(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  if (!fill(4, deadline, !buffer_.empty())) return std::nullopt;
  const std::uint32_t n = (std::uint32_t{buffer_[0]} << 24) |
                          (std::uint32_t{buffer_[1]} << 16) |
                          (std::uint32_t{buffer_[2]} << 8) | buffer_[3];
  if (n > kMaxFramePayload) throw DecodeError("frame length exceeds limit");
  fill(4 + std::size_t{n}, deadline, true);
  Message m = decode_frame(std::span(buffer_.data(), 4 + std::size_t{n}));
  buffer_.erase(buffer_.begin(), buffer_.begin() + 4 + n);
  return m;
}

std::unique_ptr<TcpEndpoint> tcp_connect(const std::string& host,
                                         std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found);
      rc != 0) {
    throw TransportError("resolve " + host + ": " + ::gai_strerror(rc));
  }
  std::string last_error = "no addresses";
  for (addrinfo* a = found; a != nullptr; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) {
      last_error = errno_text("socket");
      continue;
    }
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
      ::freeaddrinfo(found);
      return std::make_unique<TcpEndpoint>(fd);
    }
    last_error = errno_text("connect");
    ::close(fd);
  }
  ::freeaddrinfo(found);
  throw TransportError("connect to " + host + ":" + service + " failed: " +
                       last_error);
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port)
    : fd_(-1) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(),
                                   service.c_str(), &hints, &found);
      rc != 0) {
    throw TransportError("resolve " + host + ": " + ::gai_strerror(rc));
  }
  const int fd = ::socket(found->ai_family, found->ai_socktype, 0);
  if (fd < 0) {
    ::freeaddrinfo(found);
    throw TransportError(errno_text("socket"));
  }
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd, found->ai_addr, found->ai_addrlen) != 0 ||
      ::listen(fd, 64) != 0) {
    const std::string err = errno_text("bind/listen");
    ::freeaddrinfo(found);
    ::close(fd);
    throw TransportError(err + " on port " + service);
  }
  ::freeaddrinfo(found);
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
  fd_ = fd;
}

TcpListener::~TcpListener() { close(); }

void TcpListener::close() {
  const int fd = fd_.exchange(-1);
  if (fd >= 0) {
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
  }
}

std::unique_ptr<TcpEndpoint> TcpListener::accept(
    std::chrono::milliseconds timeout) {
  const int fd = fd_.load();
  if (fd < 0) return nullptr;
  pollfd p{fd, POLLIN, 0};
  const int ready = ::poll(&p, 1, static_cast<int>(timeout.count()));
  if (ready <= 0 || fd_.load() < 0) return nullptr;
  const int client = ::accept(fd, nullptr, nullptr);
  if (client < 0) return nullptr;
  return std::make_unique<TcpEndpoint>(client);
}

// ---------------------------------------------------------------------------

DistributorServer::DistributorServer(Distributor& distributor,
                                     const std::string& host,
                                     std::uint16_t port)
    : distributor_(distributor), listener_(host, port) {}

DistributorServer::~DistributorServer() { stop(); }

void DistributorServer::start() {
  running_ = true;
  accept_thread_ = std::thread([this] {
    while (running_) {
      auto endpoint = listener_.accept(std::chrono::milliseconds(100));
      if (!endpoint) continue;
      std::lock_guard lock(workers_mutex_);
      workers_.emplace_back(
          [this, ep = std::move(endpoint)]() mutable { serve(std::move(ep)); });
    }
  });
}

void DistributorServer::stop() {
  running_ = false;
  if (accept_thread_.joinable()) accept_thread_.join();
  listener_.close();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(workers_mutex_);
    workers.swap(workers_);
  }
  for (std::thread& t : workers) t.join();
}

void DistributorServer::wait() {
  if (accept_thread_.joinable()) accept_thread_.join();
}

void DistributorServer::serve(std::unique_ptr<TcpEndpoint> endpoint) {
  while (running_) {
    std::optional<Message> request;
    try {
      request = endpoint->recv(std::chrono::milliseconds(200));
    } catch (const TransportError&) {
      return;
    }
    if (!request) continue;
    Message reply;
    try {
      if (const auto* p = std::get_if<ProvisionRequest>(&*request)) {
        distributor_.provision(p->session_id, p->user_id, p->count);
        reply = ProvisionReply{p->session_id, p->count};
      } else if (const auto* m = std::get_if<MeasureRequest>(&*request)) {
        reply = MeasureReply{distributor_.measure(m->session_id, m->pair_index,
                                                  m->party, m->setting)};
      } else {
        reply = Abort{"unexpected-message"};
      }
    } catch (const std::exception& e) {
      reply = Abort{e.what()};
    }
    try {
      endpoint->send(reply);
    } catch (const TransportError&) {
      return;
    }
  }
}

// ---------------------------------------------------------------------------

RemoteResource::RemoteResource(std::string host, std::uint16_t port,
                               std::chrono::milliseconds timeout)
    : host_(std::move(host)), port_(port), timeout_(timeout) {}

Message RemoteResource::call(const Message& request) {
  if (!endpoint_) endpoint_ = tcp_connect(host_, port_);
  endpoint_->send(request);
  std::optional<Message> reply = endpoint_->recv(timeout_);
  if (!reply) throw TimeoutError("distributor did not answer in time");
  if (const auto* a = std::get_if<Abort>(&*reply)) {
    throw ResourceError("distributor: " + a->reason);
  }
  return *reply;
}

void RemoteResource::provision(const std::string& session_id,
                               const std::string& user_id,
                               std::int64_t count) {
  const Message reply = call(ProvisionRequest{session_id, user_id, count});
  if (!std::holds_alternative<ProvisionReply>(reply)) {
    throw ResourceError("distributor sent an unexpected reply to provision");
  }
}

int RemoteResource::measure(const std::string& session_id, std::int64_t pair,
                            Party party, const MeasurementSetting& setting) {
  const Message reply = call(MeasureRequest{session_id, pair, party, setting});
  const auto* m = std::get_if<MeasureReply>(&reply);
  if (m == nullptr) {
    throw ResourceError("distributor sent an unexpected reply to measure");
  }
  return m->outcome;
}

}  // namespace chshauth
