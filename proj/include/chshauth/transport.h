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

#ifndef CHSHAUTH_TRANSPORT_H_
#define CHSHAUTH_TRANSPORT_H_

#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chshauth/message.h"

namespace chshauth {

inline constexpr std::size_t kMaxFramePayload = std::size_t{1} << 20;

// 4-byte big-endian length prefix followed by the UTF-8 JSON payload.
std::vector<std::uint8_t> encode_frame(const Message& message);
std::vector<std::uint8_t> encode_frame_payload(std::string_view payload);

// Decodes one complete frame. Throws DecodeError on a short buffer, a length
// mismatch, an oversize payload or malformed JSON.
Message decode_frame(std::span<const std::uint8_t> frame);

class Endpoint {
 public:
  virtual ~Endpoint() = default;

  virtual void send(const Message& message) = 0;
  // Returns nullopt when nothing arrives within `timeout`. Throws
  // TransportError once the peer has closed.
  virtual std::optional<Message> recv(std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
  virtual bool is_open() const = 0;
};

// In-process endpoint pair. Messages still travel as encoded frames so the
// byte format is exercised; delivery is immediate and never blocks.
class LoopbackEndpoint : public Endpoint {
 public:
  ~LoopbackEndpoint() override { close(); }

  void send(const Message& message) override;
  std::optional<Message> recv(std::chrono::milliseconds timeout) override;
  void close() override;
  bool is_open() const override { return open_; }

  std::size_t pending() const { return inbox_.size(); }
  // Every frame this endpoint has sent, in order.
  const std::vector<std::vector<std::uint8_t>>& sent_frames() const {
    return sent_;
  }

 private:
  friend std::pair<std::unique_ptr<LoopbackEndpoint>,
                   std::unique_ptr<LoopbackEndpoint>>
  loopback_pair();

  LoopbackEndpoint* peer_ = nullptr;
  bool open_ = true;
  std::deque<std::vector<std::uint8_t>> inbox_;
  std::vector<std::vector<std::uint8_t>> sent_;
};

std::pair<std::unique_ptr<LoopbackEndpoint>, std::unique_ptr<LoopbackEndpoint>>
loopback_pair();

}  // namespace chshauth

#endif  // CHSHAUTH_TRANSPORT_H_
