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

#include "chshauth/transport.h"

#include "chshauth/errors.h"

namespace chshauth {

std::vector<std::uint8_t> encode_frame_payload(std::string_view payload) {
  if (payload.size() > kMaxFramePayload) {
    throw DecodeError("frame payload exceeds " +
                      std::to_string(kMaxFramePayload) + " bytes");
  }
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::vector<std::uint8_t> frame;
  frame.reserve(4 + payload.size());
  frame.push_back(static_cast<std::uint8_t>(n >> 24));
  frame.push_back(static_cast<std::uint8_t>(n >> 16));
  frame.push_back(static_cast<std::uint8_t>(n >> 8));
  frame.push_back(static_cast<std::uint8_t>(n));
  frame.insert(frame.end(), payload.begin(), payload.end());
  return frame;
}

std::vector<std::uint8_t> encode_frame(const Message& message) {
  return encode_frame_payload(encode_message(message));
}

Message decode_frame(std::span<const std::uint8_t> frame) {
  if (frame.size() < 4) throw DecodeError("truncated frame header");
  const std::uint32_t n = (std::uint32_t{frame[0]} << 24) |
                          (std::uint32_t{frame[1]} << 16) |
                          (std::uint32_t{frame[2]} << 8) | frame[3];
  if (n > kMaxFramePayload) throw DecodeError("frame length exceeds limit");
  if (frame.size() != 4 + std::size_t{n}) {
    throw DecodeError("frame length does not match its header");
  }
  return decode_message(std::string_view(
      reinterpret_cast<const char*>(frame.data() + 4), n));
}

void LoopbackEndpoint::send(const Message& message) {
  if (!open_ || peer_ == nullptr || !peer_->open_) {
    throw TransportError("loopback peer is closed");
  }
  auto frame = encode_frame(message);
  sent_.push_back(frame);
  peer_->inbox_.push_back(std::move(frame));
}

std::optional<Message> LoopbackEndpoint::recv(std::chrono::milliseconds) {
  if (!inbox_.empty()) {
    Message m = decode_frame(inbox_.front());
    inbox_.pop_front();
    return m;
  }
  if (!open_ || peer_ == nullptr || !peer_->open_) {
    throw TransportError("loopback peer is closed");
  }
  return std::nullopt;
}

void LoopbackEndpoint::close() {
  open_ = false;
  if (peer_ != nullptr) {
    peer_->peer_ = nullptr;
    peer_ = nullptr;
  }
}

std::pair<std::unique_ptr<LoopbackEndpoint>, std::unique_ptr<LoopbackEndpoint>>
loopback_pair() {
  std::unique_ptr<LoopbackEndpoint> a(new LoopbackEndpoint);
  std::unique_ptr<LoopbackEndpoint> b(new LoopbackEndpoint);
  a->peer_ = b.get();
  b->peer_ = a.get();
  return {std::move(a), std::move(b)};
}

}  // namespace chshauth
