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

#include "chshauth/commit.h"

#include <vector>

#include <openssl/sha.h>

namespace chshauth {

Digest sha256(std::span<const std::uint8_t> bytes) {
  Digest out;
  SHA256(bytes.data(), bytes.size(), out.data());
  return out;
}

Digest commit(std::int64_t round, Role role,
              std::span<const std::uint8_t> value_bits, const Salt& salt) {
  std::vector<std::uint8_t> buf;
  buf.reserve(8 + 1 + 4 + value_bits.size() + salt.size());
  const auto r = static_cast<std::uint64_t>(round);
  for (int shift = 56; shift >= 0; shift -= 8) {
    buf.push_back(static_cast<std::uint8_t>(r >> shift));
  }
  buf.push_back(static_cast<std::uint8_t>(role));
  const auto len = static_cast<std::uint32_t>(value_bits.size());
  for (int shift = 24; shift >= 0; shift -= 8) {
    buf.push_back(static_cast<std::uint8_t>(len >> shift));
  }
  buf.insert(buf.end(), value_bits.begin(), value_bits.end());
  buf.insert(buf.end(), salt.begin(), salt.end());
  return sha256(buf);
}

Digest commit(std::int64_t round, Role role, int question, int answer,
              const Salt& salt) {
  const std::array<std::uint8_t, 2> value{static_cast<std::uint8_t>(question),
                                          static_cast<std::uint8_t>(answer)};
  return commit(round, role, value, salt);
}

bool verify_reveal(const Digest& digest, std::int64_t round, Role role,
                   int question, int answer, const Salt& salt) {
  return commit(round, role, question, answer, salt) == digest;
}

}  // namespace chshauth
