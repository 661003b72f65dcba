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

// Salted SHA-256 commitments binding each party's (question, answer) before
// either side reveals.

#ifndef CHSHAUTH_COMMIT_H_
#define CHSHAUTH_COMMIT_H_

#include <array>
#include <cstdint>
#include <span>

namespace chshauth {

using Digest = std::array<std::uint8_t, 32>;
using Salt = std::array<std::uint8_t, 16>;

enum class Role : std::uint8_t { kUser = 'U', kAuthorizer = 'A' };

Digest sha256(std::span<const std::uint8_t> bytes);

// SHA-256 over
//   round (u64 big-endian) || role (1 byte) || len(value) (u32 big-endian)
//   || value || salt
// where `value` holds one byte per committed bit.
Digest commit(std::int64_t round, Role role,
              std::span<const std::uint8_t> value_bits, const Salt& salt);

// Per-round commitment to (question, answer).
Digest commit(std::int64_t round, Role role, int question, int answer,
              const Salt& salt);

bool verify_reveal(const Digest& digest, std::int64_t round, Role role,
                   int question, int answer, const Salt& salt);

}  // namespace chshauth

#endif  // CHSHAUTH_COMMIT_H_
