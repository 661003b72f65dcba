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

// Seed derivation for reproducible runs.
//
// Every random stream in a run comes from one 64-bit master seed:
//
//   derive_seed(master, domain, index) =
//       splitmix64(splitmix64(master ^ splitmix64(domain)) + index)
//
// where `domain` names the consumer (session ids, the Authorizer, the User,
// the Distributor, simulation runs) and `index` is a counter or a string
// hash within that domain. Streams with different (domain, index) are
// statistically independent, so sessions may run in any order or in parallel
// and still reproduce bit for bit.

#ifndef CHSHAUTH_SEEDS_H_
#define CHSHAUTH_SEEDS_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace chshauth {

enum class StreamDomain : std::uint64_t {
  kSessionId = 1,
  kAuthorizer = 2,
  kUser = 3,
  kDistributor = 4,
  kRun = 5,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, StreamDomain domain,
                                    std::uint64_t index) {
  return splitmix64(
      splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(domain))) +
      index);
}

// 64-bit FNV-1a.
std::uint64_t hash_string(std::string_view text);

// Uniform double in [0, 1) from the top 53 bits of a 64-bit word.
constexpr double to_unit_interval(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

// "s-" followed by 16 hex digits derived from (master, index).
std::string derive_session_id(std::uint64_t master, std::uint64_t index);

// Private randomness of one protocol role.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  int bit() { return static_cast<int>(engine_() >> 63); }
  double uniform() { return to_unit_interval(engine_()); }
  void fill(std::span<std::uint8_t> out);

 private:
  std::mt19937_64 engine_;
};

}  // namespace chshauth

#endif  // CHSHAUTH_SEEDS_H_
