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

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>

#include "chshauth/codec.h"
#include "chshauth/errors.h"
#include "chshauth/seeds.h"
#include "test_util.h"

namespace chshauth {
namespace {

std::vector<std::uint8_t> bytes_of(std::string_view s) {
  return {s.begin(), s.end()};
}

TEST(SeedsTest, SplitMixReferenceOutputs) {
  // First outputs of the reference splitmix64 generator seeded with 0.
  static_assert(splitmix64(0) == 0xe220a8397b1dcdafULL);
  static_assert(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
}

TEST(SeedsTest, FnvReferenceOutputs) {
  EXPECT_EQ(hash_string(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(hash_string("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hash_string("foobar"), 0x85944171f73967e8ULL);
}

TEST(SeedsTest, DerivedStreamsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (auto d : {StreamDomain::kSessionId, StreamDomain::kAuthorizer,
                 StreamDomain::kUser, StreamDomain::kDistributor,
                 StreamDomain::kRun}) {
    for (std::uint64_t i = 0; i < 100; ++i) {
      EXPECT_TRUE(seen.insert(derive_seed(42, d, i)).second);
    }
  }
  EXPECT_NE(derive_seed(1, StreamDomain::kRun, 0),
            derive_seed(2, StreamDomain::kRun, 0));
}

TEST(SeedsTest, SessionIdFormat) {
  const std::string id = derive_session_id(7, 0);
  EXPECT_EQ(id.size(), 18u);
  EXPECT_EQ(id.substr(0, 2), "s-");
  EXPECT_EQ(id, derive_session_id(7, 0));
  EXPECT_NE(id, derive_session_id(7, 1));
}

TEST(SeedsTest, UnitInterval) {
  EXPECT_EQ(to_unit_interval(0), 0.0);
  EXPECT_LT(to_unit_interval(~0ULL), 1.0);
  EXPECT_EQ(to_unit_interval(1ULL << 63), 0.5);
}

TEST(SeedsTest, RngIsDeterministicAndBalanced) {
  Rng a(99);
  Rng b(99);
  int ones = 0;
  for (int i = 0; i < 10000; ++i) {
    const int x = a.bit();
    EXPECT_EQ(x, b.bit());
    ones += x;
  }
  // 10000 fair bits: 5000 +- 5 sigma.
  EXPECT_NEAR(ones, 5000, 250);
  std::array<std::uint8_t, 16> s1{};
  std::array<std::uint8_t, 16> s2{};
  a.fill(s1);
  a.fill(s2);
  EXPECT_NE(s1, s2);
}

TEST(HexTest, RoundTripAndErrors) {
  EXPECT_EQ(to_hex(bytes_of("\x01\xab\xff")), "01abff");
  EXPECT_EQ(from_hex("01ABff"), bytes_of("\x01\xab\xff"));
  EXPECT_THROW(from_hex("abc"), DecodeError);
  EXPECT_THROW(from_hex("zz"), DecodeError);
  EXPECT_THROW(from_hex_array<16>("00"), DecodeError);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto b = testing::random_bytes<32>(rng);
    EXPECT_EQ(from_hex_array<32>(to_hex(b)), b);
  }
}

TEST(Base64Test, Rfc4648Vectors) {
  const std::pair<const char*, const char*> cases[] = {
      {"", ""},         {"f", "Zg=="},         {"fo", "Zm8="},
      {"foo", "Zm9v"},  {"foob", "Zm9vYg=="},  {"fooba", "Zm9vYmE="},
      {"foobar", "Zm9vYmFy"}};
  for (const auto& [plain, encoded] : cases) {
    EXPECT_EQ(base64_encode(bytes_of(plain)), encoded);
    EXPECT_EQ(base64_decode(encoded), bytes_of(plain));
  }
  EXPECT_THROW(base64_decode("Zm9"), DecodeError);
  EXPECT_THROW(base64_decode("Zm!v"), DecodeError);
}

TEST(Base64Test, PropertyRoundTrip) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::uint8_t> data(rng() % 64);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    EXPECT_EQ(base64_decode(base64_encode(data)), data);
  }
}

TEST(BitPackingTest, MsbFirst) {
  const std::vector<std::uint8_t> bits = {1, 0, 1, 0, 0, 0, 0, 1, 1};
  EXPECT_EQ(pack_bits_hex(bits), "a180");
  EXPECT_EQ(unpack_bits_hex("a180", 9), bits);
  EXPECT_THROW(unpack_bits_hex("a180", 17), DecodeError);
  EXPECT_THROW(unpack_bits_hex("a1c0", 9), DecodeError);
}

TEST(BitPackingTest, PropertyRoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const auto bits = testing::random_bits(rng, rng() % 200);
    EXPECT_EQ(unpack_bits_hex(pack_bits_hex(bits), bits.size()), bits);
  }
}

}  // namespace
}  // namespace chshauth
