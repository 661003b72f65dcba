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

// Text encodings used on the wire and in database files.

#ifndef CHSHAUTH_CODEC_H_
#define CHSHAUTH_CODEC_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chshauth {

std::string to_hex(std::span<const std::uint8_t> bytes);

// Lowercase or uppercase hex. Throws DecodeError on odd length or bad digits.
std::vector<std::uint8_t> from_hex(std::string_view text);

template <std::size_t N>
std::array<std::uint8_t, N> from_hex_array(std::string_view text);

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Standard alphabet with padding. Throws DecodeError on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Packs bits (each 0 or 1) MSB-first into bytes and hex-encodes them.
std::string pack_bits_hex(std::span<const std::uint8_t> bits);
// Inverse of pack_bits_hex for a known bit count; throws DecodeError if the
// length does not match or padding bits are set.
std::vector<std::uint8_t> unpack_bits_hex(std::string_view text,
                                          std::size_t count);

}  // namespace chshauth

#endif  // CHSHAUTH_CODEC_H_
