// Copyright 2026 The Bitswap Authors
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

#pragma once

// Compressed file layout, all integers big-endian:
//
//   offset  size  field
//        0     4  magic "BSWP"
//        4     1  format version (1)
//        5     1  scheme (0 = BB-ANS, 1 = Bit-Swap)
//        6    32  SHA-256 of the canonical model serialization
//       38     1  number of latent variables L
//       39     4  number of datapoints
//       43     4  number of seeded initial words
//       47     8  seed of the initial words
//       55     8  payload word count n
//       63    4n  payload words: the stack bottom first, then the state's
//                 low word, then its high word

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "bitswap/rans.hpp"
#include "bitswap/topology.hpp"

namespace bitswap {

inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderSize = 63;

struct ContainerHeader {
  std::uint8_t version = kContainerVersion;
  SchemeId scheme = SchemeId::BITSWAP;
  std::array<std::uint8_t, 32> model_hash{};
  std::uint8_t depth = 0;
  std::uint32_t n_datapoints = 0;
  std::uint32_t n_seed_words = 0;
  std::uint64_t seed = 0;

  bool operator==(const ContainerHeader&) const = default;
};

struct Container {
  ContainerHeader header;
  std::vector<std::uint32_t> payload;
};

std::vector<std::uint8_t> write_container(const Container& container);
/// Throws FormatError on bad magic, unknown version or scheme, or a length
/// that disagrees with the payload word count.
Container read_container(std::span<const std::uint8_t> bytes);

std::vector<std::uint32_t> coder_payload(const CoderState& coder);
/// Throws CorruptStream if the payload cannot be a coder.
CoderState coder_from_payload(std::span<const std::uint32_t> payload);

}  // namespace bitswap
