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

#include "bitswap/container.hpp"

#include <algorithm>
#include <string>

#include "bitswap/error.hpp"

namespace bitswap {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'B', 'S', 'W', 'P'};

template <class T>
void put(std::vector<std::uint8_t>& out, T v) {
  for (int shift = 8 * (static_cast<int>(sizeof(T)) - 1); shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>(v >> shift));
}

template <class T>
T get(std::span<const std::uint8_t> bytes, std::size_t at) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v = static_cast<T>((v << 8) | bytes[at + i]);
  return v;
}

}  // namespace

std::vector<std::uint8_t> write_container(const Container& c) {
  const auto& h = c.header;
  std::vector<std::uint8_t> out;
  out.reserve(kContainerHeaderSize + 4 * c.payload.size());
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  out.push_back(h.version);
  out.push_back(h.scheme == SchemeId::BBANS ? 0 : 1);
  out.insert(out.end(), h.model_hash.begin(), h.model_hash.end());
  out.push_back(h.depth);
  put(out, h.n_datapoints);
  put(out, h.n_seed_words);
  put(out, h.seed);
  put(out, static_cast<std::uint64_t>(c.payload.size()));
  for (std::uint32_t w : c.payload) put(out, w);
  return out;
}

Container read_container(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kContainerHeaderSize)
    throw FormatError("truncated container: " + std::to_string(bytes.size()) + " bytes");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
    throw FormatError("not a bitswap container (bad magic)");
  Container c;
  auto& h = c.header;
  h.version = bytes[4];
  if (h.version != kContainerVersion)
    throw FormatError("unsupported container version " + std::to_string(h.version));
  if (bytes[5] > 1) throw FormatError("unknown scheme id " + std::to_string(bytes[5]));
  h.scheme = bytes[5] == 0 ? SchemeId::BBANS : SchemeId::BITSWAP;
  std::copy_n(bytes.begin() + 6, 32, h.model_hash.begin());
  h.depth = bytes[38];
  h.n_datapoints = get<std::uint32_t>(bytes, 39);
  h.n_seed_words = get<std::uint32_t>(bytes, 43);
  h.seed = get<std::uint64_t>(bytes, 47);
  const auto n_words = get<std::uint64_t>(bytes, 55);
  const std::size_t body = bytes.size() - kContainerHeaderSize;
  if (body % 4 != 0 || body / 4 != n_words)
    throw FormatError("container length does not match its payload word count");
  c.payload.resize(static_cast<std::size_t>(n_words));
  for (std::size_t i = 0; i < c.payload.size(); ++i)
    c.payload[i] = get<std::uint32_t>(bytes, kContainerHeaderSize + 4 * i);
  return c;
}

std::vector<std::uint32_t> coder_payload(const CoderState& coder) {
  std::vector<std::uint32_t> out(coder.words());
  out.push_back(static_cast<std::uint32_t>(coder.state()));
  out.push_back(static_cast<std::uint32_t>(coder.state() >> 32));
  return out;
}

CoderState coder_from_payload(std::span<const std::uint32_t> payload) {
  if (payload.size() < 2) throw CorruptStream("payload too short to hold a coder state");
  const std::size_t n = payload.size();
  const std::uint64_t state = (std::uint64_t{payload[n - 1]} << 32) | payload[n - 2];
  return CoderState(std::vector<std::uint32_t>(payload.begin(), payload.end() - 2), state);
}

}  // namespace bitswap
