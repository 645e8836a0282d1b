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

#include <doctest.h>

#include "bitswap/container.hpp"
#include "bitswap/error.hpp"

using namespace bitswap;

namespace {

Container sample() {
  Container c;
  c.header.scheme = SchemeId::BBANS;
  for (std::size_t i = 0; i < 32; ++i) c.header.model_hash[i] = static_cast<std::uint8_t>(i * 7);
  c.header.depth = 4;
  c.header.n_datapoints = 100;
  c.header.n_seed_words = 64;
  c.header.seed = 0x0123456789abcdefULL;
  c.payload = {1, 2, 0xdeadbeef, 0x80000000};
  return c;
}

}  // namespace

TEST_CASE("container layout") {
  const auto bytes = write_container(sample());
  REQUIRE(bytes.size() == kContainerHeaderSize + 16);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "BSWP");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6 + 1] == 7);
  CHECK(bytes[38] == 4);
  CHECK(bytes[42] == 100);
  CHECK(bytes[46] == 64);
  CHECK(bytes[47] == 0x01);
  CHECK(bytes[54] == 0xef);
  CHECK(bytes[62] == 4);
  CHECK(bytes[63 + 8] == 0xde);
  CHECK(bytes[63 + 15] == 0x00);
  CHECK(bytes[63 + 12] == 0x80);
}

TEST_CASE("container round trip") {
  const auto c = sample();
  const auto back = read_container(write_container(c));
  CHECK(back.header == c.header);
  CHECK(back.payload == c.payload);

  CoderState coder;
  coder.seed_buffer(3, 5);
  const auto restored = coder_from_payload(coder_payload(coder));
  CHECK(coder_payload(restored) == coder_payload(coder));
  CHECK(restored.total_bits() == coder.total_bits());
}

TEST_CASE("container rejects damage") {
  auto bytes = write_container(sample());
  for (std::size_t cut : {std::size_t{0}, std::size_t{10}, kContainerHeaderSize - 1,
                          bytes.size() - 1}) {
    std::vector<std::uint8_t> shorter(bytes.begin(), bytes.begin() + static_cast<long>(cut));
    CHECK_THROWS_AS(read_container(shorter), FormatError);
  }
  auto longer = bytes;
  longer.push_back(0);
  CHECK_THROWS_AS(read_container(longer), FormatError);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(read_container(magic), FormatError);
  auto version = bytes;
  version[4] = 9;
  CHECK_THROWS_AS(read_container(version), FormatError);
  auto scheme = bytes;
  scheme[5] = 2;
  CHECK_THROWS_AS(read_container(scheme), FormatError);
  const std::vector<std::uint32_t> one{5};
  CHECK_THROWS_AS(coder_from_payload(one), CorruptStream);
}
