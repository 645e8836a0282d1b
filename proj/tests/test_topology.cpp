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

#include <stdexcept>

#include "bitswap/model_io.hpp"
#include "bitswap/schemes.hpp"
#include "bitswap/topology.hpp"

using namespace bitswap;

namespace {

Op d(int v) { return {OpKind::Decode, v, Dist::Inference}; }
Op e(int v) { return {OpKind::Encode, v, Dist::Generative}; }

TabularTreeModel tree(std::uint64_t seed) {
  GenSpec spec;
  spec.kind = ModelKind::TabularTree;
  spec.data_dim = 4;
  spec.x_alphabet = 8;
  spec.latent_alphabet = 4;
  spec.layer_dims = {2, 1, 2, 1};
  spec.seed = seed;
  return std::get<TabularTreeModel>(gen_model(spec));
}

}  // namespace

TEST_CASE("chain schedules") {
  CHECK(chain_schedule(3, SchemeId::BITSWAP) == Schedule{d(1), e(0), d(2), e(1), d(3), e(2), e(3)});
  CHECK(chain_schedule(2, SchemeId::BBANS) == Schedule{d(1), d(2), e(0), e(1), e(2)});
  CHECK(chain_schedule(1, SchemeId::BBANS) == chain_schedule(1, SchemeId::BITSWAP));
  CHECK(chain_schedule(1, SchemeId::BITSWAP) == Schedule{d(1), e(0), e(1)});
  CHECK(format_schedule(chain_schedule(2, SchemeId::BITSWAP), Topology::chain(2)) ==
        "D z1|q(z1|x), E x|p(x|z1), D z2|q(z2|z1), E z1|p(z1|z2), E z2|p(z2)");
  CHECK_THROWS_AS(chain_schedule(0, SchemeId::BBANS), std::invalid_argument);
}

TEST_CASE("compile_schedule on chains is the Bit-Swap order") {
  for (int l = 1; l <= 8; ++l) {
    CAPTURE(l);
    const auto t = Topology::chain(l);
    CHECK(compile_schedule(t) == chain_schedule(l, SchemeId::BITSWAP));
    CHECK(decode_first_schedule(t) == chain_schedule(l, SchemeId::BBANS));
    CHECK(validate_schedule(t, chain_schedule(l, SchemeId::BITSWAP)));
    CHECK(validate_schedule(t, chain_schedule(l, SchemeId::BBANS)));
  }
}

TEST_CASE("reverse schedule") {
  const auto s = chain_schedule(3, SchemeId::BITSWAP);
  const auto r = reverse_schedule(s);
  CHECK(r.size() == s.size());
  CHECK(reverse_schedule(r) == s);
  // Receiver: decode under p, encode under q, mirrored.
  CHECK(r == Schedule{{OpKind::Decode, 3, Dist::Generative},
                      {OpKind::Decode, 2, Dist::Generative},
                      {OpKind::Encode, 3, Dist::Inference},
                      {OpKind::Decode, 1, Dist::Generative},
                      {OpKind::Encode, 2, Dist::Inference},
                      {OpKind::Decode, 0, Dist::Generative},
                      {OpKind::Encode, 1, Dist::Inference}});
}

TEST_CASE("schedule validation") {
  const auto t = Topology::chain(3);
  auto s = chain_schedule(3, SchemeId::BITSWAP);

  auto hybrid = s;
  std::swap(hybrid[1], hybrid[2]);  // D z2 before E x
  CHECK(validate_schedule(t, hybrid));

  auto early = s;
  std::swap(early[2], early[3]);  // E z1 before its parent z2 is known
  const auto bad = validate_schedule(t, early);
  CHECK_FALSE(bad);
  CHECK(bad.violation.find("not yet known") != std::string::npos);

  auto x_first = s;
  std::swap(x_first[0], x_first[1]);
  CHECK_FALSE(validate_schedule(t, x_first));

  CHECK_FALSE(validate_schedule(t, {}));

  auto twice = s;
  twice[6] = e(2);
  CHECK_FALSE(validate_schedule(t, twice));

  // Legal for the sender but not for the receiver: z1 leaves the stream
  // before z2, which q(z2 | z1) needs on the way back.
  Schedule receiver_bad{d(1), d(2), e(0), e(2), e(1), e(3)};
  receiver_bad.insert(receiver_bad.begin() + 2, d(3));
  CHECK_FALSE(validate_schedule(t, receiver_bad));
}

TEST_CASE("topology validation") {
  auto t = Topology::chain(2);
  t.generative_parents[2] = {1};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = Topology::chain(2);
  t.inference_parents[2] = {2};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = Topology::chain(2);
  t.inference_parents[1] = {2};
  t.inference_parents[2] = {1};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("tree schedule") {
  const auto m = tree(3);
  const auto& t = m.topology();
  const auto s = compile_schedule(t);
  INFO(format_schedule(s, t));
  CHECK(validate_schedule(t, s));
  const auto all_first = decode_first_schedule(t);
  CHECK(validate_schedule(t, all_first));
  CHECK(max_outstanding_decodes(s) < max_outstanding_decodes(all_first));
  CHECK(s == Schedule{d(1), d(2), e(0), d(3), e(1), d(4), e(3), e(2), e(4)});
}

TEST_CASE("execute_schedule matches the explicit schemes") {
  GenSpec spec;
  spec.depth = 3;
  spec.layer_dims = {2};
  spec.latent_alphabet = 5;
  spec.x_alphabet = 6;
  spec.data_dim = 4;
  spec.inference = InferenceMode::Random;
  spec.seed = 12;
  const auto m = std::get<ChainModel>(gen_model(spec));
  const ChainAdapter adapter(m);
  for (auto scheme : {SchemeId::BBANS, SchemeId::BITSWAP}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto x = sample_ancestral(m, seed).x;
      CoderState a, b;
      a.seed_buffer(8, seed);
      b.seed_buffer(8, seed);
      encode_datapoint(m, scheme, a, x);
      Assignment values(4);
      values[0] = x;
      const auto schedule = chain_schedule(3, scheme);
      execute_schedule(adapter, schedule, b, values);
      CHECK(a.same_stream(b));

      Assignment back;
      execute_schedule(adapter, reverse_schedule(schedule), b, back);
      CHECK(back[0] == x);
      CHECK(back == values);
      CoderState fresh;
      fresh.seed_buffer(8, seed);
      CHECK(b.same_stream(fresh));
    }
  }
}

TEST_CASE("tree model round trip") {
  const auto m = tree(21);
  std::vector<LayerValues> data;
  for (std::uint64_t i = 0; i < 30; ++i) data.push_back(m.sample(i)[0]);
  for (const auto& schedule : {compile_schedule(m.topology()), decode_first_schedule(m.topology())}) {
    auto res = graph_compress(m, schedule, data, 4, 77);
    const auto back = graph_decompress(m, schedule, res.coder, data.size());
    CHECK(back == data);
    CoderState fresh;
    fresh.seed_buffer(4, 77);
    CHECK(res.coder.same_stream(fresh));
  }
  CHECK_THROWS_AS(graph_compress(m, chain_schedule(4, SchemeId::BITSWAP), data, 4, 1),
                  std::invalid_argument);
}
