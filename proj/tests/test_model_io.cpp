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

#include <filesystem>
#include <fstream>

#include "bitswap/error.hpp"
#include "bitswap/model_io.hpp"

using namespace bitswap;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("bitswap_test_" + name);
}

}  // namespace

TEST_CASE("save and load are exact") {
  for (auto kind : {ModelKind::Tabular, ModelKind::AffineLogistic, ModelKind::TabularTree}) {
    CAPTURE(model_kind_name(kind));
    GenSpec spec;
    spec.kind = kind;
    spec.depth = 3;
    spec.layer_dims = {2};
    spec.latent_alphabet = 4;
    spec.x_alphabet = 4;
    spec.data_dim = 3;
    spec.bins = 64;
    spec.grid_samples = 500;
    spec.inference = kind == ModelKind::Tabular ? InferenceMode::Random : InferenceMode::Exact;
    spec.seed = 42;
    const auto model = gen_model(spec);
    const auto path = temp_file("model.json");
    save_model(model, path);
    const auto back = load_any_model(path);
    CHECK(back == model);
    CHECK(serialize_model(back) == serialize_model(model));
    CHECK(model_hash(back) == model_hash(model));
    CHECK(gen_model(spec) == model);
    spec.seed = 43;
    CHECK_FALSE(model_hash(gen_model(spec)) == model_hash(model));
    std::filesystem::remove(path);
  }
}

TEST_CASE("generated structure") {
  GenSpec spec;
  spec.kind = ModelKind::AffineLogistic;
  spec.depth = 8;
  spec.layer_dims = {2};
  spec.bins = 32;
  spec.grid_samples = 300;
  const auto m = std::get<ChainModel>(gen_model(spec));
  CHECK(m.grids().size() == 8);
  CHECK(m.affine_params().inference.size() == 8);
  CHECK(m.affine_params().generative.size() + 1 == 8);
  CHECK(m.grids().back() == equal_mass_grid({0.0, 1.0}, 32));
  CHECK(m.precision_bits() == 20);

  spec.kind = ModelKind::Tabular;
  spec.inference = InferenceMode::Exact;
  spec.layer_dims = {2};
  CHECK_THROWS_AS(gen_model(spec), std::invalid_argument);
}

TEST_CASE("malformed model files") {
  CHECK_THROWS_AS(parse_model("{"), FormatError);
  CHECK_THROWS_AS(parse_model("{}"), FormatError);
  GenSpec spec;
  spec.depth = 1;
  spec.x_alphabet = 3;
  spec.latent_alphabet = 3;
  spec.data_dim = 2;
  const std::string good = serialize_model(gen_model(spec));
  CHECK_NOTHROW(parse_model(good));

  auto edit = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
  };
  CHECK_THROWS_AS(parse_model(edit("\"format_version\":1", "\"format_version\":2")), FormatError);
  CHECK_THROWS_AS(parse_model(edit("\"family\":\"tabular\"", "\"family\":\"nope\"")), FormatError);
  CHECK_THROWS_AS(parse_model(edit("\"D\":2", "\"D\":3")), FormatError);
  CHECK_THROWS_AS(parse_model(edit("\"precision_bits\":12", "\"precision_bits\":40")), FormatError);
  CHECK_THROWS_AS(parse_model(edit("\"L\":1", "\"L\":2")), FormatError);
  CHECK_THROWS_AS(load_any_model(temp_file("missing.json")), FormatError);
}
