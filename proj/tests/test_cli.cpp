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

// End-to-end tests of the bitswap executable.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "bitswap/bench.hpp"
#include "bitswap/container.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = BITSWAP_FIXTURE_DIR;
const std::string kCli = BITSWAP_CLI;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("bitswap_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = kCli + " " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::uint8_t> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string text(const fs::path& p) {
  const auto b = slurp(p);
  return {b.begin(), b.end()};
}

void write_random(const fs::path& p, std::size_t n, int alphabet, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::ofstream out(p, std::ios::binary);
  for (std::size_t i = 0; i < n; ++i) out.put(static_cast<char>(rng() % static_cast<unsigned>(alphabet)));
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("compress / decompress round trip") {
  TempDir tmp;
  const auto log = tmp / "log";
  write_random(tmp / "in16", 800, 16, 1);
  write_random(tmp / "in256", 400, 256, 2);
  struct Case {
    const char* model;
    const char* input;
  };
  for (const Case c : {Case{"tab_L1", "in16"}, Case{"tab_L4", "in16"}, Case{"tab_mismatch", "in16"},
                       Case{"tree", "in16"}, Case{"aff_L2", "in256"}}) {
    for (const char* scheme : {"bbans", "bitswap"}) {
      CAPTURE(c.model);
      CAPTURE(scheme);
      const auto model = kFixtures / (std::string(c.model) + ".json");
      REQUIRE(run("compress --model " + q(model) + " --scheme " + scheme + " --input " +
                      q(tmp / c.input) + " --output " + q(tmp / "c.bsw") + " --seed 9",
                  log) == 0);
      CHECK(text(log).find("net_bits_per_dim") != std::string::npos);
      REQUIRE(run("decompress --model " + q(model) + " --input " + q(tmp / "c.bsw") +
                      " --output " + q(tmp / "out"),
                  log) == 0);
      CHECK(slurp(tmp / "out") == slurp(tmp / c.input));
    }
  }
}

TEST_CASE("L = 1: both schemes write the same payload") {
  TempDir tmp;
  const auto log = tmp / "log";
  write_random(tmp / "in", 800, 16, 3);
  const auto model = kFixtures / "tab_L1.json";
  for (const char* scheme : {"bbans", "bitswap"})
    REQUIRE(run("compress --model " + q(model) + " --scheme " + scheme + " --input " +
                    q(tmp / "in") + " --output " + q(tmp / scheme),
                log) == 0);
  const auto a = bitswap::read_container(slurp(tmp / "bbans"));
  const auto b = bitswap::read_container(slurp(tmp / "bitswap"));
  CHECK(a.payload == b.payload);
  CHECK(a.header.scheme != b.header.scheme);
}

TEST_CASE("decompression failures write nothing") {
  TempDir tmp;
  const auto log = tmp / "log";
  write_random(tmp / "in", 800, 16, 4);
  REQUIRE(run("compress --model " + q(kFixtures / "tab_L4.json") + " --input " + q(tmp / "in") +
                  " --output " + q(tmp / "c.bsw"),
              log) == 0);

  CHECK(run("decompress --model " + q(kFixtures / "tab_L8.json") + " --input " + q(tmp / "c.bsw") +
                " --output " + q(tmp / "out"),
            log) != 0);
  CHECK(text(log).find("hash mismatch") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp / "out"));

  auto bytes = slurp(tmp / "c.bsw");
  bytes.resize(bytes.size() - 3);
  {
    std::ofstream out(tmp / "short.bsw", std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK(run("decompress --model " + q(kFixtures / "tab_L4.json") + " --input " +
                q(tmp / "short.bsw") + " --output " + q(tmp / "out"),
            log) != 0);
  CHECK_FALSE(fs::exists(tmp / "out"));

  // A payload word flipped near the top of the stack.
  bytes = slurp(tmp / "c.bsw");
  bytes[bytes.size() - 5] ^= 0x5a;
  {
    std::ofstream out(tmp / "bad.bsw", std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK(run("decompress --model " + q(kFixtures / "tab_L4.json") + " --input " +
                q(tmp / "bad.bsw") + " --output " + q(tmp / "out"),
            log) != 0);
  CHECK_FALSE(fs::exists(tmp / "out"));
}

TEST_CASE("malformed input and exhausted initial bits") {
  TempDir tmp;
  const auto log = tmp / "log";
  write_random(tmp / "odd", 801, 16, 5);
  CHECK(run("compress --model " + q(kFixtures / "tab_L2.json") + " --input " + q(tmp / "odd") +
                " --output " + q(tmp / "c.bsw"),
            log) == 1);
  write_random(tmp / "wide", 800, 256, 5);
  CHECK(run("compress --model " + q(kFixtures / "tab_L2.json") + " --input " + q(tmp / "wide") +
                " --output " + q(tmp / "c.bsw"),
            log) == 1);
  write_random(tmp / "in", 800, 16, 5);
  CHECK(run("compress --model " + q(kFixtures / "aff_L8.json") + " --scheme bbans --input " +
                q(tmp / "in") + " --output " + q(tmp / "c.bsw") + " --seed-words 0",
            log) == 2);
}

TEST_CASE("gen-model is deterministic and inspect lists the layers") {
  TempDir tmp;
  const auto log = tmp / "log";
  for (const char* out : {"a.json", "b.json"})
    REQUIRE(run("gen-model --family tabular --depth 4 --seed 3 --out " + q(tmp / out), log) == 0);
  CHECK(slurp(tmp / "a.json") == slurp(tmp / "b.json"));
  // The shipped fixture is what the regeneration script writes.
  REQUIRE(run("gen-model --family tabular --depth 4 --dims 1 --data-dim 8 --x-alphabet 16 "
              "--latent-alphabet 16 --precision 16 --inference exact --seed 1 --out " +
                  q(tmp / "tab_L4.json"),
              log) == 0);
  CHECK(slurp(tmp / "tab_L4.json") == slurp(kFixtures / "tab_L4.json"));

  REQUIRE(run("inspect --model " + q(kFixtures / "tab_L4.json"), log) == 0);
  const auto out = text(log);
  CHECK(out.find("latent_layers 4") != std::string::npos);
  for (const char* layer : {"\nz1 ", "\nz2 ", "\nz3 ", "\nz4 "}) CHECK(out.find(layer) != std::string::npos);
  CHECK(out.find("\nz5 ") == std::string::npos);
  REQUIRE(run("inspect --model " + q(kFixtures / "aff_L2.json"), log) == 0);
  CHECK(text(log).find("grid z2: 1024 bins") != std::string::npos);
}

TEST_CASE("experiment writes CSV per schema") {
  TempDir tmp;
  const auto log = tmp / "log";
  {
    std::ofstream cfg(tmp / "cma.json");
    cfg << R"({"kind":"cma","model":")" << (kFixtures / "tab_L2.json").string()
        << R"(","schemes":["bbans","bitswap"],"n_datapoints":10,"n_trials":3,"output":"cma.csv"})";
  }
  REQUIRE(run("experiment --config " + q(tmp / "cma.json"), log) == 0);
  for (const char* name : {"cma-bbans.csv", "cma-bitswap.csv"}) {
    const auto rows = bitswap::parse_cma_csv(text(tmp / name));
    CHECK(rows.size() == 30);
  }
  {
    std::ofstream cfg(tmp / "oracle.json");
    cfg << R"({"kind":"oracle","model":")" << (kFixtures / "tab_L2.json").string()
        << R"(","schemes":["bitswap"],"n_datapoints":50,"output":"oracle.csv"})";
  }
  CHECK(run("experiment --config " + q(tmp / "oracle.json"), log) == 0);
  CHECK(text(tmp / "oracle.csv").rfind("scheme,n_datapoints,", 0) == 0);
}
