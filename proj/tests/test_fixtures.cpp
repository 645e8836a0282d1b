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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bitswap/bench.hpp"
#include "bitswap/model_io.hpp"
#include "oracle.hpp"

using namespace bitswap;

namespace {

const std::filesystem::path kFixtures = BITSWAP_FIXTURE_DIR;

const char* const kAll[] = {"tab_L1", "tab_L2", "tab_L4", "tab_L8", "tab_mismatch",
                            "aff_L1", "aff_L2", "aff_L4", "aff_L8", "tree", "tab_tiny"};

std::filesystem::path fixture(const std::string& name) { return kFixtures / (name + ".json"); }

}  // namespace

TEST_CASE("fixtures reload to identical models") {
  for (const char* name : kAll) {
    CAPTURE(name);
    std::ifstream in(fixture(name));
    std::stringstream ss;
    ss << in.rdbuf();
    auto text = ss.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    const auto model = parse_model(text);
    CHECK(serialize_model(model) == text);
    CHECK(parse_model(serialize_model(model)) == model);
  }
}

TEST_CASE("fixture family shapes") {
  for (int l : {1, 2, 4, 8}) {
    const auto tab = load_model(fixture("tab_L" + std::to_string(l)));
    CHECK(tab.depth() == l);
    CHECK(tab.family() == Family::Tabular);
    CHECK(tab.data_dim() == 8);
    const auto aff = load_model(fixture("aff_L" + std::to_string(l)));
    CHECK(aff.depth() == l);
    CHECK(aff.family() == Family::AffineLogistic);
    CHECK(aff.grids().size() == static_cast<std::size_t>(l));
    for (const auto& g : aff.grids()) CHECK(g.size() == 1024);
  }
  const auto tree = std::get<TabularTreeModel>(load_any_model(fixture("tree")));
  CHECK(tree.variables().size() == 5);
}

TEST_CASE("mismatched q: net bits are unbiased for -ELBO") {
  // Any single 100-datapoint run is noisy (sd ~0.005 bits/dim); the mean over
  // many runs must sit on -ELBO, and above -log p(x) by the KL gap.
  const auto m = load_model(fixture("tab_mismatch"));
  for (auto scheme : {SchemeId::BBANS, SchemeId::BITSWAP}) {
    double sum = 0.0, sum_sq = 0.0, kl = 0.0;
    const int runs = 30;
    for (int s = 0; s < runs; ++s) {
      const auto r = oracle_check(m, scheme, 100, 16, static_cast<std::uint64_t>(s) + 100);
      const double gap = r.net_bits_per_dim - r.neg_elbo_per_dim;
      sum += gap;
      sum_sq += gap * gap;
      kl += r.kl_gap_per_dim;
    }
    const double mean = sum / runs;
    const double sd = std::sqrt(sum_sq / runs - mean * mean);
    CAPTURE(scheme_name(scheme));
    CHECK(std::abs(mean) < 4.0 * sd / std::sqrt(double(runs)) + 1e-3);
    CHECK(kl / runs > 0.001);
  }
}

TEST_CASE("chained Bit-Swap on affine fixtures keeps the BB-ANS net rate") {
  // Guards against the read-after-write absorbing state (tail decodes
  // feeding F = 1 encodes), which shows up as a net rate far above BB-ANS.
  const auto m = load_model(fixture("aff_L4"));
  const auto a = run_cma_experiment(m, SchemeId::BBANS, 100, 4, 64, 7);
  const auto b = run_cma_experiment(m, SchemeId::BITSWAP, 100, 4, 64, 7);
  CHECK(std::abs(a.mean_net_bits_per_dim - b.mean_net_bits_per_dim) < 0.1);
}

TEST_CASE("two-symbol L = 2 fixture against enumeration") {
  const auto m = load_model(fixture("tab_tiny"));
  REQUIRE(m.alphabet(0) == 2);
  for (int a : {0, 1})
    for (int b : {0, 1}) {
      const std::vector<int> x{a, b};
      const auto want = oracle::enumerate(m, x);
      CHECK(elbo_bits(m, x).bits == doctest::Approx(want.neg_elbo_bits).epsilon(1e-12));
      CHECK(exact_log_marginal(m, x) == doctest::Approx(want.neg_log_px_bits).epsilon(1e-12));
      CHECK(std::abs(want.neg_log_px_bits + want.kl_bits - want.neg_elbo_bits) <= 1e-6);
    }
}
