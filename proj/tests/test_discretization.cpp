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
#include <random>
#include <stdexcept>

#include "bitswap/discretization.hpp"

using namespace bitswap;

namespace {

double quantile_oracle(double q, double mu, double s) { return mu + s * std::log(q / (1.0 - q)); }

}  // namespace

TEST_CASE("logistic cdf") {
  CHECK(logistic_cdf(2.5, {2.5, 3.0}) == 0.5);
  CHECK(logistic_cdf(std::log(3.0), {0.0, 1.0}) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(logistic_cdf(-1e6, {0.0, 1.0}) < 1e-300);
  CHECK_THROWS_AS(LogisticParams({0.0, 0.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(LogisticParams({NAN, 1.0}).validate(), std::invalid_argument);
  CHECK(logistic_quantile(0.75, {0.0, 1.0}) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
}

TEST_CASE("equal-mass grid") {
  const auto g2 = equal_mass_grid({0.0, 1.0}, 2);
  REQUIRE(g2.edges().size() == 1);
  CHECK(g2.edges()[0] == 0.0);

  const auto g4 = equal_mass_grid({0.0, 1.0}, 4);
  CHECK(g4.edges()[0] == doctest::Approx(-std::log(3.0)).epsilon(1e-15));
  CHECK(g4.edges()[1] == 0.0);
  CHECK(g4.edges()[2] == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  CHECK(g4.representatives()[1] == doctest::Approx(std::log(0.375 / 0.625)).epsilon(1e-15));

  const auto shifted = equal_mass_grid({2.0, 1.0}, 4);
  for (std::size_t j = 0; j < 3; ++j) CHECK(shifted.edges()[j] == doctest::Approx(g4.edges()[j] + 2.0));

  for (std::size_t k : {2u, 16u, 1024u}) {
    const double mu = -0.7, s = 1.9;
    const auto g = equal_mass_grid({mu, s}, k);
    for (std::size_t j = 1; j < k; ++j) {
      const double q = static_cast<double>(j) / static_cast<double>(k);
      CHECK(std::abs(g.edges()[j - 1] - quantile_oracle(q, mu, s)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(equal_mass_grid({0.0, 1.0}, 3), std::invalid_argument);
  CHECK_THROWS_AS(equal_mass_grid({0.0, 1.0}, 1), std::invalid_argument);
}

TEST_CASE("uniform grid") {
  const auto g = uniform_grid(0.0, 4.0, 4);
  CHECK(std::vector<double>(g.edges().begin(), g.edges().end()) == std::vector<double>{1, 2, 3});
  CHECK(g.representatives()[1] == 1.5);
  CHECK(g.representatives()[0] == 0.5);
  CHECK(g.representatives()[3] == 3.5);
  CHECK(uniform_grid(-1.0, 1.0, 2).edges()[0] == 0.0);
  CHECK_THROWS_AS(uniform_grid(1.0, 1.0, 4), std::invalid_argument);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(BinGrid({1.0, 0.5, 2.0}, {0, 0.7, 1.5, 3}), std::invalid_argument);
  CHECK_THROWS_AS(BinGrid({0.0}, {-1.0, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(BinGrid({0.0, 1.0}, {-1.0, 0.5, 2.0}), std::invalid_argument);
}

TEST_CASE("discretize density") {
  const LogisticParams std_logistic{0.0, 1.0};
  const auto t = discretize_density(std_logistic, equal_mass_grid(std_logistic, 4), 2);
  CHECK(std::vector<std::uint32_t>(t.freqs().begin(), t.freqs().end()) ==
        std::vector<std::uint32_t>{1, 1, 1, 1});

  const BinGrid two({1.0}, {0.0, 2.0});
  const auto masses = bin_masses(std_logistic, two);
  CHECK(masses[0] == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK(masses[1] == doctest::Approx(0.2689).epsilon(1e-4));
  const auto f = discretize_density(std_logistic, two, 8);
  CHECK(f.freq(0) == 187);
  CHECK(f.freq(1) == 69);

  const auto sym = discretize_density({3.0, 0.4}, equal_mass_grid({3.0, 5.0}, 2), 12);
  CHECK(sym.freq(0) == 2048);
  CHECK(sym.freq(1) == 2048);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  const auto grid = uniform_grid(-4.0, 4.0, 1024);
  for (int i = 0; i < 200; ++i) {
    const LogisticParams p{3.0 * n(rng), std::exp(n(rng))};
    double sum = 0.0;
    for (double m : bin_masses(p, grid)) {
      CHECK(m >= 0.0);
      sum += m;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(discretize_density(p, grid, 16).size() == 1024);
  }
}

TEST_CASE("bin lookup") {
  const auto g = equal_mass_grid({0.0, 1.0}, 16);
  CHECK(bin_index(-1e9, g) == 0);
  CHECK(bin_index(1e9, g) == 15);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(bin_index(bin_representative(k, g), g) == k);
  const auto u = uniform_grid(0.0, 8.0, 8);
  CHECK(bin_representative(3, u) == 3.5);
  CHECK_THROWS_AS(bin_representative(8, u), std::out_of_range);
}
