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

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include "bitswap/kernels.hpp"

using namespace bitswap;

namespace {

bool bit_equal(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("portable exp tracks libm") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-700.0, 700.0);
  for (int i = 0; i < 10000; ++i) {
    const double t = u(rng);
    const double want = std::exp(t);
    CHECK(std::abs(kernels::exp(t) - want) <= 4e-16 * want);
  }
  CHECK(kernels::exp(0.0) == 1.0);
  CHECK(kernels::exp(-1000.0) == kernels::exp(-708.0));
  CHECK(std::isfinite(kernels::exp(1e6)));
}

TEST_CASE("scalar logistic cdf and masses") {
  const std::vector<double> x{-1e300, -3.0, 0.0, std::log(3.0), 50.0};
  std::vector<double> out(x.size());
  kernels::logistic_cdf(kernels::Backend::Scalar, x, 0.0, 1.0, out);
  CHECK(out[0] == doctest::Approx(0.0));
  CHECK(out[2] == 0.5);
  CHECK(out[3] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(out[4] == doctest::Approx(1.0));

  const std::vector<double> edges{-1.0, 0.0, 2.0};
  std::vector<double> m(4);
  kernels::logistic_bin_masses(kernels::Backend::Scalar, edges, 0.5, 2.0, m);
  auto cdf = [](double v) { return 1.0 / (1.0 + std::exp(-(v - 0.5) / 2.0)); };
  CHECK(m[0] == doctest::Approx(cdf(-1.0)).epsilon(1e-14));
  CHECK(m[1] == doctest::Approx(cdf(0.0) - cdf(-1.0)).epsilon(1e-14));
  CHECK(m[2] == doctest::Approx(cdf(2.0) - cdf(0.0)).epsilon(1e-14));
  CHECK(m[3] == doctest::Approx(1.0 - cdf(2.0)).epsilon(1e-14));
}

TEST_CASE("backends are bit-identical") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 3.0);
  for (auto backend : kernels::available_backends()) {
    CAPTURE(kernels::backend_name(backend));
    for (std::size_t len : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 63u, 1023u}) {
      std::vector<double> edges(len);
      double e = -20.0;
      for (auto& v : edges) v = (e += std::abs(n(rng)) * 0.1 + 1e-9);
      const double mu = n(rng);
      const double scale = std::exp(n(rng) * 0.5);

      std::vector<double> a(len), b(len);
      kernels::logistic_cdf(kernels::Backend::Scalar, edges, mu, scale, a);
      kernels::logistic_cdf(backend, edges, mu, scale, b);
      CHECK(bit_equal(a, b));

      std::vector<double> ma(len + 1), mb(len + 1);
      kernels::logistic_bin_masses(kernels::Backend::Scalar, edges, mu, scale, ma);
      kernels::logistic_bin_masses(backend, edges, mu, scale, mb);
      CHECK(bit_equal(ma, mb));

      std::vector<std::uint32_t> fa(len + 1), fb(len + 1);
      std::vector<double> ra(len + 1), rb(len + 1);
      kernels::scale_floor(kernels::Backend::Scalar, ma, 65536.0, fa, ra);
      kernels::scale_floor(backend, ma, 65536.0, fb, rb);
      CHECK(fa == fb);
      CHECK(bit_equal(ra, rb));
    }
  }
}

TEST_CASE("backend selection") {
  CHECK(kernels::backend_available(kernels::Backend::Scalar));
  const auto before = kernels::active_backend();
  kernels::set_backend(kernels::Backend::Scalar);
  CHECK(kernels::active_backend() == kernels::Backend::Scalar);
  kernels::set_backend(before);
  for (auto b : {kernels::Backend::Avx2, kernels::Backend::Neon})
    if (!kernels::backend_available(b)) CHECK_THROWS_AS(kernels::set_backend(b), std::invalid_argument);
}
