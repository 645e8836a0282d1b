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

#include <bit>
#include <cmath>
#include <cstdint>

#include "kernel_table.hpp"

namespace bitswap::kernels::detail {
namespace {

double exp_scalar(double t) {
  t = t < kExpClampLo ? kExpClampLo : t;
  t = t > kExpClampHi ? kExpClampHi : t;
  const double n = std::floor(t * kLog2e + 0.5);
  const double r = (t - n * kLn2Hi) - n * kLn2Lo;
  double p = kExpPoly[0];
  for (std::size_t k = 1; k < kExpPolyLen; ++k) p = p * r + kExpPoly[k];
  p = p * r + 1.0;
  p = p * r + 1.0;
  const auto biased = static_cast<std::uint64_t>(static_cast<std::int64_t>(n) + 1023);
  return p * std::bit_cast<double>(biased << 52);
}

double cdf_scalar(double x, double mu, double scale) {
  return 1.0 / (1.0 + exp_scalar(-((x - mu) / scale)));
}

void logistic_cdf(const double* x, std::size_t n, double mu, double scale, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = cdf_scalar(x[i], mu, scale);
}

void logistic_bin_masses(const double* edges, std::size_t n_edges, double mu,
                         double scale, double* masses) {
  logistic_cdf(edges, n_edges, mu, scale, masses);
  masses[n_edges] = 1.0 - masses[n_edges - 1];
  for (std::size_t k = n_edges - 1; k >= 1; --k) masses[k] = masses[k] - masses[k - 1];
}

void scale_floor(const double* probs, std::size_t n, double total,
                 std::uint32_t* floors, double* rems) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ideal = probs[i] * total;
    const double f = std::floor(ideal);
    floors[i] = static_cast<std::uint32_t>(static_cast<std::int32_t>(f));
    rems[i] = ideal - f;
  }
}

}  // namespace

double exp_reference(double t) { return exp_scalar(t); }

const KernelTable kScalarKernels{&logistic_cdf, &logistic_bin_masses, &scale_floor};

}  // namespace bitswap::kernels::detail
