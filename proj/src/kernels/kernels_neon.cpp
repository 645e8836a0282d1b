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

#include "kernel_table.hpp"

#if defined(BITSWAP_HAVE_NEON)
#include <arm_neon.h>

namespace bitswap::kernels::detail {
namespace {

inline float64x2_t exp_neon(float64x2_t t) {
  t = vmaxq_f64(t, vdupq_n_f64(kExpClampLo));
  t = vminq_f64(t, vdupq_n_f64(kExpClampHi));
  const float64x2_t n = vrndmq_f64(vaddq_f64(vmulq_f64(t, vdupq_n_f64(kLog2e)), vdupq_n_f64(0.5)));
  const float64x2_t r = vsubq_f64(vsubq_f64(t, vmulq_f64(n, vdupq_n_f64(kLn2Hi))),
                                  vmulq_f64(n, vdupq_n_f64(kLn2Lo)));
  float64x2_t p = vdupq_n_f64(kExpPoly[0]);
  for (std::size_t k = 1; k < kExpPolyLen; ++k)
    p = vaddq_f64(vmulq_f64(p, r), vdupq_n_f64(kExpPoly[k]));
  const float64x2_t one = vdupq_n_f64(1.0);
  p = vaddq_f64(vmulq_f64(p, r), one);
  p = vaddq_f64(vmulq_f64(p, r), one);
  const int64x2_t biased = vshlq_n_s64(vaddq_s64(vcvtq_s64_f64(n), vdupq_n_s64(1023)), 52);
  return vmulq_f64(p, vreinterpretq_f64_s64(biased));
}

inline float64x2_t cdf_neon(float64x2_t x, float64x2_t mu, float64x2_t scale) {
  const float64x2_t z = vdivq_f64(vsubq_f64(x, mu), scale);
  const float64x2_t one = vdupq_n_f64(1.0);
  return vdivq_f64(one, vaddq_f64(one, exp_neon(vnegq_f64(z))));
}

void logistic_cdf(const double* x, std::size_t n, double mu, double scale, double* out) {
  const float64x2_t vmu = vdupq_n_f64(mu);
  const float64x2_t vscale = vdupq_n_f64(scale);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, cdf_neon(vld1q_f64(x + i), vmu, vscale));
  if (i < n) {
    const double in[2] = {x[i], 0.0};
    double res[2];
    vst1q_f64(res, cdf_neon(vld1q_f64(in), vmu, vscale));
    out[i] = res[0];
  }
}

void logistic_bin_masses(const double* edges, std::size_t n_edges, double mu,
                         double scale, double* masses) {
  logistic_cdf(edges, n_edges, mu, scale, masses);
  masses[n_edges] = 1.0 - masses[n_edges - 1];
  std::size_t k = n_edges - 1;
  while (k >= 2) {
    const std::size_t lo = k - 1;
    vst1q_f64(masses + lo, vsubq_f64(vld1q_f64(masses + lo), vld1q_f64(masses + lo - 1)));
    k -= 2;
  }
  for (; k >= 1; --k) masses[k] = masses[k] - masses[k - 1];
}

void scale_floor(const double* probs, std::size_t n, double total,
                 std::uint32_t* floors, double* rems) {
  const float64x2_t vtotal = vdupq_n_f64(total);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t ideal = vmulq_f64(vld1q_f64(probs + i), vtotal);
    const float64x2_t f = vrndmq_f64(ideal);
    const int64x2_t fi = vcvtq_s64_f64(f);
    floors[i] = static_cast<std::uint32_t>(vgetq_lane_s64(fi, 0));
    floors[i + 1] = static_cast<std::uint32_t>(vgetq_lane_s64(fi, 1));
    vst1q_f64(rems + i, vsubq_f64(ideal, f));
  }
  for (; i < n; ++i) {
    const double ideal = probs[i] * total;
    const double f = vrndmd_f64(ideal);
    floors[i] = static_cast<std::uint32_t>(static_cast<std::int64_t>(f));
    rems[i] = ideal - f;
  }
}

const KernelTable kTable{&logistic_cdf, &logistic_bin_masses, &scale_floor};

}  // namespace

const KernelTable* const kNeonKernels = &kTable;

}  // namespace bitswap::kernels::detail

#else

namespace bitswap::kernels::detail {
const KernelTable* const kNeonKernels = nullptr;
}

#endif
