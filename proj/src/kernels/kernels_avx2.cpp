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

// Compiled with -mavx2 (no FMA). Only the dispatcher calls into this unit,
// and only after checking CPU support.

#include "kernel_table.hpp"

#if defined(BITSWAP_HAVE_AVX2)
#include <immintrin.h>

namespace bitswap::kernels::detail {
namespace {

inline __m256d exp_avx2(__m256d t) {
  t = _mm256_max_pd(t, _mm256_set1_pd(kExpClampLo));
  t = _mm256_min_pd(t, _mm256_set1_pd(kExpClampHi));
  const __m256d n = _mm256_floor_pd(
      _mm256_add_pd(_mm256_mul_pd(t, _mm256_set1_pd(kLog2e)), _mm256_set1_pd(0.5)));
  const __m256d r = _mm256_sub_pd(_mm256_sub_pd(t, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Hi))),
                                  _mm256_mul_pd(n, _mm256_set1_pd(kLn2Lo)));
  __m256d p = _mm256_set1_pd(kExpPoly[0]);
  for (std::size_t k = 1; k < kExpPolyLen; ++k)
    p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(kExpPoly[k]));
  const __m256d one = _mm256_set1_pd(1.0);
  p = _mm256_add_pd(_mm256_mul_pd(p, r), one);
  p = _mm256_add_pd(_mm256_mul_pd(p, r), one);
  // n is integral and |n| < 2^51: adding 2^52 + 2^51 leaves n in the low
  // mantissa bits as a two's complement integer.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  const __m256i n_int = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)),
                                         _mm256_castpd_si256(magic));
  const __m256i biased = _mm256_slli_epi64(_mm256_add_epi64(n_int, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(biased));
}

inline __m256d cdf_avx2(__m256d x, __m256d mu, __m256d scale) {
  const __m256d z = _mm256_div_pd(_mm256_sub_pd(x, mu), scale);
  const __m256d e = exp_avx2(_mm256_sub_pd(_mm256_setzero_pd(), z));
  const __m256d one = _mm256_set1_pd(1.0);
  return _mm256_div_pd(one, _mm256_add_pd(one, e));
}

void logistic_cdf(const double* x, std::size_t n, double mu, double scale, double* out) {
  const __m256d vmu = _mm256_set1_pd(mu);
  const __m256d vscale = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, cdf_avx2(_mm256_loadu_pd(x + i), vmu, vscale));
  if (i < n) {
    alignas(32) double in[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double res[4];
    for (std::size_t k = 0; i + k < n; ++k) in[k] = x[i + k];
    _mm256_store_pd(res, cdf_avx2(_mm256_load_pd(in), vmu, vscale));
    for (std::size_t k = 0; i + k < n; ++k) out[i + k] = res[k];
  }
}

void logistic_bin_masses(const double* edges, std::size_t n_edges, double mu,
                         double scale, double* masses) {
  logistic_cdf(edges, n_edges, mu, scale, masses);
  masses[n_edges] = 1.0 - masses[n_edges - 1];
  // In-place backward difference; each block reads only unwritten slots.
  std::size_t k = n_edges - 1;
  while (k >= 4) {
    const std::size_t lo = k - 3;
    const __m256d hi = _mm256_loadu_pd(masses + lo);
    const __m256d prev = _mm256_loadu_pd(masses + lo - 1);
    _mm256_storeu_pd(masses + lo, _mm256_sub_pd(hi, prev));
    k -= 4;
  }
  for (; k >= 1; --k) masses[k] = masses[k] - masses[k - 1];
}

void scale_floor(const double* probs, std::size_t n, double total,
                 std::uint32_t* floors, double* rems) {
  const __m256d vtotal = _mm256_set1_pd(total);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ideal = _mm256_mul_pd(_mm256_loadu_pd(probs + i), vtotal);
    const __m256d f = _mm256_floor_pd(ideal);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(floors + i), _mm256_cvttpd_epi32(f));
    _mm256_storeu_pd(rems + i, _mm256_sub_pd(ideal, f));
  }
  for (; i < n; ++i) {
    const double ideal = probs[i] * total;
    const __m128d f = _mm_floor_sd(_mm_setzero_pd(), _mm_set_sd(ideal));
    floors[i] = static_cast<std::uint32_t>(_mm_cvttsd_si32(f));
    rems[i] = ideal - _mm_cvtsd_f64(f);
  }
}

const KernelTable kTable{&logistic_cdf, &logistic_bin_masses, &scale_floor};

}  // namespace

const KernelTable* const kAvx2Kernels = &kTable;

}  // namespace bitswap::kernels::detail

#else

namespace bitswap::kernels::detail {
const KernelTable* const kAvx2Kernels = nullptr;
}

#endif
