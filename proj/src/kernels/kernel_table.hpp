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

#pragma once

// Internal ABI between the dispatcher and the per-ISA translation units.
// Kept free of standard-library templates so the AVX2/NEON objects never
// emit inline functions that the linker could pick for baseline code.

#include <cstddef>
#include <cstdint>

namespace bitswap::kernels::detail {

struct KernelTable {
  void (*logistic_cdf)(const double* x, std::size_t n, double mu, double scale,
                       double* out);
  void (*logistic_bin_masses)(const double* edges, std::size_t n_edges,
                              double mu, double scale, double* masses);
  void (*scale_floor)(const double* probs, std::size_t n, double total,
                      std::uint32_t* floors, double* rems);
};

extern const KernelTable kScalarKernels;
// Null when the ISA is not compiled in.
extern const KernelTable* const kAvx2Kernels;
extern const KernelTable* const kNeonKernels;

// exp(t) = p(r) * 2^n with t = n ln2 + r, |r| <= ln2 / 2.
inline constexpr double kExpClampLo = -708.0;
inline constexpr double kExpClampHi = 708.0;
inline constexpr double kLog2e = 1.4426950408889634;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
// Taylor coefficients 1/k!, k = 12 down to 2.
inline constexpr double kExpPoly[] = {
    2.08767569878680989792e-09, 2.50521083854417187751e-08,
    2.75573192239858906526e-07, 2.75573192239858906526e-06,
    2.48015873015873015873e-05, 1.98412698412698412698e-04,
    1.38888888888888888889e-03, 8.33333333333333333333e-03,
    4.16666666666666666667e-02, 1.66666666666666666667e-01,
    5.00000000000000000000e-01,
};
inline constexpr std::size_t kExpPolyLen = sizeof(kExpPoly) / sizeof(kExpPoly[0]);

}  // namespace bitswap::kernels::detail
