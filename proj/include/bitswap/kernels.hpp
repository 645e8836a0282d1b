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

// Data-parallel inner loops of the discretization path.
//
// Every backend produces bit-identical output: the encoder and the decoder
// must derive the same frequency tables from the same model, possibly on
// different machines. The exponential is therefore computed by a fixed
// polynomial rather than the platform libm, and all backends perform the
// same IEEE operations in the same order (no fused multiply-add).

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace bitswap::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend backend);
bool backend_available(Backend backend);
std::vector<Backend> available_backends();

/// Backend used by the dispatching entry points below. Chosen on first use
/// from the running CPU (widest available).
Backend active_backend();

/// Overrides the runtime choice. Throws std::invalid_argument if the backend
/// is not supported on this CPU or build.
void set_backend(Backend backend);

/// Portable exp(t). Inputs are clamped to [-708, 708].
double exp(double t);

/// out[i] = 1 / (1 + exp(-(x[i] - mu) / scale))
void logistic_cdf(std::span<const double> x, double mu, double scale,
                  std::span<double> out);

/// Mass of each of the edges.size() + 1 bins delimited by `edges` under the
/// logistic (mu, scale). The outer bins extend to -inf and +inf.
void logistic_bin_masses(std::span<const double> edges, double mu, double scale,
                         std::span<double> masses);

/// floors[i] = floor(probs[i] * total), rems[i] = probs[i] * total - floors[i].
/// probs[i] * total must be below 2^31.
void scale_floor(std::span<const double> probs, double total,
                 std::span<std::uint32_t> floors, std::span<double> rems);

// Explicit per-backend entry points, used by the equivalence tests.
void logistic_bin_masses(Backend backend, std::span<const double> edges,
                         double mu, double scale, std::span<double> masses);
void logistic_cdf(Backend backend, std::span<const double> x, double mu,
                  double scale, std::span<double> out);
void scale_floor(Backend backend, std::span<const double> probs, double total,
                 std::span<std::uint32_t> floors, std::span<double> rems);

}  // namespace bitswap::kernels
