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

// Model files (JSON) and deterministic random model generation.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bitswap/latent_model.hpp"
#include "bitswap/topology.hpp"

namespace bitswap {

inline constexpr int kModelFormatVersion = 1;

using AnyModel = std::variant<ChainModel, TabularTreeModel>;

/// Canonical compact serialization. Reals are written in their shortest
/// round-trip decimal form, so parse(serialize(m)) == m bit-exactly.
std::string serialize_model(const AnyModel& model);
/// Throws FormatError on malformed documents, unknown families or versions,
/// and on any model invariant violation.
AnyModel parse_model(std::string_view text);

AnyModel load_any_model(const std::filesystem::path& path);
ChainModel load_model(const std::filesystem::path& path);
void save_model(const AnyModel& model, const std::filesystem::path& path);

/// SHA-256 of serialize_model(model).
std::array<std::uint8_t, 32> model_hash(const AnyModel& model);

enum class ModelKind { Tabular, AffineLogistic, TabularTree };

std::string model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

enum class InferenceMode {
  Exact,      // q is the true posterior (tabular chains with one-dimensional latents)
  Perturbed,  // exact posterior with multiplicative noise on every factor
  Random,     // independent random tables
};

std::string inference_mode_name(InferenceMode mode);
InferenceMode parse_inference_mode(const std::string& name);

struct GenSpec {
  ModelKind kind = ModelKind::Tabular;
  int depth = 2;
  std::size_t data_dim = 8;
  /// One entry per latent layer, or a single entry applied to every layer.
  std::vector<std::size_t> layer_dims{1};
  std::size_t x_alphabet = 16;       // tabular
  std::size_t latent_alphabet = 16;  // tabular
  std::size_t bins = kDefaultBins;   // affine-logistic
  int precision_bits = 0;            // 0: 12 for tabular, 20 for affine-logistic
  InferenceMode inference = InferenceMode::Exact;
  /// Tabular chains: one transition table shared by every latent layer, with
  /// the prior set to its stationary distribution, so models of different
  /// depth from the same seed share all per-layer conditionals.
  bool tied = true;
  double perturbation = 0.3;
  std::size_t grid_samples = 10000;
  std::uint64_t seed = 0;
};

/// Draws a model from `spec`; identical specs give identical models.
AnyModel gen_model(const GenSpec& spec);

}  // namespace bitswap
