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

// Depth-L hierarchical latent-variable models whose generative and inference
// processes are Markov chains:
//
//   generative  z_L -> z_{L-1} -> ... -> z_1 -> x
//   inference   x -> z_1 -> ... -> z_L
//
// Every conditional is fully factorized over the dimensions of its child
// layer and is exposed as one FrequencyTable per dimension. Layer values are
// symbol indices (tabular) or bin indices into the layer's grid
// (affine-logistic).

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "bitswap/discretization.hpp"
#include "bitswap/rans.hpp"
#include "bitswap/tabular.hpp"

namespace bitswap {

enum class Family { Tabular, AffineLogistic };

using LayerTables = std::vector<FrequencyTable>;
using LayerValues = std::vector<int>;

/// Per-output-dimension affine maps to logistic parameters:
///   mu = w_mu * input + b_mu,  scale = exp(clamp(w_ls * input + b_ls))
struct AffineMap {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> w_mu;         // out x in, row-major
  std::vector<double> b_mu;         // out
  std::vector<double> w_log_scale;  // out x in
  std::vector<double> b_log_scale;  // out

  static constexpr double kMinLogScale = -12.0;
  static constexpr double kMaxLogScale = 12.0;

  void validate() const;
  LogisticParams apply(std::size_t row, std::span<const double> input) const;

  bool operator==(const AffineMap&) const = default;
};

struct TabularParams {
  std::size_t x_alphabet = 0;
  std::vector<std::size_t> latent_alphabets;   // per layer 1..L
  TabularConditional observation;              // p(x | z_1)
  std::vector<TabularConditional> generative;  // [i - 1] = p(z_i | z_{i+1}), i = 1..L-1
  TabularConditional prior;                    // p(z_L)
  std::vector<TabularConditional> inference;   // [0] = q(z_1 | x), [i] = q(z_{i+1} | z_i)

  bool operator==(const TabularParams&) const = default;
};

struct AffineParams {
  AffineMap observation;               // p(x | z_1), x in pixel units
  std::vector<AffineMap> generative;   // [i - 1] = p(z_i | z_{i+1})
  std::vector<AffineMap> inference;    // [0] = q(z_1 | x), [i] = q(z_{i+1} | z_i)

  bool operator==(const AffineParams&) const = default;
};

class ChainModel {
 public:
  /// Observation alphabet of affine-logistic models (8-bit symbols).
  static constexpr std::size_t kPixelLevels = 256;

  static ChainModel tabular(std::size_t data_dim, std::vector<std::size_t> layer_dims,
                            int precision_bits, TabularParams params,
                            std::uint64_t sampling_seed = 0);
  /// `grids[i - 1]` discretizes layer i; the top layer's grid must be the
  /// equal-mass grid of the standard logistic prior.
  static ChainModel affine_logistic(std::size_t data_dim, std::vector<std::size_t> layer_dims,
                                    int precision_bits, AffineParams params,
                                    std::vector<BinGrid> grids, std::uint64_t sampling_seed);

  Family family() const { return family_; }
  int depth() const { return static_cast<int>(layer_dims_.size()); }
  std::size_t data_dim() const { return data_dim_; }
  /// Dimensionality of layer i; layer 0 is x.
  std::size_t layer_dim(int layer) const;
  const std::vector<std::size_t>& layer_dims() const { return layer_dims_; }
  /// Alphabet (symbols or bins) of each dimension of layer i; layer 0 is x.
  std::size_t alphabet(int layer) const;
  int precision_bits() const { return precision_bits_; }
  std::uint64_t sampling_seed() const { return sampling_seed_; }

  const std::vector<BinGrid>& grids() const { return grids_; }
  const TabularParams& tabular_params() const;
  const AffineParams& affine_params() const;

  /// p(z_L), one table per dimension of z_L.
  LayerTables prior_tables() const;
  /// p(z_i | z_{i+1}) for i in [0, L); i = 0 is p(x | z_1).
  LayerTables generative_tables(int layer, std::span<const int> parent) const;
  /// q(z_i | z_{i-1}) for i in [1, L]; i = 1 is q(z_1 | x).
  LayerTables inference_tables(int layer, std::span<const int> child) const;

  bool operator==(const ChainModel& other) const;

 private:
  ChainModel() = default;
  void check_layer_values(int layer, std::span<const int> values) const;
  std::vector<double> affine_input(int layer, std::span<const int> values) const;
  LayerTables affine_tables(const AffineMap& map, std::span<const double> input,
                            const BinGrid& grid) const;

  Family family_ = Family::Tabular;
  std::size_t data_dim_ = 0;
  std::vector<std::size_t> layer_dims_;
  int precision_bits_ = kDefaultPrecisionBits;
  std::uint64_t sampling_seed_ = 0;
  std::vector<BinGrid> grids_;
  std::variant<TabularParams, AffineParams> params_;

  // Tabular only.
  QuantizedConditional observation_;
  std::vector<QuantizedConditional> generative_;
  QuantizedConditional prior_;
  std::vector<QuantizedConditional> inference_;
  // Affine only.
  std::vector<FrequencyTable> prior_cache_;
};

struct ChainSample {
  LayerValues x;
  std::vector<LayerValues> z;  // z[i - 1] is layer i
};

/// Draws one symbol from `table` using the top bits of a 64-bit draw.
std::size_t sample_symbol(const FrequencyTable& table, std::uint64_t draw);

/// z_L from the prior, then each child conditional down to x.
ChainSample sample_ancestral(const ChainModel& model, std::uint64_t seed);

struct ElboEstimate {
  double bits = 0.0;       // -ELBO in bits
  double std_error = 0.0;  // zero when exact
  bool exact = true;
};

/// Configuration budgets for exact ELBO evaluation: per layer, and per pair
/// of adjacent layers.
inline constexpr std::size_t kExactLayerBudget = std::size_t{1} << 16;
inline constexpr std::size_t kExactElboBudget = std::size_t{1} << 22;
inline constexpr std::size_t kMonteCarloSamples = 2048;

/// Negative ELBO of x in bits under the quantized tables. Exact by dynamic
/// programming over the chain when every layer has at most kExactLayerBudget
/// configurations and every adjacent pair at most kExactElboBudget; Monte
/// Carlo otherwise.
ElboEstimate elbo_bits(const ChainModel& model, std::span<const int> x);

/// -log2 p(x) under the quantized generative tables (tabular only).
double exact_log_marginal(const ChainModel& model, std::span<const int> x);

/// (-ELBO) - (-log2 p(x)) >= 0 (tabular only).
double kl_gap_bits(const ChainModel& model, std::span<const int> x);

struct LayerEntropy {
  double generative_bits = 0.0;  // p(z_i | z_{i+1}), or the prior at i = L
  double inference_bits = 0.0;   // q(z_i | z_{i-1}); zero for x
};

/// Entropies of each layer's quantized conditionals, summed over dimensions
/// and averaged over `n_samples` ancestral samples. Entry i is layer i.
std::vector<LayerEntropy> layer_entropies(const ChainModel& model, std::size_t n_samples,
                                          std::uint64_t seed);

/// Number of joint configurations of a layer: alphabet^dim (saturating).
std::size_t layer_configurations(const ChainModel& model, int layer);

}  // namespace bitswap
