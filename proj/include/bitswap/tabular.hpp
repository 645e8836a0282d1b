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

// Explicit conditional tables over small finite alphabets.
//
// A conditional over one child dimension is stored as a product of factors:
//   p(c | u) ∝ base[c] * prod_j pair_j[u_j][c]
// where u is the vector of parent values. With a single parent input this is
// an ordinary conditional probability table (base all ones, pair rows the CPT
// rows); with several inputs it is a product of experts, which is exactly the
// form of the posterior of a latent given conditionally independent children.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bitswap/rans.hpp"

namespace bitswap {

struct FactorTable {
  std::vector<double> base;                // child alphabet
  std::vector<std::vector<double>> pairs;  // per parent input: parent alphabet x child alphabet

  bool operator==(const FactorTable&) const = default;
};

struct TabularConditional {
  std::size_t child_alphabet = 0;
  std::vector<std::size_t> parent_alphabets;  // one per parent input dimension
  std::vector<FactorTable> dims;              // one per child dimension

  /// Shapes match and all factor entries are finite and strictly positive.
  void validate() const;

  /// Normalized row for child dimension `dim` given the parent values.
  std::vector<double> row(std::size_t dim, std::span<const int> parent) const;

  /// Number of distinct parent configurations (saturates at SIZE_MAX).
  std::size_t parent_configurations() const;

  bool operator==(const TabularConditional&) const = default;
};

/// A conditional plus its quantized tables, precomputed for every parent
/// configuration when there are at most kMaxCachedConfigurations of them.
class QuantizedConditional {
 public:
  static constexpr std::size_t kMaxCachedConfigurations = 4096;

  QuantizedConditional() = default;
  QuantizedConditional(TabularConditional conditional, int precision_bits);

  const TabularConditional& conditional() const { return conditional_; }
  std::size_t dims() const { return conditional_.dims.size(); }

  /// One table per child dimension.
  std::vector<FrequencyTable> tables(std::span<const int> parent) const;

 private:
  std::vector<FrequencyTable> build(std::span<const int> parent) const;
  std::size_t config_index(std::span<const int> parent) const;

  TabularConditional conditional_;
  int precision_bits_ = kDefaultPrecisionBits;
  std::vector<std::vector<FrequencyTable>> cache_;
};

}  // namespace bitswap
