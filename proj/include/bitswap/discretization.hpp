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

// Bin grids for continuous latents and the conversion of a logistic density
// into a frequency table over those bins.

#include <cstddef>
#include <span>
#include <vector>

#include "bitswap/rans.hpp"

namespace bitswap {

inline constexpr std::size_t kDefaultBins = std::size_t{1} << 10;

struct LogisticParams {
  double mu = 0.0;
  double scale = 1.0;

  /// Throws std::invalid_argument unless mu is finite and scale is finite and > 0.
  void validate() const;
};

/// K bins delimited by K - 1 strictly increasing interior edges. The first
/// and last bins are unbounded. Each bin carries a representative value
/// that lies inside it; downstream conditionals are evaluated at it.
class BinGrid {
 public:
  BinGrid(std::vector<double> interior_edges, std::vector<double> representatives);

  std::size_t size() const { return representatives_.size(); }
  std::span<const double> edges() const { return edges_; }
  std::span<const double> representatives() const { return representatives_; }

  bool operator==(const BinGrid& other) const = default;

 private:
  std::vector<double> edges_;
  std::vector<double> representatives_;
};

double logistic_cdf(double x, const LogisticParams& params);
double logistic_quantile(double q, const LogisticParams& params);

/// Edges at the j/K quantiles of `params`; representatives at the
/// (k + 1/2)/K quantiles (the mass midpoint of each bin).
BinGrid equal_mass_grid(const LogisticParams& params, std::size_t n_bins);

/// K equal-width bins over [lo, hi]; representatives are bin midpoints
/// (for the outer bins, the midpoint of their in-range part).
BinGrid uniform_grid(double lo, double hi, std::size_t n_bins);

/// Mass of every bin under `params`, with the outer bins absorbing the tails.
std::vector<double> bin_masses(const LogisticParams& params, const BinGrid& grid);

FrequencyTable discretize_density(const LogisticParams& params, const BinGrid& grid,
                                  int precision_bits);

/// Index of the bin containing `value`; values beyond the outer edges clamp.
std::size_t bin_index(double value, const BinGrid& grid);
double bin_representative(std::size_t index, const BinGrid& grid);

}  // namespace bitswap
