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

#include "bitswap/discretization.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bitswap/kernels.hpp"

namespace bitswap {

void LogisticParams::validate() const {
  if (!std::isfinite(mu)) throw std::invalid_argument("logistic mu not finite");
  if (!std::isfinite(scale) || !(scale > 0.0))
    throw std::invalid_argument("logistic scale must be finite and positive");
}

BinGrid::BinGrid(std::vector<double> interior_edges, std::vector<double> representatives)
    : edges_(std::move(interior_edges)), representatives_(std::move(representatives)) {
  const std::size_t k = representatives_.size();
  if (k < 2 || !std::has_single_bit(k))
    throw std::invalid_argument("bin count must be a power of two >= 2, got " + std::to_string(k));
  if (edges_.size() + 1 != k) throw std::invalid_argument("bin grid needs K - 1 interior edges");
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (!std::isfinite(edges_[i])) throw std::invalid_argument("bin edge not finite");
    if (i > 0 && !(edges_[i] > edges_[i - 1]))
      throw std::invalid_argument("bin edges must be strictly increasing");
  }
  for (std::size_t b = 0; b < k; ++b) {
    const double r = representatives_[b];
    const bool above = b == 0 || r >= edges_[b - 1];
    const bool below = b + 1 == k || r < edges_[b];
    if (!std::isfinite(r) || !above || !below)
      throw std::invalid_argument("representative " + std::to_string(b) + " outside its bin");
  }
}

double logistic_cdf(double x, const LogisticParams& params) {
  return 1.0 / (1.0 + kernels::exp(-((x - params.mu) / params.scale)));
}

double logistic_quantile(double q, const LogisticParams& params) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must be in (0, 1)");
  return params.mu + params.scale * std::log(q / (1.0 - q));
}

BinGrid equal_mass_grid(const LogisticParams& params, std::size_t n_bins) {
  params.validate();
  if (n_bins < 2) throw std::invalid_argument("need at least two bins");
  const double k = static_cast<double>(n_bins);
  std::vector<double> edges(n_bins - 1);
  std::vector<double> reps(n_bins);
  for (std::size_t j = 1; j < n_bins; ++j)
    edges[j - 1] = logistic_quantile(static_cast<double>(j) / k, params);
  for (std::size_t b = 0; b < n_bins; ++b)
    reps[b] = logistic_quantile((static_cast<double>(b) + 0.5) / k, params);
  return BinGrid(std::move(edges), std::move(reps));
}

BinGrid uniform_grid(double lo, double hi, std::size_t n_bins) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("uniform grid needs finite lo < hi");
  if (n_bins < 2) throw std::invalid_argument("need at least two bins");
  const double width = (hi - lo) / static_cast<double>(n_bins);
  std::vector<double> edges(n_bins - 1);
  std::vector<double> reps(n_bins);
  for (std::size_t j = 1; j < n_bins; ++j) edges[j - 1] = lo + static_cast<double>(j) * width;
  for (std::size_t b = 0; b < n_bins; ++b) reps[b] = lo + (static_cast<double>(b) + 0.5) * width;
  return BinGrid(std::move(edges), std::move(reps));
}

std::vector<double> bin_masses(const LogisticParams& params, const BinGrid& grid) {
  std::vector<double> masses(grid.size());
  kernels::logistic_bin_masses(grid.edges(), params.mu, params.scale, masses);
  // Adjacent CDF values can invert by an ulp far out in the tails.
  for (double& m : masses) m = std::max(m, 0.0);
  return masses;
}

FrequencyTable discretize_density(const LogisticParams& params, const BinGrid& grid,
                                  int precision_bits) {
  params.validate();
  return quantize_pmf(bin_masses(params, grid), precision_bits);
}

std::size_t bin_index(double value, const BinGrid& grid) {
  const auto edges = grid.edges();
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), value) -
                                  edges.begin());
}

double bin_representative(std::size_t index, const BinGrid& grid) {
  if (index >= grid.size()) throw std::out_of_range("bin index out of range");
  return grid.representatives()[index];
}

}  // namespace bitswap
