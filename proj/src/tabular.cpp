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

#include "bitswap/tabular.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bitswap {

void TabularConditional::validate() const {
  if (child_alphabet < 2) throw std::invalid_argument("tabular alphabet must be >= 2");
  if (dims.empty()) throw std::invalid_argument("tabular conditional without dimensions");
  auto positive = [](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x) || !(x > 0.0)) return false;
    return true;
  };
  for (const auto& f : dims) {
    if (f.base.size() != child_alphabet) throw std::invalid_argument("factor base size mismatch");
    if (!positive(f.base)) throw std::invalid_argument("factor entries must be positive and finite");
    if (f.pairs.size() != parent_alphabets.size())
      throw std::invalid_argument("factor count does not match parent inputs");
    for (std::size_t j = 0; j < f.pairs.size(); ++j) {
      if (f.pairs[j].size() != parent_alphabets[j] * child_alphabet)
        throw std::invalid_argument("pair factor size mismatch");
      if (!positive(f.pairs[j])) throw std::invalid_argument("factor entries must be positive and finite");
    }
  }
}

std::vector<double> TabularConditional::row(std::size_t dim, std::span<const int> parent) const {
  if (dim >= dims.size()) throw std::out_of_range("child dimension out of range");
  if (parent.size() != parent_alphabets.size())
    throw std::invalid_argument("wrong number of parent values");
  const FactorTable& f = dims[dim];
  std::vector<double> out(f.base);
  for (std::size_t j = 0; j < parent.size(); ++j) {
    if (parent[j] < 0 || static_cast<std::size_t>(parent[j]) >= parent_alphabets[j])
      throw std::out_of_range("parent value outside its alphabet");
    const double* pair = f.pairs[j].data() + static_cast<std::size_t>(parent[j]) * child_alphabet;
    for (std::size_t c = 0; c < child_alphabet; ++c) out[c] *= pair[c];
  }
  double sum = 0.0;
  for (double v : out) sum += v;
  for (double& v : out) v /= sum;
  return out;
}

std::size_t TabularConditional::parent_configurations() const {
  std::size_t n = 1;
  for (std::size_t a : parent_alphabets) {
    if (n > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
    n *= a;
  }
  return n;
}

QuantizedConditional::QuantizedConditional(TabularConditional conditional, int precision_bits)
    : conditional_(std::move(conditional)), precision_bits_(precision_bits) {
  conditional_.validate();
  const std::size_t n = conditional_.parent_configurations();
  if (n > kMaxCachedConfigurations) return;
  cache_.reserve(n);
  std::vector<int> parent(conditional_.parent_alphabets.size(), 0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    // Mixed radix, first input least significant.
    std::size_t rest = idx;
    for (std::size_t j = 0; j < parent.size(); ++j) {
      parent[j] = static_cast<int>(rest % conditional_.parent_alphabets[j]);
      rest /= conditional_.parent_alphabets[j];
    }
    cache_.push_back(build(parent));
  }
}

std::size_t QuantizedConditional::config_index(std::span<const int> parent) const {
  std::size_t idx = 0;
  for (std::size_t j = parent.size(); j-- > 0;) {
    if (parent[j] < 0 || static_cast<std::size_t>(parent[j]) >= conditional_.parent_alphabets[j])
      throw std::out_of_range("parent value outside its alphabet");
    idx = idx * conditional_.parent_alphabets[j] + static_cast<std::size_t>(parent[j]);
  }
  return idx;
}

std::vector<FrequencyTable> QuantizedConditional::build(std::span<const int> parent) const {
  std::vector<FrequencyTable> out;
  out.reserve(conditional_.dims.size());
  for (std::size_t d = 0; d < conditional_.dims.size(); ++d)
    out.push_back(quantize_pmf(conditional_.row(d, parent), precision_bits_));
  return out;
}

std::vector<FrequencyTable> QuantizedConditional::tables(std::span<const int> parent) const {
  if (parent.size() != conditional_.parent_alphabets.size())
    throw std::invalid_argument("wrong number of parent values");
  if (!cache_.empty()) return cache_[config_index(parent)];
  return build(parent);
}

}  // namespace bitswap
