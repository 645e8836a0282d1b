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

#include "bitswap/rans.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>

#include "bitswap/error.hpp"
#include "bitswap/kernels.hpp"

namespace bitswap {

FrequencyTable::FrequencyTable(std::vector<std::uint32_t> freqs, int precision_bits)
    : freqs_(std::move(freqs)), precision_bits_(precision_bits) {
  if (precision_bits_ < 1 || precision_bits_ > kMaxPrecisionBits)
    throw std::invalid_argument("precision bits out of range: " + std::to_string(precision_bits_));
  if (freqs_.empty()) throw std::invalid_argument("empty frequency table");
  cumuls_.resize(freqs_.size() + 1);
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    if (freqs_[i] == 0) throw std::invalid_argument("zero frequency for symbol " + std::to_string(i));
    cumuls_[i] = static_cast<std::uint32_t>(acc);
    acc += freqs_[i];
    if (acc > total()) throw std::invalid_argument("frequencies exceed precision total");
  }
  if (acc != total()) throw std::invalid_argument("frequencies do not sum to 2^precision_bits");
  cumuls_.back() = static_cast<std::uint32_t>(acc);
}

std::size_t FrequencyTable::find(std::uint32_t r) const {
  const auto it = std::upper_bound(cumuls_.begin() + 1, cumuls_.end(), r);
  return static_cast<std::size_t>(it - cumuls_.begin()) - 1;
}

double FrequencyTable::probability(std::size_t sym) const {
  return static_cast<double>(freqs_[sym]) / static_cast<double>(total());
}

double FrequencyTable::info_bits(std::size_t sym) const {
  return static_cast<double>(precision_bits_) - std::log2(static_cast<double>(freqs_[sym]));
}

double entropy_bits(const FrequencyTable& table) {
  double h = 0.0;
  for (std::size_t x = 0; x < table.size(); ++x) h += table.probability(x) * table.info_bits(x);
  return h;
}

FrequencyTable quantize_pmf(std::span<const double> probs, int precision_bits) {
  if (precision_bits < 1 || precision_bits > kMaxPrecisionBits)
    throw std::invalid_argument("precision bits out of range");
  const std::size_t n = probs.size();
  const std::uint64_t m = std::uint64_t{1} << precision_bits;
  if (n < 2) throw std::invalid_argument("pmf needs at least two symbols");
  if (n > m) throw std::invalid_argument("alphabet larger than 2^precision_bits");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("pmf entry negative or not finite");
    sum += p;
  }
  if (sum <= 0.0) throw std::invalid_argument("all-zero pmf");
  if (std::abs(sum - 1.0) > 1e-6) throw std::invalid_argument("pmf does not sum to 1");

  std::vector<double> normalized(probs.begin(), probs.end());
  for (double& p : normalized) p /= sum;
  std::vector<std::uint32_t> freqs(n);
  std::vector<double> rems(n);
  kernels::scale_floor(normalized, static_cast<double>(m), freqs, rems);

  std::uint64_t assigned = 0;
  std::vector<std::size_t> eligible;
  eligible.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (freqs[i] == 0) {
      freqs[i] = 1;
    } else {
      eligible.push_back(i);
    }
    assigned += freqs[i];
  }

  if (assigned < m) {
    std::uint64_t leftover = m - assigned;
    auto by_remainder = [&](std::size_t a, std::size_t b) {
      return rems[a] != rems[b] ? rems[a] > rems[b] : a < b;
    };
    if (eligible.empty()) throw std::logic_error("quantize_pmf: no symbol can take the leftover");
    while (leftover > 0) {
      const std::size_t take = std::min<std::uint64_t>(leftover, eligible.size());
      std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(take),
                        eligible.end(), by_remainder);
      for (std::size_t k = 0; k < take; ++k) ++freqs[eligible[k]];
      leftover -= take;
    }
  } else if (assigned > m) {
    // Max-heap on (freq, -index).
    auto cmp = [&](std::size_t a, std::size_t b) {
      return freqs[a] != freqs[b] ? freqs[a] < freqs[b] : a > b;
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
    for (std::size_t i = 0; i < n; ++i) heap.push(i);
    for (std::uint64_t excess = assigned - m; excess > 0; --excess) {
      const std::size_t top = heap.top();
      heap.pop();
      if (freqs[top] <= 1) throw std::logic_error("quantize_pmf: cannot satisfy minimum frequency");
      --freqs[top];
      heap.push(top);
    }
  }
  return FrequencyTable(std::move(freqs), precision_bits);
}

std::uint64_t ans_encode_step(std::uint64_t s, const FrequencyTable& table, std::size_t sym) {
  const std::uint64_t f = table.freq(sym);
  return ((s / f) << table.precision_bits()) + table.cumul(sym) + s % f;
}

std::pair<std::size_t, std::uint64_t> ans_decode_step(std::uint64_t s,
                                                      const FrequencyTable& table) {
  const std::uint64_t mask = table.total() - 1;
  const auto r = static_cast<std::uint32_t>(s & mask);
  const std::size_t sym = table.find(r);
  const std::uint64_t next =
      table.freq(sym) * (s >> table.precision_bits()) + r - table.cumul(sym);
  return {sym, next};
}

CoderState::CoderState()
    : state_(kStateLow), initial_len_bits_(33), min_len_bits_(33) {}

CoderState::CoderState(std::vector<std::uint32_t> words, std::uint64_t state)
    : state_(state), words_(std::move(words)) {
  if (state_ < kStateLow) throw CorruptStream("coder state below 2^32");
  initial_len_bits_ = total_bits();
  min_len_bits_ = initial_len_bits_;
}

void CoderState::track_min() {
  const std::uint64_t bits = total_bits();
  if (bits < min_len_bits_) min_len_bits_ = bits;
}

void CoderState::encode(const FrequencyTable& table, std::size_t sym) {
  if (failed_) throw StreamExhausted("encode on a failed coder");
  if (sym >= table.size()) throw std::out_of_range("symbol outside table alphabet");
  const std::uint64_t f = table.freq(sym);
  const int shift = 64 - table.precision_bits();
  // s >= F * 2^(64 - r) would overflow C(x, s).
  if ((state_ >> shift) >= f) {
    words_.push_back(static_cast<std::uint32_t>(state_));
    state_ >>= 32;
  }
  state_ = ans_encode_step(state_, table, sym);
  track_min();
}

std::size_t CoderState::decode(const FrequencyTable& table) {
  if (failed_) throw StreamExhausted("decode on a failed coder");
  const auto [sym, next] = ans_decode_step(state_, table);
  state_ = next;
  if (state_ < kStateLow) {
    if (words_.empty()) {
      failed_ = true;
      throw StreamExhausted();
    }
    state_ = (state_ << 32) | words_.back();
    words_.pop_back();
  }
  track_min();
  return sym;
}

void CoderState::seed_buffer(std::size_t n_words, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  state_ = kStateLow | (rng() >> 32);
  words_.clear();
  words_.reserve(n_words);
  for (std::size_t i = 0; i < n_words; ++i) words_.push_back(static_cast<std::uint32_t>(rng() >> 32));
  failed_ = false;
  initial_len_bits_ = total_bits();
  min_len_bits_ = initial_len_bits_;
}

std::uint64_t CoderState::total_bits() const {
  return 32 * static_cast<std::uint64_t>(words_.size()) +
         static_cast<std::uint64_t>(std::bit_width(state_));
}

}  // namespace bitswap
