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

// Range-variant asymmetric numeral systems with a 64-bit state and 32-bit
// word renormalization.
//
// The state s lives in [2^32, 2^64) between operations. Encoding symbol x
// maps s to C(x, s) = M * floor(s / F[x]) + B[x] + s mod F[x]; when that
// would overflow, the low 32 bits of s are pushed onto the word stack first.
// Decoding inverts C and pulls a word back whenever s drops below 2^32.
// The word stack is LIFO: symbols come back in the reverse order they went in.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace bitswap {

inline constexpr int kMaxPrecisionBits = 24;
inline constexpr int kDefaultPrecisionBits = 12;

/// Quantized pmf: integer frequencies F[x] >= 1 summing to M = 2^r, with
/// cumulative starts B[x].
class FrequencyTable {
 public:
  /// Validates every invariant; throws std::invalid_argument otherwise.
  FrequencyTable(std::vector<std::uint32_t> freqs, int precision_bits);

  int precision_bits() const { return precision_bits_; }
  std::uint32_t total() const { return std::uint32_t{1} << precision_bits_; }
  std::size_t size() const { return freqs_.size(); }

  std::uint32_t freq(std::size_t sym) const { return freqs_[sym]; }
  std::uint32_t cumul(std::size_t sym) const { return cumuls_[sym]; }
  std::span<const std::uint32_t> freqs() const { return freqs_; }

  /// The unique x with B[x] <= r < B[x] + F[x]; r must be below M.
  std::size_t find(std::uint32_t r) const;

  double probability(std::size_t sym) const;
  /// log2(M / F[sym]): the ideal cost of coding `sym` with this table.
  double info_bits(std::size_t sym) const;

  bool operator==(const FrequencyTable& other) const = default;

 private:
  std::vector<std::uint32_t> freqs_;
  std::vector<std::uint32_t> cumuls_;  // size() + 1 entries, back() == M
  int precision_bits_;
};

/// Largest-remainder quantization of `probs` to precision 2^precision_bits.
/// Every symbol gets at least 1; remainder ties go to the lower index, and
/// mass needed for the minimum is taken one unit at a time from the currently
/// largest entry (lowest index on ties).
FrequencyTable quantize_pmf(std::span<const double> probs, int precision_bits);

/// Shannon entropy of the quantized pmf in bits.
double entropy_bits(const FrequencyTable& table);

/// C(x, s) without renormalization. Requires M * floor(s / F[x]) to fit.
std::uint64_t ans_encode_step(std::uint64_t s, const FrequencyTable& table, std::size_t sym);

/// D(s) without renormalization: (x, F[x] * floor(s / M) + (s mod M) - B[x]).
std::pair<std::size_t, std::uint64_t> ans_decode_step(std::uint64_t s,
                                                      const FrequencyTable& table);

/// ANS state plus its stack of emitted words.
class CoderState {
 public:
  static constexpr std::uint64_t kStateLow = std::uint64_t{1} << 32;

  /// Fresh coder: s = 2^32, empty stack.
  CoderState();
  /// Rebuilds a coder from a serialized stack (bottom first) and state.
  CoderState(std::vector<std::uint32_t> words, std::uint64_t state);

  void encode(const FrequencyTable& table, std::size_t sym);
  /// Throws StreamExhausted when a word is needed and the stack is empty.
  /// The coder is unusable afterwards.
  std::size_t decode(const FrequencyTable& table);

  /// Fills a fresh coder with reproducible pseudo-random initial bits: the
  /// low 32 bits of the state and then n_words stack words, all drawn from
  /// a 64-bit Mersenne twister seeded with `seed`. The bit count of a fresh
  /// coder (33) is unchanged by randomizing the state's low word.
  void seed_buffer(std::size_t n_words, std::uint64_t seed);

  /// 32 * |stack| + bit length of s.
  std::uint64_t total_bits() const;
  std::uint64_t initial_len_bits() const { return initial_len_bits_; }
  /// Smallest total_bits() seen since construction, seeding or reset_min().
  std::uint64_t min_len_bits() const { return min_len_bits_; }
  void reset_min() { min_len_bits_ = total_bits(); }

  std::uint64_t state() const { return state_; }
  const std::vector<std::uint32_t>& words() const { return words_; }
  bool failed() const { return failed_; }

  /// Equal state and stack (accounting fields are ignored).
  bool same_stream(const CoderState& other) const {
    return state_ == other.state_ && words_ == other.words_;
  }

 private:
  void track_min();

  std::uint64_t state_;
  std::vector<std::uint32_t> words_;
  std::uint64_t initial_len_bits_;
  std::uint64_t min_len_bits_;
  bool failed_ = false;
};

}  // namespace bitswap
