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

// BB-ANS and Bit-Swap over chain models, and chaining of many datapoints
// through one stream.
//
// Sender op orders for depth L (D = decode under q, E = encode under p):
//   BB-ANS:   D z1, D z2, ..., D zL, E x, E z1, ..., E z(L-1), E zL
//   Bit-Swap: D z1, E x, D z2, E z1, ..., D zL, E z(L-1), E zL
// Within a layer, dimensions are encoded in ascending order and decoded in
// descending order, on both sides.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bitswap/latent_model.hpp"
#include "bitswap/rans.hpp"
#include "bitswap/topology.hpp"

namespace bitswap {

struct DatapointTrace {
  std::uint64_t bits_before = 0;
  std::uint64_t bits_after = 0;
  std::uint64_t min_bits_during = 0;
  std::vector<OpRecord> ops;

  std::int64_t net_bits() const {
    return static_cast<std::int64_t>(bits_after) - static_cast<std::int64_t>(bits_before);
  }
};

struct EncodeTrace {
  std::uint64_t initial_len_bits = 0;
  std::vector<DatapointTrace> datapoints;
};

void bbans_encode(const ChainModel& model, CoderState& coder, std::span<const int> x,
                  DatapointTrace* trace = nullptr);
LayerValues bbans_decode(const ChainModel& model, CoderState& coder);
void bitswap_encode(const ChainModel& model, CoderState& coder, std::span<const int> x,
                    DatapointTrace* trace = nullptr);
LayerValues bitswap_decode(const ChainModel& model, CoderState& coder);

void encode_datapoint(const ChainModel& model, SchemeId scheme, CoderState& coder,
                      std::span<const int> x, DatapointTrace* trace = nullptr);
LayerValues decode_datapoint(const ChainModel& model, SchemeId scheme, CoderState& coder);

struct CompressResult {
  CoderState coder;
  EncodeTrace trace;
};

/// Seeds a fresh coder with n_seed_words and encodes the dataset in order.
/// StreamExhausted names the failing datapoint.
CompressResult chain_compress(const ChainModel& model, SchemeId scheme,
                              std::span<const LayerValues> dataset, std::size_t n_seed_words,
                              std::uint64_t seed);

/// Decodes n_datapoints in reverse and returns them in original order; the
/// coder is left holding the residual (the initial buffer, if intact).
std::vector<LayerValues> chain_decompress(const ChainModel& model, SchemeId scheme,
                                          CoderState& coder, std::size_t n_datapoints);

/// Same as chain_compress / chain_decompress for arbitrary topologies, with
/// an explicit sender schedule. Datapoints are the x values.
CompressResult graph_compress(const GraphCodingModel& model, const Schedule& schedule,
                              std::span<const LayerValues> dataset, std::size_t n_seed_words,
                              std::uint64_t seed);
std::vector<LayerValues> graph_decompress(const GraphCodingModel& model, const Schedule& schedule,
                                          CoderState& coder, std::size_t n_datapoints);

/// Maximum depletion of the stream while encoding one datapoint.
std::uint64_t initial_bits_required(const DatapointTrace& trace);

/// Ideal information decoded before anything is encoded: the BB-ANS
/// requirement -log2 q(z_1:L | x) under the quantized tables.
double bbans_initial_bits_ideal(const DatapointTrace& trace);

/// The Bit-Swap bound sum_i max(0, log2 p(z_{i-1} | z_i) / q(z_{i+1} | z_i)),
/// with p(z_{-1} | z_0) = 1, from a Bit-Swap trace's ideal op costs.
double bitswap_initial_bits_bound(const DatapointTrace& trace);

}  // namespace bitswap
