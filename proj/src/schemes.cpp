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

#include "bitswap/schemes.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "bitswap/error.hpp"

namespace bitswap {
namespace {

// Applies one layer-level op to the coder and records its cost.
class Session {
 public:
  Session(CoderState& coder, DatapointTrace* trace) : coder_(coder), trace_(trace) {
    if (trace_) {
      trace_->ops.clear();
      trace_->bits_before = coder_.total_bits();
    }
    coder_.reset_min();
  }

  LayerValues decode(const LayerTables& tables, int var, Dist dist) {
    const auto before = coder_.total_bits();
    LayerValues v(tables.size());
    double info = 0.0;
    for (std::size_t d = tables.size(); d-- > 0;) {
      v[d] = static_cast<int>(coder_.decode(tables[d]));
      info += tables[d].info_bits(static_cast<std::size_t>(v[d]));
    }
    record({OpKind::Decode, var, dist}, before, info);
    return v;
  }

  void encode(const LayerTables& tables, std::span<const int> values, int var, Dist dist) {
    if (values.size() != tables.size())
      throw std::invalid_argument("layer " + std::to_string(var) + " expects " +
                                  std::to_string(tables.size()) + " values");
    const auto before = coder_.total_bits();
    double info = 0.0;
    for (std::size_t d = 0; d < tables.size(); ++d) {
      if (values[d] < 0 || static_cast<std::size_t>(values[d]) >= tables[d].size())
        throw std::out_of_range("symbol outside the table alphabet");
      coder_.encode(tables[d], static_cast<std::size_t>(values[d]));
      info += tables[d].info_bits(static_cast<std::size_t>(values[d]));
    }
    record({OpKind::Encode, var, dist}, before, info);
  }

  void finish() {
    if (!trace_) return;
    trace_->bits_after = coder_.total_bits();
    trace_->min_bits_during = coder_.min_len_bits();
  }

 private:
  void record(Op op, std::uint64_t before, double info) {
    if (trace_)
      trace_->ops.push_back({op, static_cast<std::int64_t>(coder_.total_bits()) -
                                     static_cast<std::int64_t>(before),
                             info});
  }

  CoderState& coder_;
  DatapointTrace* trace_;
};

constexpr Dist kP = Dist::Generative;
constexpr Dist kQ = Dist::Inference;

void check_x(const ChainModel& model, std::span<const int> x) {
  if (x.size() != model.data_dim())
    throw std::invalid_argument("datapoint has " + std::to_string(x.size()) + " symbols, model expects " +
                                std::to_string(model.data_dim()));
}

}  // namespace

void bbans_encode(const ChainModel& model, CoderState& coder, std::span<const int> x,
                  DatapointTrace* trace) {
  check_x(model, x);
  const int depth = model.depth();
  Session s(coder, trace);
  std::vector<LayerValues> z(static_cast<std::size_t>(depth) + 1);
  z[0].assign(x.begin(), x.end());
  for (int i = 1; i <= depth; ++i) z[i] = s.decode(model.inference_tables(i, z[i - 1]), i, kQ);
  for (int i = 0; i < depth; ++i) s.encode(model.generative_tables(i, z[i + 1]), z[i], i, kP);
  s.encode(model.prior_tables(), z[depth], depth, kP);
  s.finish();
}

LayerValues bbans_decode(const ChainModel& model, CoderState& coder) {
  const int depth = model.depth();
  Session s(coder, nullptr);
  std::vector<LayerValues> z(static_cast<std::size_t>(depth) + 1);
  z[depth] = s.decode(model.prior_tables(), depth, kP);
  for (int i = depth - 1; i >= 0; --i) z[i] = s.decode(model.generative_tables(i, z[i + 1]), i, kP);
  for (int i = depth; i >= 1; --i) s.encode(model.inference_tables(i, z[i - 1]), z[i], i, kQ);
  return z[0];
}

void bitswap_encode(const ChainModel& model, CoderState& coder, std::span<const int> x,
                    DatapointTrace* trace) {
  check_x(model, x);
  const int depth = model.depth();
  Session s(coder, trace);
  std::vector<LayerValues> z(static_cast<std::size_t>(depth) + 1);
  z[0].assign(x.begin(), x.end());
  for (int i = 0; i < depth; ++i) {
    z[i + 1] = s.decode(model.inference_tables(i + 1, z[i]), i + 1, kQ);
    s.encode(model.generative_tables(i, z[i + 1]), z[i], i, kP);
  }
  s.encode(model.prior_tables(), z[depth], depth, kP);
  s.finish();
}

LayerValues bitswap_decode(const ChainModel& model, CoderState& coder) {
  const int depth = model.depth();
  Session s(coder, nullptr);
  std::vector<LayerValues> z(static_cast<std::size_t>(depth) + 1);
  z[depth] = s.decode(model.prior_tables(), depth, kP);
  for (int i = depth - 1; i >= 0; --i) {
    z[i] = s.decode(model.generative_tables(i, z[i + 1]), i, kP);
    s.encode(model.inference_tables(i + 1, z[i]), z[i + 1], i + 1, kQ);
  }
  return z[0];
}

void encode_datapoint(const ChainModel& model, SchemeId scheme, CoderState& coder,
                      std::span<const int> x, DatapointTrace* trace) {
  if (scheme == SchemeId::BBANS)
    bbans_encode(model, coder, x, trace);
  else
    bitswap_encode(model, coder, x, trace);
}

LayerValues decode_datapoint(const ChainModel& model, SchemeId scheme, CoderState& coder) {
  return scheme == SchemeId::BBANS ? bbans_decode(model, coder) : bitswap_decode(model, coder);
}

namespace {

template <class EncodeOne>
CompressResult compress_all(std::span<const LayerValues> dataset, std::size_t n_seed_words,
                            std::uint64_t seed, EncodeOne encode_one) {
  if (dataset.empty()) throw std::invalid_argument("empty dataset");
  CompressResult out;
  out.coder.seed_buffer(n_seed_words, seed);
  out.trace.initial_len_bits = out.coder.total_bits();
  out.trace.datapoints.resize(dataset.size());
  for (std::size_t n = 0; n < dataset.size(); ++n) {
    try {
      encode_one(out.coder, dataset[n], out.trace.datapoints[n]);
    } catch (const StreamExhausted& e) {
      throw StreamExhausted("datapoint " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

template <class DecodeOne>
std::vector<LayerValues> decompress_all(CoderState& coder, std::size_t n_datapoints,
                                        DecodeOne decode_one) {
  std::vector<LayerValues> out(n_datapoints);
  for (std::size_t n = n_datapoints; n-- > 0;) {
    try {
      out[n] = decode_one(coder);
    } catch (const StreamExhausted& e) {
      throw CorruptStream("stream ended while decoding datapoint " + std::to_string(n));
    }
  }
  return out;
}

}  // namespace

CompressResult chain_compress(const ChainModel& model, SchemeId scheme,
                              std::span<const LayerValues> dataset, std::size_t n_seed_words,
                              std::uint64_t seed) {
  return compress_all(dataset, n_seed_words, seed,
                      [&](CoderState& c, const LayerValues& x, DatapointTrace& t) {
                        encode_datapoint(model, scheme, c, x, &t);
                      });
}

std::vector<LayerValues> chain_decompress(const ChainModel& model, SchemeId scheme,
                                          CoderState& coder, std::size_t n_datapoints) {
  return decompress_all(coder, n_datapoints,
                        [&](CoderState& c) { return decode_datapoint(model, scheme, c); });
}

CompressResult graph_compress(const GraphCodingModel& model, const Schedule& schedule,
                              std::span<const LayerValues> dataset, std::size_t n_seed_words,
                              std::uint64_t seed) {
  if (auto report = validate_schedule(model.topology(), schedule); !report)
    throw std::invalid_argument("invalid schedule: " + report.violation);
  return compress_all(dataset, n_seed_words, seed,
                      [&](CoderState& c, const LayerValues& x, DatapointTrace& t) {
                        if (x.size() != model.dims(0))
                          throw std::invalid_argument("datapoint dimension mismatch");
                        t.bits_before = c.total_bits();
                        c.reset_min();
                        Assignment values(model.topology().size());
                        values[0] = x;
                        t.ops.clear();
                        execute_schedule(model, schedule, c, values, &t.ops);
                        t.bits_after = c.total_bits();
                        t.min_bits_during = c.min_len_bits();
                      });
}

std::vector<LayerValues> graph_decompress(const GraphCodingModel& model, const Schedule& schedule,
                                          CoderState& coder, std::size_t n_datapoints) {
  const Schedule receiver = reverse_schedule(schedule);
  return decompress_all(coder, n_datapoints, [&](CoderState& c) {
    Assignment values(model.topology().size());
    execute_schedule(model, receiver, c, values);
    return values[0];
  });
}

std::uint64_t initial_bits_required(const DatapointTrace& trace) {
  return trace.bits_before - std::min(trace.bits_before, trace.min_bits_during);
}

double bbans_initial_bits_ideal(const DatapointTrace& trace) {
  double bits = 0.0;
  for (const auto& r : trace.ops) {
    if (r.op.kind != OpKind::Decode) break;
    bits += r.info_bits;
  }
  return bits;
}

double bitswap_initial_bits_bound(const DatapointTrace& trace) {
  // Pair each decode of z_{i+1} with the encode of z_{i-1} that precedes it.
  double bound = 0.0;
  double credit = 0.0;
  for (const auto& r : trace.ops) {
    if (r.op.kind == OpKind::Decode) {
      bound += std::max(0.0, r.info_bits - credit);
      credit = 0.0;
    } else {
      credit = r.info_bits;
    }
  }
  return bound;
}

}  // namespace bitswap
