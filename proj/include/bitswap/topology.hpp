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

// Coding schedules over latent-variable graphs.
//
// A topology has two edge sets: generative edges (parent -> child, the model
// p) and inference edges (the posterior approximation q). The sender decodes
// each latent from the stream under q and encodes it (and x) under p; the
// receiver runs the same schedule backwards with the two kinds swapped.
// Variable 0 is always the observation x.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bitswap/latent_model.hpp"
#include "bitswap/rans.hpp"
#include "bitswap/tabular.hpp"

namespace bitswap {

enum class SchemeId { BBANS, BITSWAP };

std::string scheme_name(SchemeId scheme);
/// Accepts "bbans" and "bitswap" (case-insensitive).
SchemeId parse_scheme(const std::string& name);

enum class OpKind { Decode, Encode };
enum class Dist { Generative, Inference };

struct Op {
  OpKind kind;
  int var;
  Dist dist;

  bool operator==(const Op&) const = default;
};

using Schedule = std::vector<Op>;

struct Topology {
  std::vector<std::string> names;
  std::vector<std::vector<int>> generative_parents;
  std::vector<std::vector<int>> inference_parents;

  std::size_t size() const { return names.size(); }
  /// Latents without generative parents, ascending.
  std::vector<int> priors() const;
  std::vector<int> generative_children(int var) const;
  std::vector<int> inference_children(int var) const;

  /// Throws std::invalid_argument when the generative graph is cyclic, x has
  /// generative children, or some latent is not reachable from x along
  /// inference edges.
  void validate() const;

  /// x <- z_1 <- ... <- z_L, inference in the opposite direction.
  static Topology chain(int depth);
};

std::string format_op(const Op& op, const Topology& topology);
std::string format_schedule(const Schedule& schedule, const Topology& topology);

/// The BB-ANS (BBANS) or Bit-Swap (BITSWAP) op order for a depth-L chain.
Schedule chain_schedule(int depth, SchemeId scheme);

/// Greedy recursive bits-back order: after every step, perform the legal
/// non-prior Encode with the lowest variable id if there is one, else the
/// legal Decode with the lowest id. Priors are encoded last, lowest id first.
/// Throws std::invalid_argument if the topology admits no order.
Schedule compile_schedule(const Topology& topology);

/// Every Decode first, then every Encode, each in the greedy legal order.
Schedule decode_first_schedule(const Topology& topology);

/// Reversed order with Decode <-> Encode swapped: the receiver's view of a
/// sender schedule. Each op keeps its distribution, so the receiver decodes
/// under p and encodes under q.
Schedule reverse_schedule(const Schedule& schedule);

struct ScheduleReport {
  bool ok = true;
  std::string violation;

  explicit operator bool() const { return ok; }
};

/// Checks a sender schedule: shape, sender legality, and legality of its
/// reverse under the receiver's knowledge rule.
ScheduleReport validate_schedule(const Topology& topology, const Schedule& schedule);

/// Largest number of latents decoded but not yet encoded at any point.
std::size_t max_outstanding_decodes(const Schedule& schedule);

/// Values per variable; an empty entry means not (yet) known.
using Assignment = std::vector<LayerValues>;

class GraphCodingModel {
 public:
  virtual ~GraphCodingModel() = default;

  virtual const Topology& topology() const = 0;
  virtual std::size_t dims(int var) const = 0;
  /// p(var | generative parents); the prior for parentless latents.
  virtual LayerTables generative_tables(int var, const Assignment& values) const = 0;
  /// q(var | inference parents).
  virtual LayerTables inference_tables(int var, const Assignment& values) const = 0;
};

/// Presents a ChainModel as a graph: variable i is layer i.
class ChainAdapter : public GraphCodingModel {
 public:
  explicit ChainAdapter(const ChainModel& model);

  const Topology& topology() const override { return topology_; }
  std::size_t dims(int var) const override;
  LayerTables generative_tables(int var, const Assignment& values) const override;
  LayerTables inference_tables(int var, const Assignment& values) const override;

 private:
  const ChainModel& model_;
  Topology topology_;
};

struct TreeVariable {
  std::string name;
  std::size_t alphabet = 0;
  std::size_t dims = 0;

  bool operator==(const TreeVariable&) const = default;
};

/// Conditional of `var` given `parents`; the table's parent inputs are the
/// parents' dimensions concatenated in the listed order.
struct TreeConditional {
  int var = 0;
  std::vector<int> parents;
  TabularConditional table;

  bool operator==(const TreeConditional&) const = default;
};

/// Tabular model over an arbitrary bits-back compatible topology.
class TabularTreeModel : public GraphCodingModel {
 public:
  TabularTreeModel(std::vector<TreeVariable> variables, std::vector<TreeConditional> generative,
                   std::vector<TreeConditional> inference, int precision_bits,
                   std::uint64_t sampling_seed = 0);

  const Topology& topology() const override { return topology_; }
  std::size_t dims(int var) const override;
  LayerTables generative_tables(int var, const Assignment& values) const override;
  LayerTables inference_tables(int var, const Assignment& values) const override;

  const std::vector<TreeVariable>& variables() const { return variables_; }
  const std::vector<TreeConditional>& generative() const { return generative_; }
  const std::vector<TreeConditional>& inference() const { return inference_; }
  int precision_bits() const { return precision_bits_; }
  std::uint64_t sampling_seed() const { return sampling_seed_; }

  /// Ancestral sample of every variable.
  Assignment sample(std::uint64_t seed) const;

  bool operator==(const TabularTreeModel& other) const;

 private:
  std::vector<int> parent_values(const TreeConditional& c, const Assignment& values) const;

  std::vector<TreeVariable> variables_;
  std::vector<TreeConditional> generative_;  // indexed by var
  std::vector<TreeConditional> inference_;   // indexed by var; entry 0 unused
  int precision_bits_;
  std::uint64_t sampling_seed_;
  Topology topology_;
  std::vector<QuantizedConditional> generative_q_;
  std::vector<QuantizedConditional> inference_q_;
};

struct OpRecord {
  Op op;
  std::int64_t bits_delta = 0;  // change in CoderState::total_bits()
  double info_bits = 0.0;       // sum of log2(M / F) over the op's symbols
};

/// Runs `schedule` against `coder`. Encodes read `values`; decodes write
/// them. Dimensions are encoded in ascending order and decoded in descending
/// order. Appends one record per op to `records` when given.
void execute_schedule(const GraphCodingModel& model, const Schedule& schedule, CoderState& coder,
                      Assignment& values, std::vector<OpRecord>* records = nullptr);

}  // namespace bitswap
