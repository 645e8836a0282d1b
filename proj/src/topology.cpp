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

#include "bitswap/topology.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>
#include <stdexcept>

namespace bitswap {

std::string scheme_name(SchemeId scheme) {
  return scheme == SchemeId::BBANS ? "bbans" : "bitswap";
}

SchemeId parse_scheme(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "bbans" || lower == "bb-ans") return SchemeId::BBANS;
  if (lower == "bitswap" || lower == "bit-swap") return SchemeId::BITSWAP;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected bbans or bitswap)");
}

std::vector<int> Topology::priors() const {
  std::vector<int> out;
  for (std::size_t v = 1; v < size(); ++v)
    if (generative_parents[v].empty()) out.push_back(static_cast<int>(v));
  return out;
}

namespace {

std::vector<int> children_of(const std::vector<std::vector<int>>& parents, int var) {
  std::vector<int> out;
  for (std::size_t v = 0; v < parents.size(); ++v)
    if (std::find(parents[v].begin(), parents[v].end(), var) != parents[v].end())
      out.push_back(static_cast<int>(v));
  return out;
}

}  // namespace

std::vector<int> Topology::generative_children(int var) const {
  return children_of(generative_parents, var);
}

std::vector<int> Topology::inference_children(int var) const {
  return children_of(inference_parents, var);
}

void Topology::validate() const {
  const std::size_t n = size();
  if (n < 2) throw std::invalid_argument("topology needs x and at least one latent");
  if (generative_parents.size() != n || inference_parents.size() != n)
    throw std::invalid_argument("topology edge lists do not match the variable count");
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto* list : {&generative_parents[v], &inference_parents[v]}) {
      for (int p : *list)
        if (p < 0 || static_cast<std::size_t>(p) >= n || p == static_cast<int>(v))
          throw std::invalid_argument("bad parent " + std::to_string(p) + " of " + names[v]);
      auto sorted = *list;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("duplicate parent of " + names[v]);
    }
  }
  if (generative_parents[0].empty()) throw std::invalid_argument("x needs generative parents");
  if (!generative_children(0).empty()) throw std::invalid_argument("x must be a generative sink");
  if (!inference_parents[0].empty()) throw std::invalid_argument("x cannot have inference parents");

  // Kahn's algorithm on both graphs: generative acyclicity, and inference
  // reachability from x (which also rules out inference cycles).
  auto topo_ok = [&](const std::vector<std::vector<int>>& parents, std::vector<bool> done) {
    bool progress = true;
    while (progress) {
      progress = false;
      for (std::size_t v = 0; v < n; ++v) {
        if (done[v] || parents[v].empty()) continue;
        if (std::all_of(parents[v].begin(), parents[v].end(), [&](int p) { return done[p]; })) {
          done[v] = true;
          progress = true;
        }
      }
    }
    return std::all_of(done.begin(), done.end(), [](bool b) { return b; });
  };
  std::vector<bool> gen_roots(n, false);
  for (int p : priors()) gen_roots[static_cast<std::size_t>(p)] = true;
  if (!topo_ok(generative_parents, gen_roots))
    throw std::invalid_argument("generative graph is cyclic");
  std::vector<bool> from_x(n, false);
  from_x[0] = true;
  if (!topo_ok(inference_parents, from_x))
    throw std::invalid_argument("some latent is not inferable from x");
}

Topology Topology::chain(int depth) {
  if (depth < 1) throw std::invalid_argument("chain depth must be >= 1");
  Topology t;
  const auto n = static_cast<std::size_t>(depth) + 1;
  t.names.resize(n);
  t.generative_parents.resize(n);
  t.inference_parents.resize(n);
  t.names[0] = "x";
  for (int i = 1; i <= depth; ++i) {
    t.names[static_cast<std::size_t>(i)] = "z" + std::to_string(i);
    t.inference_parents[static_cast<std::size_t>(i)] = {i - 1};
    t.generative_parents[static_cast<std::size_t>(i - 1)] = {i};
  }
  return t;
}

std::string format_op(const Op& op, const Topology& topology) {
  const auto& names = topology.names;
  const auto& parents = op.dist == Dist::Generative ? topology.generative_parents
                                                    : topology.inference_parents;
  std::string out = op.kind == OpKind::Decode ? "D " : "E ";
  const std::string& name = names.at(static_cast<std::size_t>(op.var));
  out += name + "|" + (op.dist == Dist::Generative ? "p(" : "q(") + name;
  const auto& ps = parents.at(static_cast<std::size_t>(op.var));
  for (std::size_t i = 0; i < ps.size(); ++i)
    out += (i == 0 ? "|" : ",") + names.at(static_cast<std::size_t>(ps[i]));
  return out + ")";
}

std::string format_schedule(const Schedule& schedule, const Topology& topology) {
  std::ostringstream os;
  for (std::size_t i = 0; i < schedule.size(); ++i)
    os << (i ? ", " : "") << format_op(schedule[i], topology);
  return os.str();
}

Schedule chain_schedule(int depth, SchemeId scheme) {
  if (depth < 1) throw std::invalid_argument("chain depth must be >= 1");
  Schedule s;
  const Op decode_z1{OpKind::Decode, 1, Dist::Inference};
  s.push_back(decode_z1);
  if (scheme == SchemeId::BBANS) {
    for (int i = 2; i <= depth; ++i) s.push_back({OpKind::Decode, i, Dist::Inference});
    for (int i = 0; i < depth; ++i) s.push_back({OpKind::Encode, i, Dist::Generative});
  } else {
    s.push_back({OpKind::Encode, 0, Dist::Generative});
    for (int i = 1; i < depth; ++i) {
      s.push_back({OpKind::Decode, i + 1, Dist::Inference});
      s.push_back({OpKind::Encode, i, Dist::Generative});
    }
  }
  s.push_back({OpKind::Encode, depth, Dist::Generative});
  return s;
}

namespace {

// Sender-side bookkeeping for the greedy compilers.
class Planner {
 public:
  explicit Planner(const Topology& t) : t_(t), known_(t.size(), false), encoded_(t.size(), false) {
    t.validate();
    known_[0] = true;
    is_prior_.assign(t.size(), false);
    for (int p : t.priors()) is_prior_[static_cast<std::size_t>(p)] = true;
  }

  bool can_decode(int v) const {
    if (v == 0 || known_[v]) return false;
    const auto& ps = t_.inference_parents[v];
    return std::all_of(ps.begin(), ps.end(), [&](int p) { return known_[p]; });
  }

  bool can_encode(int u) const {
    if (encoded_[u] || !known_[u]) return false;
    for (int p : t_.generative_parents[u])
      if (!known_[p]) return false;
    for (int c : t_.generative_children(u))
      if (!encoded_[c]) return false;
    for (int c : t_.inference_children(u))
      if (!known_[c]) return false;
    return true;
  }

  bool is_prior(int v) const { return is_prior_[v]; }

  // Lowest-id variable satisfying `pred`, or -1.
  template <class Pred>
  int first(Pred pred) const {
    for (int v = 0; v < static_cast<int>(t_.size()); ++v)
      if (pred(v)) return v;
    return -1;
  }

  void decode(int v) {
    known_[v] = true;
    schedule_.push_back({OpKind::Decode, v, Dist::Inference});
  }
  void encode(int u) {
    encoded_[u] = true;
    schedule_.push_back({OpKind::Encode, u, Dist::Generative});
  }

  void encode_priors() {
    for (int v = 0; v < static_cast<int>(t_.size()); ++v) {
      if (!is_prior_[v]) continue;
      if (!can_encode(v)) throw std::invalid_argument("no legal order for prior " + t_.names[v]);
      encode(v);
    }
  }

  Schedule finish() {
    if (schedule_.size() != 2 * t_.size() - 1)
      throw std::invalid_argument("topology admits no bits-back order");
    return std::move(schedule_);
  }

 private:
  const Topology& t_;
  std::vector<bool> known_;
  std::vector<bool> encoded_;
  std::vector<bool> is_prior_;
  Schedule schedule_;
};

}  // namespace

Schedule compile_schedule(const Topology& topology) {
  Planner plan(topology);
  for (;;) {
    const int e = plan.first([&](int v) { return !plan.is_prior(v) && plan.can_encode(v); });
    if (e >= 0) {
      plan.encode(e);
      continue;
    }
    const int d = plan.first([&](int v) { return plan.can_decode(v); });
    if (d < 0) break;
    plan.decode(d);
  }
  plan.encode_priors();
  return plan.finish();
}

Schedule decode_first_schedule(const Topology& topology) {
  Planner plan(topology);
  for (int d; (d = plan.first([&](int v) { return plan.can_decode(v); })) >= 0;) plan.decode(d);
  for (int e; (e = plan.first([&](int v) { return !plan.is_prior(v) && plan.can_encode(v); })) >= 0;)
    plan.encode(e);
  plan.encode_priors();
  return plan.finish();
}

Schedule reverse_schedule(const Schedule& schedule) {
  Schedule out(schedule.rbegin(), schedule.rend());
  for (auto& op : out) op.kind = op.kind == OpKind::Decode ? OpKind::Encode : OpKind::Decode;
  return out;
}

ScheduleReport validate_schedule(const Topology& topology, const Schedule& schedule) {
  auto fail = [&](std::size_t i, const std::string& why) {
    return ScheduleReport{false, "op " + std::to_string(i) + " (" +
                                     format_op(schedule[i], topology) + "): " + why};
  };
  const std::size_t n = topology.size();
  if (schedule.size() != 2 * n - 1)
    return {false, "schedule has " + std::to_string(schedule.size()) + " ops, expected " +
                       std::to_string(2 * n - 1)};
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const Op& op = schedule[i];
    if (op.var < 0 || static_cast<std::size_t>(op.var) >= n)
      return {false, "op " + std::to_string(i) + " names an unknown variable"};
    if ((op.kind == OpKind::Decode) != (op.dist == Dist::Inference))
      return fail(i, "sender decodes under q and encodes under p");
  }

  auto all_known = [](const std::vector<int>& vars, const std::vector<bool>& known) {
    return std::all_of(vars.begin(), vars.end(), [&](int v) { return known[v]; });
  };

  // Sender: x known from the start; a latent becomes known when decoded.
  std::vector<bool> known(n, false), decoded(n, false), encoded(n, false);
  known[0] = true;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const Op& op = schedule[i];
    const auto v = static_cast<std::size_t>(op.var);
    if (op.kind == OpKind::Decode) {
      if (v == 0) return fail(i, "x is never decoded by the sender");
      if (decoded[v]) return fail(i, "decoded twice");
      if (!all_known(topology.inference_parents[v], known))
        return fail(i, "conditioning variable not yet known");
      decoded[v] = known[v] = true;
    } else {
      if (encoded[v]) return fail(i, "encoded twice");
      if (!known[v]) return fail(i, "encoded before being decoded");
      if (!all_known(topology.generative_parents[v], known))
        return fail(i, "conditioning variable not yet known");
      encoded[v] = true;
    }
  }

  // Receiver: nothing known; a variable becomes known when decoded under p.
  const Schedule rev = reverse_schedule(schedule);
  std::fill(known.begin(), known.end(), false);
  for (std::size_t i = 0; i < rev.size(); ++i) {
    const Op& op = rev[i];
    const auto v = static_cast<std::size_t>(op.var);
    const std::string where = "receiver op " + std::to_string(i) + " (" + format_op(op, topology) + "): ";
    if (op.kind == OpKind::Decode) {
      if (!all_known(topology.generative_parents[v], known))
        return {false, where + "conditioning variable not yet known"};
      known[v] = true;
    } else if (!all_known(topology.inference_parents[v], known)) {
      return {false, where + "conditioning variable not yet known"};
    }
  }
  return {};
}

std::size_t max_outstanding_decodes(const Schedule& schedule) {
  std::size_t open = 0, worst = 0;
  for (const Op& op : schedule) {
    if (op.var == 0) continue;
    if (op.kind == OpKind::Decode) {
      worst = std::max(worst, ++open);
    } else if (open > 0) {
      --open;
    }
  }
  return worst;
}

ChainAdapter::ChainAdapter(const ChainModel& model)
    : model_(model), topology_(Topology::chain(model.depth())) {}

std::size_t ChainAdapter::dims(int var) const { return model_.layer_dim(var); }

LayerTables ChainAdapter::generative_tables(int var, const Assignment& values) const {
  if (var == model_.depth()) return model_.prior_tables();
  return model_.generative_tables(var, values.at(static_cast<std::size_t>(var) + 1));
}

LayerTables ChainAdapter::inference_tables(int var, const Assignment& values) const {
  return model_.inference_tables(var, values.at(static_cast<std::size_t>(var) - 1));
}

TabularTreeModel::TabularTreeModel(std::vector<TreeVariable> variables,
                                   std::vector<TreeConditional> generative,
                                   std::vector<TreeConditional> inference, int precision_bits,
                                   std::uint64_t sampling_seed)
    : variables_(std::move(variables)),
      precision_bits_(precision_bits),
      sampling_seed_(sampling_seed) {
  const std::size_t n = variables_.size();
  if (n < 2) throw std::invalid_argument("tree model needs x and at least one latent");
  for (const auto& v : variables_)
    if (v.alphabet < 2 || v.dims < 1)
      throw std::invalid_argument("variable " + v.name + " needs alphabet >= 2 and dims >= 1");

  auto place = [&](std::vector<TreeConditional>& list, std::vector<TreeConditional>& slots,
                   std::size_t first, const char* what) {
    slots.assign(n, TreeConditional{});
    std::vector<bool> seen(n, false);
    for (auto& c : list) {
      if (c.var < static_cast<int>(first) || static_cast<std::size_t>(c.var) >= n)
        throw std::invalid_argument(std::string(what) + " conditional for a bad variable");
      const auto v = static_cast<std::size_t>(c.var);
      if (seen[v]) throw std::invalid_argument(std::string(what) + " conditional repeated");
      seen[v] = true;
      std::vector<std::size_t> inputs;
      for (int p : c.parents) {
        if (p < 0 || static_cast<std::size_t>(p) >= n)
          throw std::invalid_argument(std::string(what) + " parent out of range");
        const auto& pv = variables_[static_cast<std::size_t>(p)];
        inputs.insert(inputs.end(), pv.dims, pv.alphabet);
      }
      c.table.validate();
      if (c.table.child_alphabet != variables_[v].alphabet ||
          c.table.dims.size() != variables_[v].dims || c.table.parent_alphabets != inputs)
        throw std::invalid_argument(std::string(what) + " table shape mismatch for " +
                                    variables_[v].name);
      slots[v] = std::move(c);
    }
    for (std::size_t v = first; v < n; ++v)
      if (!seen[v])
        throw std::invalid_argument(std::string(what) + " conditional missing for " +
                                    variables_[v].name);
  };
  place(generative, generative_, 0, "generative");
  place(inference, inference_, 1, "inference");

  topology_.names.resize(n);
  topology_.generative_parents.resize(n);
  topology_.inference_parents.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    topology_.names[v] = variables_[v].name;
    topology_.generative_parents[v] = generative_[v].parents;
    if (v > 0) topology_.inference_parents[v] = inference_[v].parents;
  }
  topology_.validate();

  for (std::size_t v = 0; v < n; ++v) {
    generative_q_.emplace_back(generative_[v].table, precision_bits_);
    inference_q_.push_back(v == 0 ? QuantizedConditional{}
                                  : QuantizedConditional(inference_[v].table, precision_bits_));
  }
}

std::size_t TabularTreeModel::dims(int var) const {
  return variables_.at(static_cast<std::size_t>(var)).dims;
}

std::vector<int> TabularTreeModel::parent_values(const TreeConditional& c,
                                                 const Assignment& values) const {
  std::vector<int> out;
  for (int p : c.parents) {
    const auto& v = values.at(static_cast<std::size_t>(p));
    if (v.size() != dims(p))
      throw std::invalid_argument("parent " + variables_[static_cast<std::size_t>(p)].name +
                                  " not known");
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

LayerTables TabularTreeModel::generative_tables(int var, const Assignment& values) const {
  const auto v = static_cast<std::size_t>(var);
  return generative_q_.at(v).tables(parent_values(generative_[v], values));
}

LayerTables TabularTreeModel::inference_tables(int var, const Assignment& values) const {
  if (var < 1) throw std::out_of_range("x has no inference conditional");
  const auto v = static_cast<std::size_t>(var);
  return inference_q_.at(v).tables(parent_values(inference_[v], values));
}

Assignment TabularTreeModel::sample(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  const std::size_t n = variables_.size();
  Assignment values(n);
  std::size_t done = 0;
  while (done < n) {
    for (std::size_t v = 0; v < n; ++v) {
      if (!values[v].empty()) continue;
      const auto& ps = generative_[v].parents;
      if (!std::all_of(ps.begin(), ps.end(), [&](int p) { return !values[p].empty(); })) continue;
      const auto tables = generative_tables(static_cast<int>(v), values);
      for (const auto& t : tables) values[v].push_back(static_cast<int>(sample_symbol(t, rng())));
      ++done;
    }
  }
  return values;
}

bool TabularTreeModel::operator==(const TabularTreeModel& other) const {
  return variables_ == other.variables_ && generative_ == other.generative_ &&
         inference_ == other.inference_ && precision_bits_ == other.precision_bits_ &&
         sampling_seed_ == other.sampling_seed_;
}

void execute_schedule(const GraphCodingModel& model, const Schedule& schedule, CoderState& coder,
                      Assignment& values, std::vector<OpRecord>* records) {
  values.resize(model.topology().size());
  for (const Op& op : schedule) {
    const auto v = static_cast<std::size_t>(op.var);
    const LayerTables tables = op.dist == Dist::Generative ? model.generative_tables(op.var, values)
                                                           : model.inference_tables(op.var, values);
    const std::size_t n = model.dims(op.var);
    if (tables.size() != n) throw std::logic_error("table count does not match dimensions");
    const auto before = static_cast<std::int64_t>(coder.total_bits());
    double info = 0.0;
    if (op.kind == OpKind::Decode) {
      values[v].assign(n, 0);
      for (std::size_t d = n; d-- > 0;) {
        values[v][d] = static_cast<int>(coder.decode(tables[d]));
        info += tables[d].info_bits(static_cast<std::size_t>(values[v][d]));
      }
    } else {
      if (values[v].size() != n)
        throw std::invalid_argument("encode of " + model.topology().names[v] + " without a value");
      for (std::size_t d = 0; d < n; ++d) {
        const int sym = values[v][d];
        if (sym < 0 || static_cast<std::size_t>(sym) >= tables[d].size())
          throw std::out_of_range("symbol outside the table alphabet");
        coder.encode(tables[d], static_cast<std::size_t>(sym));
        info += tables[d].info_bits(static_cast<std::size_t>(sym));
      }
    }
    if (records)
      records->push_back({op, static_cast<std::int64_t>(coder.total_bits()) - before, info});
  }
}

}  // namespace bitswap
