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

#include "bitswap/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "bitswap/error.hpp"

namespace bitswap {

void ExperimentConfig::validate() const {
  if (n_datapoints < 1) throw std::invalid_argument("n_datapoints must be >= 1");
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  if (models.empty()) throw std::invalid_argument("experiment needs at least one model");
  if (schemes.empty()) throw std::invalid_argument("experiment needs at least one scheme");
  if (kind != ExperimentKind::InitialBits && models.size() != 1)
    throw std::invalid_argument("cma and oracle experiments take exactly one model");
}

ExperimentConfig parse_experiment_config(std::string_view text,
                                         const std::filesystem::path& base_dir) {
  using nlohmann::json;
  try {
    const json j = json::parse(text);
    ExperimentConfig c;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "cma")
      c.kind = ExperimentKind::Cma;
    else if (kind == "initial_bits")
      c.kind = ExperimentKind::InitialBits;
    else if (kind == "oracle")
      c.kind = ExperimentKind::Oracle;
    else
      throw FormatError("unknown experiment kind '" + kind + "'");
    auto resolve = [&](const std::string& p) {
      const std::filesystem::path path(p);
      return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };
    if (j.contains("model")) c.models.push_back(resolve(j["model"].get<std::string>()));
    if (j.contains("models"))
      for (const auto& m : j["models"]) c.models.push_back(resolve(m.get<std::string>()));
    if (j.contains("schemes")) {
      c.schemes.clear();
      for (const auto& s : j["schemes"]) c.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
    c.n_datapoints = j.value("n_datapoints", c.n_datapoints);
    c.n_trials = j.value("n_trials", c.n_trials);
    c.seed_words = j.value("seed_words", c.seed_words);
    c.base_seed = j.value("base_seed", c.base_seed);
    c.output = resolve(j.at("output").get<std::string>());
    c.validate();
    return c;
  } catch (const FormatError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed experiment config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid experiment config: ") + e.what());
  }
}

std::uint64_t TrialRecord::bits_total(std::size_t n) const {
  return bits_after.at(n - 1) - initial_len_bits + initial_consumed.at(n - 1);
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

TrialRecord record_trial(const EncodeTrace& trace) {
  TrialRecord r;
  r.initial_len_bits = trace.initial_len_bits;
  std::uint64_t lowest = trace.initial_len_bits;
  for (const auto& d : trace.datapoints) {
    lowest = std::min(lowest, d.min_bits_during);
    r.bits_after.push_back(d.bits_after);
    r.net_bits.push_back(d.net_bits());
    r.initial_consumed.push_back(trace.initial_len_bits - lowest);
    r.initial_required.push_back(initial_bits_required(d));
  }
  return r;
}

}  // namespace

void summarize(CmaTable& t) {
  t.cma_mean.clear();
  t.cma_sd.clear();
  t.net_rate_mean.clear();
  if (t.trials.empty()) return;
  const std::size_t steps = t.trials.front().bits_after.size();
  const double d = static_cast<double>(t.data_dim);
  for (std::size_t n = 1; n <= steps; ++n) {
    std::vector<double> cma, net;
    for (const auto& r : t.trials) {
      cma.push_back(static_cast<double>(r.bits_total(n)) / (static_cast<double>(n) * d));
      std::int64_t sum = 0;
      for (std::size_t k = 0; k < n; ++k) sum += r.net_bits[k];
      net.push_back(static_cast<double>(sum) / (static_cast<double>(n) * d));
    }
    t.cma_mean.push_back(mean_of(cma));
    t.cma_sd.push_back(sd_of(cma));
    t.net_rate_mean.push_back(mean_of(net));
  }
  t.mean_net_bits_per_dim = t.net_rate_mean.back();
  std::vector<double> first;
  for (const auto& r : t.trials) first.push_back(static_cast<double>(r.initial_required.front()));
  t.initial_bits_mean = mean_of(first);
  t.initial_bits_sd = sd_of(first);
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial, std::uint64_t index) {
  // splitmix64 finalizer over a combined key.
  std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (trial + 1) + 0xbf58476d1ce4e5b9ULL * index;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<LayerValues> trial_dataset(const ChainModel& model, std::uint64_t base_seed,
                                       std::size_t trial, std::size_t n) {
  std::vector<LayerValues> data;
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    data.push_back(sample_ancestral(model, trial_seed(base_seed, trial, i + 1)).x);
  return data;
}

CmaTable run_cma_experiment(const ChainModel& model, SchemeId scheme, std::size_t n_datapoints,
                            std::size_t n_trials, std::size_t seed_words, std::uint64_t base_seed) {
  if (n_datapoints < 1 || n_trials < 1) throw std::invalid_argument("empty experiment");
  CmaTable t;
  t.scheme = scheme;
  t.data_dim = model.data_dim();
  for (std::size_t trial = 0; trial < n_trials; ++trial) {
    const auto data = trial_dataset(model, base_seed, trial, n_datapoints);
    try {
      const auto res =
          chain_compress(model, scheme, data, seed_words, trial_seed(base_seed, trial, 0));
      t.trials.push_back(record_trial(res.trace));
    } catch (const StreamExhausted& e) {
      throw StreamExhausted("trial " + std::to_string(trial) + ", " + e.what());
    }
  }
  summarize(t);
  return t;
}

std::vector<InitialBitsRow> compare_initial_bits(const std::vector<ChainModel>& models,
                                                 const std::vector<SchemeId>& schemes,
                                                 std::size_t n_datapoints, std::size_t seed_words,
                                                 std::uint64_t base_seed) {
  std::vector<InitialBitsRow> rows;
  for (const auto& m : models) {
    const auto data = trial_dataset(m, base_seed, 0, n_datapoints);
    for (auto scheme : schemes) {
      std::vector<double> bits;
      for (std::size_t i = 0; i < data.size(); ++i) {
        CoderState coder;
        coder.seed_buffer(seed_words, trial_seed(base_seed, 0, i + 1) ^ 0xa5a5a5a5a5a5a5a5ULL);
        DatapointTrace trace;
        encode_datapoint(m, scheme, coder, data[i], &trace);
        bits.push_back(static_cast<double>(initial_bits_required(trace)));
      }
      rows.push_back({m.depth(), scheme, mean_of(bits), sd_of(bits), bits.size()});
    }
  }
  return rows;
}

OracleReport oracle_check(const ChainModel& model, SchemeId scheme, std::size_t n_datapoints,
                          std::size_t seed_words, std::uint64_t base_seed) {
  if (model.family() != Family::Tabular)
    throw std::invalid_argument("oracle_check needs a tabular model");
  const auto data = trial_dataset(model, base_seed, 0, n_datapoints);
  const auto res = chain_compress(model, scheme, data, seed_words, trial_seed(base_seed, 0, 0));
  OracleReport r;
  r.n_datapoints = n_datapoints;
  r.scheme = scheme;
  const double dims = static_cast<double>(n_datapoints * model.data_dim());
  double net = 0.0, elbo = 0.0, px = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    net += static_cast<double>(res.trace.datapoints[i].net_bits());
    elbo += elbo_bits(model, data[i]).bits;
    px += exact_log_marginal(model, data[i]);
  }
  r.net_bits_per_dim = net / dims;
  r.neg_elbo_per_dim = elbo / dims;
  r.neg_log_px_per_dim = px / dims;
  r.kl_gap_per_dim = r.neg_elbo_per_dim - r.neg_log_px_per_dim;
  r.flagged = std::abs(r.net_bits_per_dim - r.neg_elbo_per_dim) > kOracleTolerance;
  return r;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_field(std::string_view s) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError("bad CSV field '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::vector<CmaCsvRow> cma_rows(const CmaTable& table) {
  std::vector<CmaCsvRow> rows;
  const double d = static_cast<double>(table.data_dim);
  for (std::size_t t = 0; t < table.trials.size(); ++t) {
    const auto& r = table.trials[t];
    for (std::size_t n = 1; n <= r.bits_after.size(); ++n) {
      const auto total = r.bits_total(n);
      rows.push_back({t, n, total, r.net_bits[n - 1],
                      static_cast<double>(total) / (static_cast<double>(n) * d),
                      r.initial_consumed[n - 1]});
    }
  }
  return rows;
}

void export_csv(const CmaTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kCmaCsvHeader << '\n';
  for (const auto& r : cma_rows(table))
    out << r.trial << ',' << r.timestep << ',' << r.bits_total << ',' << r.bits_net << ','
        << format_double(r.cma_bits_per_dim) << ',' << r.initial_bits << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<CmaCsvRow> parse_cma_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCmaCsvHeader) throw FormatError("unexpected CSV header");
  std::vector<CmaCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (std::size_t at; (at = rest.find(',')) != std::string_view::npos; rest.remove_prefix(at + 1))
      f.push_back(rest.substr(0, at));
    f.push_back(rest);
    if (f.size() != 6) throw FormatError("CSV row with " + std::to_string(f.size()) + " fields");
    rows.push_back({parse_field<std::size_t>(f[0]), parse_field<std::size_t>(f[1]),
                    parse_field<std::uint64_t>(f[2]), parse_field<std::int64_t>(f[3]),
                    parse_field<double>(f[4]), parse_field<std::uint64_t>(f[5])});
  }
  return rows;
}

void export_trace_csv(const std::vector<EncodeTrace>& traces, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "trial,datapoint,bits_before,bits_after,min_bits_during\n";
  for (std::size_t t = 0; t < traces.size(); ++t)
    for (std::size_t i = 0; i < traces[t].datapoints.size(); ++i) {
      const auto& d = traces[t].datapoints[i];
      out << t << ',' << i << ',' << d.bits_before << ',' << d.bits_after << ','
          << d.min_bits_during << '\n';
    }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace bitswap
