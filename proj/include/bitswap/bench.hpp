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

// Experiment harness: cumulative moving averages of stream length over
// chained datapoints, initial-bits comparisons across depths, and oracle
// cross-checks of the net bitrate.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bitswap/latent_model.hpp"
#include "bitswap/schemes.hpp"

namespace bitswap {

enum class ExperimentKind { Cma, InitialBits, Oracle };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Cma;
  std::vector<std::filesystem::path> models;
  std::vector<SchemeId> schemes{SchemeId::BBANS, SchemeId::BITSWAP};
  std::size_t n_datapoints = 100;
  std::size_t n_trials = 100;
  std::size_t seed_words = 64;
  std::uint64_t base_seed = 0;
  std::filesystem::path output;

  /// Throws std::invalid_argument on counts below one or a missing model.
  void validate() const;
};

/// JSON object with keys kind ("cma" | "initial_bits" | "oracle"), model or
/// models, schemes, n_datapoints, n_trials, seed_words, base_seed, output.
/// Relative paths are resolved against `base_dir`. Throws FormatError.
ExperimentConfig parse_experiment_config(std::string_view text,
                                         const std::filesystem::path& base_dir = {});

/// Raw per-trial lengths, one entry per timestep n = 1..N.
struct TrialRecord {
  std::uint64_t initial_len_bits = 0;
  std::vector<std::uint64_t> bits_after;       // stream length after datapoint n
  std::vector<std::int64_t> net_bits;          // growth caused by datapoint n
  std::vector<std::uint64_t> initial_consumed; // deepest dip below the seeded length so far
  std::vector<std::uint64_t> initial_required; // initial_bits_required of datapoint n

  /// Stream bits attributable to the first n datapoints, counting only the
  /// initial bits actually consumed.
  std::uint64_t bits_total(std::size_t n) const;
};

struct CmaTable {
  SchemeId scheme = SchemeId::BITSWAP;
  std::size_t data_dim = 0;
  std::vector<TrialRecord> trials;

  // Derived from `trials` by summarize().
  std::vector<double> cma_mean;       // bits/dim, per timestep
  std::vector<double> cma_sd;         // across trials
  std::vector<double> net_rate_mean;  // running mean net bits/dim up to n, averaged over trials
  double mean_net_bits_per_dim = 0.0;
  double initial_bits_mean = 0.0;     // first datapoint, across trials
  double initial_bits_sd = 0.0;
};

/// Recomputes every derived field of `table` from its trials.
void summarize(CmaTable& table);

/// Deterministic per-trial seeds shared by every scheme.
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial, std::uint64_t index);

/// Dataset of `n` ancestral samples for one trial.
std::vector<LayerValues> trial_dataset(const ChainModel& model, std::uint64_t base_seed,
                                       std::size_t trial, std::size_t n);

CmaTable run_cma_experiment(const ChainModel& model, SchemeId scheme, std::size_t n_datapoints,
                            std::size_t n_trials, std::size_t seed_words, std::uint64_t base_seed);

struct InitialBitsRow {
  int depth = 0;
  SchemeId scheme = SchemeId::BITSWAP;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};

/// Initial bits of single datapoints on fresh seeded coders, n_datapoints per
/// model and scheme.
std::vector<InitialBitsRow> compare_initial_bits(const std::vector<ChainModel>& models,
                                                 const std::vector<SchemeId>& schemes,
                                                 std::size_t n_datapoints, std::size_t seed_words,
                                                 std::uint64_t base_seed);

inline constexpr double kOracleTolerance = 0.01;  // bits/dim

struct OracleReport {
  std::size_t n_datapoints = 0;
  SchemeId scheme = SchemeId::BITSWAP;
  double net_bits_per_dim = 0.0;
  double neg_elbo_per_dim = 0.0;
  double neg_log_px_per_dim = 0.0;
  double kl_gap_per_dim = 0.0;
  bool flagged = false;  // |net - (-ELBO)| > kOracleTolerance
};

/// Tabular models only.
OracleReport oracle_check(const ChainModel& model, SchemeId scheme, std::size_t n_datapoints,
                          std::size_t seed_words, std::uint64_t base_seed);

inline constexpr std::string_view kCmaCsvHeader =
    "trial,timestep,bits_total,bits_net,cma_bits_per_dim,initial_bits";

struct CmaCsvRow {
  std::size_t trial = 0;
  std::size_t timestep = 0;
  std::uint64_t bits_total = 0;
  std::int64_t bits_net = 0;
  double cma_bits_per_dim = 0.0;
  std::uint64_t initial_bits = 0;

  bool operator==(const CmaCsvRow&) const = default;
};

std::vector<CmaCsvRow> cma_rows(const CmaTable& table);
void export_csv(const CmaTable& table, const std::filesystem::path& path);
/// Throws FormatError on a wrong header or malformed row.
std::vector<CmaCsvRow> parse_cma_csv(std::string_view text);

/// Per-datapoint coder trace: trial, datapoint, bits_before, bits_after,
/// min_bits_during.
void export_trace_csv(const std::vector<EncodeTrace>& traces, const std::filesystem::path& path);

}  // namespace bitswap
