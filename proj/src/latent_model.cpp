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

#include "bitswap/latent_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace bitswap {
namespace {

const BinGrid& pixel_grid() {
  static const BinGrid grid = uniform_grid(-0.5, 255.5, ChainModel::kPixelLevels);
  return grid;
}

void expect_shape(const TabularConditional& c, std::size_t child_alphabet, std::size_t child_dims,
                  std::size_t parent_alphabet, std::size_t parent_dims, const char* what) {
  c.validate();
  const bool ok = c.child_alphabet == child_alphabet && c.dims.size() == child_dims &&
                  c.parent_alphabets == std::vector<std::size_t>(parent_dims, parent_alphabet);
  if (!ok) throw std::invalid_argument(std::string("tabular conditional shape mismatch: ") + what);
}

void expect_shape(const AffineMap& m, std::size_t in, std::size_t out, const char* what) {
  m.validate();
  if (m.in != in || m.out != out)
    throw std::invalid_argument(std::string("affine map shape mismatch: ") + what);
}

}  // namespace

void AffineMap::validate() const {
  const bool sizes = w_mu.size() == in * out && w_log_scale.size() == in * out &&
                     b_mu.size() == out && b_log_scale.size() == out;
  if (!sizes || out == 0) throw std::invalid_argument("affine map size mismatch");
  for (const auto* v : {&w_mu, &b_mu, &w_log_scale, &b_log_scale})
    for (double x : *v)
      if (!std::isfinite(x)) throw std::invalid_argument("affine map parameter not finite");
}

LogisticParams AffineMap::apply(std::size_t row, std::span<const double> input) const {
  double mu = b_mu[row];
  double log_scale = b_log_scale[row];
  const double* wm = w_mu.data() + row * in;
  const double* ws = w_log_scale.data() + row * in;
  for (std::size_t j = 0; j < in; ++j) {
    mu += wm[j] * input[j];
    log_scale += ws[j] * input[j];
  }
  log_scale = std::clamp(log_scale, kMinLogScale, kMaxLogScale);
  return {mu, std::exp(log_scale)};
}

ChainModel ChainModel::tabular(std::size_t data_dim, std::vector<std::size_t> layer_dims,
                               int precision_bits, TabularParams params,
                               std::uint64_t sampling_seed) {
  const std::size_t depth = layer_dims.size();
  if (depth < 1) throw std::invalid_argument("model depth must be >= 1");
  if (data_dim < 1) throw std::invalid_argument("data dimension must be >= 1");
  if (params.latent_alphabets.size() != depth)
    throw std::invalid_argument("one latent alphabet per layer required");
  if (params.generative.size() != depth - 1 || params.inference.size() != depth)
    throw std::invalid_argument("tabular conditional count mismatch");
  const auto& a = params.latent_alphabets;
  expect_shape(params.observation, params.x_alphabet, data_dim, a[0], layer_dims[0], "p(x|z1)");
  for (std::size_t i = 1; i < depth; ++i)
    expect_shape(params.generative[i - 1], a[i - 1], layer_dims[i - 1], a[i], layer_dims[i],
                 "p(z_i|z_i+1)");
  expect_shape(params.prior, a[depth - 1], layer_dims[depth - 1], 1, 0, "p(z_L)");
  expect_shape(params.inference[0], a[0], layer_dims[0], params.x_alphabet, data_dim, "q(z1|x)");
  for (std::size_t i = 1; i < depth; ++i)
    expect_shape(params.inference[i], a[i], layer_dims[i], a[i - 1], layer_dims[i - 1],
                 "q(z_i+1|z_i)");

  ChainModel m;
  m.family_ = Family::Tabular;
  m.data_dim_ = data_dim;
  m.layer_dims_ = std::move(layer_dims);
  m.precision_bits_ = precision_bits;
  m.sampling_seed_ = sampling_seed;
  m.observation_ = QuantizedConditional(params.observation, precision_bits);
  for (const auto& c : params.generative) m.generative_.emplace_back(c, precision_bits);
  m.prior_ = QuantizedConditional(params.prior, precision_bits);
  for (const auto& c : params.inference) m.inference_.emplace_back(c, precision_bits);
  m.params_ = std::move(params);
  return m;
}

ChainModel ChainModel::affine_logistic(std::size_t data_dim, std::vector<std::size_t> layer_dims,
                                       int precision_bits, AffineParams params,
                                       std::vector<BinGrid> grids, std::uint64_t sampling_seed) {
  const std::size_t depth = layer_dims.size();
  if (depth < 1) throw std::invalid_argument("model depth must be >= 1");
  if (data_dim < 1) throw std::invalid_argument("data dimension must be >= 1");
  if (grids.size() != depth) throw std::invalid_argument("one bin grid per latent layer required");
  if (params.generative.size() != depth - 1 || params.inference.size() != depth)
    throw std::invalid_argument("affine map count mismatch");
  for (std::size_t d : layer_dims)
    if (d < 1) throw std::invalid_argument("latent layers need at least one dimension");
  expect_shape(params.observation, layer_dims[0], data_dim, "p(x|z1)");
  for (std::size_t i = 1; i < depth; ++i)
    expect_shape(params.generative[i - 1], layer_dims[i], layer_dims[i - 1], "p(z_i|z_i+1)");
  expect_shape(params.inference[0], data_dim, layer_dims[0], "q(z1|x)");
  for (std::size_t i = 1; i < depth; ++i)
    expect_shape(params.inference[i], layer_dims[i - 1], layer_dims[i], "q(z_i+1|z_i)");
  for (const auto& g : grids)
    if ((std::size_t{1} << precision_bits) < g.size())
      throw std::invalid_argument("more bins than precision total");

  ChainModel m;
  m.family_ = Family::AffineLogistic;
  m.data_dim_ = data_dim;
  m.layer_dims_ = std::move(layer_dims);
  m.precision_bits_ = precision_bits;
  m.sampling_seed_ = sampling_seed;
  m.grids_ = std::move(grids);
  m.params_ = std::move(params);
  const auto top = discretize_density(LogisticParams{0.0, 1.0}, m.grids_.back(), precision_bits);
  m.prior_cache_.assign(m.layer_dims_.back(), top);
  return m;
}

std::size_t ChainModel::layer_dim(int layer) const {
  if (layer < 0 || layer > depth()) throw std::out_of_range("layer index out of range");
  return layer == 0 ? data_dim_ : layer_dims_[static_cast<std::size_t>(layer - 1)];
}

std::size_t ChainModel::alphabet(int layer) const {
  if (layer < 0 || layer > depth()) throw std::out_of_range("layer index out of range");
  if (family_ == Family::Tabular) {
    const auto& p = tabular_params();
    return layer == 0 ? p.x_alphabet : p.latent_alphabets[static_cast<std::size_t>(layer - 1)];
  }
  return layer == 0 ? kPixelLevels : grids_[static_cast<std::size_t>(layer - 1)].size();
}

const TabularParams& ChainModel::tabular_params() const {
  if (family_ != Family::Tabular) throw std::logic_error("model is not tabular");
  return std::get<TabularParams>(params_);
}

const AffineParams& ChainModel::affine_params() const {
  if (family_ != Family::AffineLogistic) throw std::logic_error("model is not affine-logistic");
  return std::get<AffineParams>(params_);
}

void ChainModel::check_layer_values(int layer, std::span<const int> values) const {
  if (values.size() != layer_dim(layer))
    throw std::invalid_argument("layer " + std::to_string(layer) + " expects " +
                                std::to_string(layer_dim(layer)) + " values");
  const auto a = static_cast<int>(alphabet(layer));
  for (int v : values)
    if (v < 0 || v >= a)
      throw std::out_of_range("value " + std::to_string(v) + " outside layer " +
                              std::to_string(layer) + " alphabet");
}

std::vector<double> ChainModel::affine_input(int layer, std::span<const int> values) const {
  std::vector<double> in(values.size());
  if (layer == 0) {
    for (std::size_t j = 0; j < values.size(); ++j) in[j] = values[j] / 127.5 - 1.0;
  } else {
    const BinGrid& g = grids_[static_cast<std::size_t>(layer - 1)];
    for (std::size_t j = 0; j < values.size(); ++j)
      in[j] = bin_representative(static_cast<std::size_t>(values[j]), g);
  }
  return in;
}

LayerTables ChainModel::affine_tables(const AffineMap& map, std::span<const double> input,
                                      const BinGrid& grid) const {
  LayerTables out;
  out.reserve(map.out);
  for (std::size_t d = 0; d < map.out; ++d)
    out.push_back(discretize_density(map.apply(d, input), grid, precision_bits_));
  return out;
}

LayerTables ChainModel::prior_tables() const {
  if (family_ == Family::Tabular) return prior_.tables({});
  return prior_cache_;
}

LayerTables ChainModel::generative_tables(int layer, std::span<const int> parent) const {
  if (layer < 0 || layer >= depth()) throw std::out_of_range("generative layer out of range");
  check_layer_values(layer + 1, parent);
  if (family_ == Family::Tabular) {
    return layer == 0 ? observation_.tables(parent)
                      : generative_[static_cast<std::size_t>(layer - 1)].tables(parent);
  }
  const auto& p = affine_params();
  const auto input = affine_input(layer + 1, parent);
  if (layer == 0) return affine_tables(p.observation, input, pixel_grid());
  return affine_tables(p.generative[static_cast<std::size_t>(layer - 1)], input,
                       grids_[static_cast<std::size_t>(layer - 1)]);
}

LayerTables ChainModel::inference_tables(int layer, std::span<const int> child) const {
  if (layer < 1 || layer > depth()) throw std::out_of_range("inference layer out of range");
  check_layer_values(layer - 1, child);
  const auto idx = static_cast<std::size_t>(layer - 1);
  if (family_ == Family::Tabular) return inference_[idx].tables(child);
  const auto input = affine_input(layer - 1, child);
  return affine_tables(affine_params().inference[idx], input, grids_[idx]);
}

bool ChainModel::operator==(const ChainModel& other) const {
  return family_ == other.family_ && data_dim_ == other.data_dim_ &&
         layer_dims_ == other.layer_dims_ && precision_bits_ == other.precision_bits_ &&
         sampling_seed_ == other.sampling_seed_ && grids_ == other.grids_ &&
         params_ == other.params_;
}

std::size_t sample_symbol(const FrequencyTable& table, std::uint64_t draw) {
  return table.find(static_cast<std::uint32_t>(draw >> (64 - table.precision_bits())));
}

ChainSample sample_ancestral(const ChainModel& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int depth = model.depth();
  ChainSample out;
  out.z.resize(static_cast<std::size_t>(depth));
  auto draw_layer = [&](const LayerTables& tables) {
    LayerValues v(tables.size());
    for (std::size_t d = 0; d < tables.size(); ++d)
      v[d] = static_cast<int>(sample_symbol(tables[d], rng()));
    return v;
  };
  out.z[static_cast<std::size_t>(depth - 1)] = draw_layer(model.prior_tables());
  for (int i = depth - 1; i >= 1; --i)
    out.z[static_cast<std::size_t>(i - 1)] =
        draw_layer(model.generative_tables(i, out.z[static_cast<std::size_t>(i)]));
  out.x = draw_layer(model.generative_tables(0, out.z[0]));
  return out;
}

std::size_t layer_configurations(const ChainModel& model, int layer) {
  const std::size_t a = model.alphabet(layer);
  std::size_t n = 1;
  for (std::size_t d = 0; d < model.layer_dim(layer); ++d) {
    if (n > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
    n *= a;
  }
  return n;
}

namespace {

// Joint configuration index <-> per-dimension values, first dimension least
// significant.
LayerValues decode_config(std::size_t idx, std::size_t alphabet, std::size_t dims) {
  LayerValues v(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    v[d] = static_cast<int>(idx % alphabet);
    idx /= alphabet;
  }
  return v;
}

// Probability and information content of a full layer configuration under
// per-dimension tables.
double layer_info(const LayerTables& tables, std::span<const int> values) {
  double bits = 0.0;
  for (std::size_t d = 0; d < tables.size(); ++d)
    bits += tables[d].info_bits(static_cast<std::size_t>(values[d]));
  return bits;
}

double layer_prob(const LayerTables& tables, std::span<const int> values) {
  double p = 1.0;
  for (std::size_t d = 0; d < tables.size(); ++d)
    p *= tables[d].probability(static_cast<std::size_t>(values[d]));
  return p;
}

bool exact_elbo_feasible(const ChainModel& model) {
  std::size_t prev = layer_configurations(model, 1);
  if (prev > kExactLayerBudget) return false;
  for (int i = 2; i <= model.depth(); ++i) {
    const std::size_t cur = layer_configurations(model, i);
    if (cur > kExactLayerBudget || prev * cur > kExactElboBudget) return false;
    prev = cur;
  }
  return true;
}

ElboEstimate elbo_exact(const ChainModel& model, std::span<const int> x) {
  const int depth = model.depth();
  // Marginal of q over the current layer, carried down the inference chain.
  const std::size_t s1 = layer_configurations(model, 1);
  const LayerTables q1 = model.inference_tables(1, x);
  std::vector<LayerValues> configs(s1);
  std::vector<double> marginal(s1);
  double neg_elbo = 0.0;
  for (std::size_t c = 0; c < s1; ++c) {
    configs[c] = decode_config(c, model.alphabet(1), model.layer_dim(1));
    marginal[c] = layer_prob(q1, configs[c]);
    const double info_obs = layer_info(model.generative_tables(0, configs[c]), x);
    neg_elbo += marginal[c] * (info_obs - layer_info(q1, configs[c]));
  }
  for (int i = 1; i < depth; ++i) {
    const std::size_t s_next = layer_configurations(model, i + 1);
    std::vector<LayerValues> next_configs(s_next);
    std::vector<LayerTables> gen(s_next);
    for (std::size_t c = 0; c < s_next; ++c) {
      next_configs[c] = decode_config(c, model.alphabet(i + 1), model.layer_dim(i + 1));
      gen[c] = model.generative_tables(i, next_configs[c]);
    }
    std::vector<double> next_marginal(s_next, 0.0);
    for (std::size_t c = 0; c < configs.size(); ++c) {
      if (marginal[c] == 0.0) continue;
      const LayerTables q = model.inference_tables(i + 1, configs[c]);
      for (std::size_t n = 0; n < s_next; ++n) {
        const double w = marginal[c] * layer_prob(q, next_configs[n]);
        neg_elbo += w * (layer_info(gen[n], configs[c]) - layer_info(q, next_configs[n]));
        next_marginal[n] += w;
      }
    }
    configs = std::move(next_configs);
    marginal = std::move(next_marginal);
  }
  const LayerTables prior = model.prior_tables();
  for (std::size_t c = 0; c < configs.size(); ++c)
    neg_elbo += marginal[c] * layer_info(prior, configs[c]);
  return {neg_elbo, 0.0, true};
}

ElboEstimate elbo_monte_carlo(const ChainModel& model, std::span<const int> x) {
  std::mt19937_64 rng(model.sampling_seed() ^ 0x9e3779b97f4a7c15ULL);
  const int depth = model.depth();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < kMonteCarloSamples; ++s) {
    double w = 0.0;
    LayerValues prev(x.begin(), x.end());
    LayerValues cur;
    for (int i = 1; i <= depth; ++i) {
      const LayerTables q = model.inference_tables(i, prev);
      cur.resize(q.size());
      for (std::size_t d = 0; d < q.size(); ++d)
        cur[d] = static_cast<int>(sample_symbol(q[d], rng()));
      w -= layer_info(q, cur);
      w += layer_info(model.generative_tables(i - 1, cur), prev);
      prev = cur;
    }
    w += layer_info(model.prior_tables(), prev);
    sum += w;
    sum_sq += w * w;
  }
  const double n = static_cast<double>(kMonteCarloSamples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n), false};
}

}  // namespace

ElboEstimate elbo_bits(const ChainModel& model, std::span<const int> x) {
  if (x.size() != model.data_dim()) throw std::invalid_argument("datapoint dimension mismatch");
  if (exact_elbo_feasible(model)) return elbo_exact(model, x);
  return elbo_monte_carlo(model, x);
}

double exact_log_marginal(const ChainModel& model, std::span<const int> x) {
  if (model.family() != Family::Tabular)
    throw std::invalid_argument("exact_log_marginal requires a tabular model");
  if (x.size() != model.data_dim()) throw std::invalid_argument("datapoint dimension mismatch");
  const int depth = model.depth();
  // Generative marginals from the top: p(z_i) = sum p(z_i | z_{i+1}) p(z_{i+1}).
  std::size_t s = layer_configurations(model, depth);
  std::vector<double> marginal(s);
  const LayerTables prior = model.prior_tables();
  for (std::size_t c = 0; c < s; ++c)
    marginal[c] = layer_prob(prior, decode_config(c, model.alphabet(depth), model.layer_dim(depth)));
  for (int i = depth - 1; i >= 1; --i) {
    const std::size_t s_child = layer_configurations(model, i);
    std::vector<LayerValues> child(s_child);
    for (std::size_t c = 0; c < s_child; ++c)
      child[c] = decode_config(c, model.alphabet(i), model.layer_dim(i));
    std::vector<double> next(s_child, 0.0);
    for (std::size_t p = 0; p < s; ++p) {
      if (marginal[p] == 0.0) continue;
      const LayerTables t = model.generative_tables(
          i, decode_config(p, model.alphabet(i + 1), model.layer_dim(i + 1)));
      for (std::size_t c = 0; c < s_child; ++c) next[c] += marginal[p] * layer_prob(t, child[c]);
    }
    marginal = std::move(next);
    s = s_child;
  }
  double px = 0.0;
  for (std::size_t c = 0; c < s; ++c) {
    const LayerValues z1 = decode_config(c, model.alphabet(1), model.layer_dim(1));
    px += marginal[c] * layer_prob(model.generative_tables(0, z1), x);
  }
  return -std::log2(px);
}

double kl_gap_bits(const ChainModel& model, std::span<const int> x) {
  if (model.family() != Family::Tabular)
    throw std::invalid_argument("kl_gap_bits requires a tabular model");
  return elbo_bits(model, x).bits - exact_log_marginal(model, x);
}

std::vector<LayerEntropy> layer_entropies(const ChainModel& model, std::size_t n_samples,
                                          std::uint64_t seed) {
  const int depth = model.depth();
  std::vector<LayerEntropy> out(static_cast<std::size_t>(depth + 1));
  auto sum = [](const LayerTables& tables) {
    double h = 0.0;
    for (const auto& t : tables) h += entropy_bits(t);
    return h;
  };
  for (std::size_t n = 0; n < n_samples; ++n) {
    const auto s = sample_ancestral(model, seed + n);
    auto layer = [&](int i) -> const LayerValues& {
      return i == 0 ? s.x : s.z[static_cast<std::size_t>(i - 1)];
    };
    for (int i = 0; i <= depth; ++i) {
      auto& e = out[static_cast<std::size_t>(i)];
      e.generative_bits += sum(i == depth ? model.prior_tables()
                                          : model.generative_tables(i, layer(i + 1)));
      if (i > 0) e.inference_bits += sum(model.inference_tables(i, layer(i - 1)));
    }
  }
  for (auto& e : out) {
    e.generative_bits /= static_cast<double>(n_samples);
    e.inference_bits /= static_cast<double>(n_samples);
  }
  return out;
}

}  // namespace bitswap
