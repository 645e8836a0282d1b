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

// bitswap: command-line front end for the compression library.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "bitswap/bench.hpp"
#include "bitswap/container.hpp"
#include "bitswap/error.hpp"
#include "bitswap/model_io.hpp"
#include "bitswap/schemes.hpp"

namespace fs = std::filesystem;
using namespace bitswap;

namespace {

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const fs::path& path) {
  const auto b = read_bytes(path);
  return {b.begin(), b.end()};
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Shape of the observed variable for either model kind.
struct DataShape {
  std::size_t dim = 0;
  std::size_t alphabet = 0;
  std::size_t latents = 0;
};

DataShape data_shape(const AnyModel& model) {
  if (const auto* chain = std::get_if<ChainModel>(&model))
    return {chain->data_dim(), chain->alphabet(0), static_cast<std::size_t>(chain->depth())};
  const auto& tree = std::get<TabularTreeModel>(model);
  return {tree.variables()[0].dims, tree.variables()[0].alphabet, tree.variables().size() - 1};
}

Schedule tree_schedule(const TabularTreeModel& tree, SchemeId scheme) {
  return scheme == SchemeId::BITSWAP ? compile_schedule(tree.topology())
                                     : decode_first_schedule(tree.topology());
}

std::vector<LayerValues> split_input(std::span<const std::uint8_t> bytes, const DataShape& shape) {
  if (bytes.empty()) throw FormatError("input is empty");
  if (bytes.size() % shape.dim != 0)
    throw FormatError("input size " + std::to_string(bytes.size()) +
                      " is not a multiple of the data dimension " + std::to_string(shape.dim));
  std::vector<LayerValues> data;
  for (std::size_t at = 0; at < bytes.size(); at += shape.dim) {
    LayerValues x(bytes.begin() + static_cast<long>(at),
                  bytes.begin() + static_cast<long>(at + shape.dim));
    for (std::size_t d = 0; d < x.size(); ++d)
      if (static_cast<std::size_t>(x[d]) >= shape.alphabet)
        throw FormatError("byte " + std::to_string(at + d) + " holds symbol " +
                          std::to_string(x[d]) + ", outside the alphabet of " +
                          std::to_string(shape.alphabet));
    data.push_back(std::move(x));
  }
  return data;
}

struct CompressArgs {
  fs::path model, input, output;
  std::string scheme = "bitswap";
  std::size_t seed_words = 64;
  std::uint64_t seed = 0;
};

int cmd_compress(const CompressArgs& a) {
  const auto model = load_any_model(a.model);
  const auto scheme = parse_scheme(a.scheme);
  const auto shape = data_shape(model);
  const auto data = split_input(read_bytes(a.input), shape);
  if (data.size() > UINT32_MAX) throw FormatError("too many datapoints for one container");

  CompressResult res =
      std::holds_alternative<ChainModel>(model)
          ? chain_compress(std::get<ChainModel>(model), scheme, data, a.seed_words, a.seed)
          : graph_compress(std::get<TabularTreeModel>(model),
                           tree_schedule(std::get<TabularTreeModel>(model), scheme), data,
                           a.seed_words, a.seed);

  Container c;
  c.header.scheme = scheme;
  c.header.model_hash = model_hash(model);
  c.header.depth = static_cast<std::uint8_t>(shape.latents);
  c.header.n_datapoints = static_cast<std::uint32_t>(data.size());
  c.header.n_seed_words = static_cast<std::uint32_t>(a.seed_words);
  c.header.seed = a.seed;
  c.payload = coder_payload(res.coder);
  const auto bytes = write_container(c);
  write_bytes(a.output, bytes);

  std::int64_t net = 0;
  std::uint64_t lowest = res.trace.initial_len_bits;
  for (const auto& d : res.trace.datapoints) {
    net += d.net_bits();
    lowest = std::min(lowest, d.min_bits_during);
  }
  const double dims = static_cast<double>(data.size() * shape.dim);
  std::printf("scheme %s\n", scheme_name(scheme).c_str());
  std::printf("datapoints %zu\n", data.size());
  std::printf("net_bits_per_dim %.6f\n", static_cast<double>(net) / dims);
  std::printf("initial_bits %llu\n",
              static_cast<unsigned long long>(res.trace.initial_len_bits - lowest));
  std::printf("container_bytes %zu\n", bytes.size());
  return 0;
}

struct DecompressArgs {
  fs::path model, input, output;
};

int cmd_decompress(const DecompressArgs& a) {
  const auto c = read_container(read_bytes(a.input));
  const auto model = load_any_model(a.model);
  if (model_hash(model) != c.header.model_hash)
    throw FormatError("model hash mismatch: the container was written with a different model");
  const auto shape = data_shape(model);
  if (c.header.depth != shape.latents)
    throw FormatError("container records " + std::to_string(c.header.depth) +
                      " latent variables, model has " + std::to_string(shape.latents));

  auto coder = coder_from_payload(c.payload);
  const auto data =
      std::holds_alternative<ChainModel>(model)
          ? chain_decompress(std::get<ChainModel>(model), c.header.scheme, coder,
                             c.header.n_datapoints)
          : graph_decompress(std::get<TabularTreeModel>(model),
                             tree_schedule(std::get<TabularTreeModel>(model), c.header.scheme),
                             coder, c.header.n_datapoints);

  CoderState initial;
  initial.seed_buffer(c.header.n_seed_words, c.header.seed);
  if (coder_payload(coder) != coder_payload(initial))
    throw CorruptStream("integrity check failed: residual stream differs from the seeded buffer");

  std::vector<std::uint8_t> out;
  out.reserve(data.size() * shape.dim);
  for (const auto& x : data)
    for (int v : x) out.push_back(static_cast<std::uint8_t>(v));
  write_bytes(a.output, out);
  std::printf("datapoints %zu\n", data.size());
  return 0;
}

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    const auto v = std::stoul(item, &used);
    if (used != item.size() || v == 0) throw std::invalid_argument("bad --dims entry '" + item + "'");
    dims.push_back(v);
  }
  if (dims.empty()) throw std::invalid_argument("--dims is empty");
  return dims;
}

struct GenArgs {
  std::string family = "tabular";
  std::string dims = "1";
  std::string inference = "exact";
  bool untied = false;
  fs::path out;
  GenSpec spec;
};

int cmd_gen_model(GenArgs a) {
  a.spec.kind = parse_model_kind(a.family);
  a.spec.layer_dims = parse_dims(a.dims);
  a.spec.inference = parse_inference_mode(a.inference);
  a.spec.tied = !a.untied;
  const auto model = gen_model(a.spec);
  save_model(model, a.out);
  return 0;
}

std::string hex(std::span<const std::uint8_t> bytes) {
  std::string s;
  char buf[3];
  for (auto b : bytes) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    s += buf;
  }
  return s;
}

void inspect_chain(const ChainModel& m) {
  const bool tab = m.family() == Family::Tabular;
  std::printf("family %s\n", tab ? "tabular" : "affine-logistic");
  std::printf("latent_layers %d\n", m.depth());
  std::printf("data_dim %zu\n", m.data_dim());
  std::printf("precision_bits %d\n", m.precision_bits());
  const auto h = layer_entropies(m, 256, m.sampling_seed());
  std::printf("layer  dims  alphabet  H(p)/bits  H(q)/bits\n");
  for (int i = 0; i <= m.depth(); ++i) {
    const auto& e = h[static_cast<std::size_t>(i)];
    std::printf("%-5s  %4zu  %8zu  %9.4f  %9.4f\n",
                i == 0 ? "x" : ("z" + std::to_string(i)).c_str(), m.layer_dim(i), m.alphabet(i),
                e.generative_bits, e.inference_bits);
  }
  for (std::size_t g = 0; g < m.grids().size(); ++g) {
    const auto& grid = m.grids()[g];
    const auto e = grid.edges();
    double narrow = 0.0, wide = 0.0;
    for (std::size_t k = 1; k < e.size(); ++k) {
      const double w = e[k] - e[k - 1];
      narrow = k == 1 ? w : std::min(narrow, w);
      wide = std::max(wide, w);
    }
    std::printf("grid z%zu: %zu bins, interior edges [%.6g, %.6g], interior width [%.6g, %.6g]\n",
                g + 1, grid.size(), e.empty() ? 0.0 : e.front(), e.empty() ? 0.0 : e.back(),
                narrow, wide);
  }
}

void inspect_tree(const TabularTreeModel& m) {
  std::printf("family tabular-tree\n");
  std::printf("latent_layers %zu\n", m.variables().size() - 1);
  std::printf("precision_bits %d\n", m.precision_bits());
  const auto& topo = m.topology();
  for (std::size_t v = 0; v < m.variables().size(); ++v) {
    const auto& var = m.variables()[v];
    std::string gp, ip;
    for (int p : topo.generative_parents[v]) gp += (gp.empty() ? "" : ",") + topo.names[static_cast<std::size_t>(p)];
    for (int p : topo.inference_parents[v]) ip += (ip.empty() ? "" : ",") + topo.names[static_cast<std::size_t>(p)];
    std::printf("%-4s dims %zu alphabet %zu p-parents {%s} q-parents {%s}\n", var.name.c_str(),
                var.dims, var.alphabet, gp.c_str(), ip.c_str());
  }
  std::printf("bitswap schedule: %s\n",
              format_schedule(compile_schedule(topo), topo).c_str());
}

int cmd_inspect(const fs::path& path) {
  const auto model = load_any_model(path);
  std::printf("hash %s\n", hex(model_hash(model)).c_str());
  if (const auto* chain = std::get_if<ChainModel>(&model))
    inspect_chain(*chain);
  else
    inspect_tree(std::get<TabularTreeModel>(model));
  return 0;
}

fs::path with_scheme(const fs::path& out, SchemeId scheme, std::size_t n_schemes) {
  if (n_schemes == 1) return out;
  auto p = out;
  p.replace_filename(out.stem().string() + "-" + scheme_name(scheme) + out.extension().string());
  return p;
}

int cmd_experiment(const fs::path& config_path) {
  const auto cfg = parse_experiment_config(read_text(config_path), config_path.parent_path());
  switch (cfg.kind) {
    case ExperimentKind::Cma: {
      const auto model = load_model(cfg.models.front());
      std::printf("scheme   initial(n=1)      CMA(n=%zu)  CMA(n=%zu)  net\n",
                  std::min<std::size_t>(50, cfg.n_datapoints), cfg.n_datapoints);
      for (auto scheme : cfg.schemes) {
        const auto t = run_cma_experiment(model, scheme, cfg.n_datapoints, cfg.n_trials,
                                          cfg.seed_words, cfg.base_seed);
        const auto out = with_scheme(cfg.output, scheme, cfg.schemes.size());
        export_csv(t, out);
        const double d = static_cast<double>(t.data_dim);
        std::printf("%-8s %6.3f +- %5.3f  %9.4f  %9.4f  %7.4f  -> %s\n", scheme_name(scheme).c_str(),
                    t.initial_bits_mean / d, t.initial_bits_sd / d,
                    t.cma_mean[std::min<std::size_t>(50, cfg.n_datapoints) - 1], t.cma_mean.back(),
                    t.mean_net_bits_per_dim, out.string().c_str());
      }
      return 0;
    }
    case ExperimentKind::InitialBits: {
      std::vector<ChainModel> models;
      for (const auto& p : cfg.models) models.push_back(load_model(p));
      const auto rows =
          compare_initial_bits(models, cfg.schemes, cfg.n_datapoints, cfg.seed_words, cfg.base_seed);
      std::ofstream out(cfg.output, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + cfg.output.string());
      out << "depth,scheme,mean_bits,sd_bits,count\n";
      for (const auto& r : rows) {
        out << r.depth << ',' << scheme_name(r.scheme) << ',' << r.mean << ',' << r.sd << ','
            << r.count << '\n';
        std::printf("L=%d %-8s %9.3f +- %7.3f bits\n", r.depth, scheme_name(r.scheme).c_str(),
                    r.mean, r.sd);
      }
      return 0;
    }
    case ExperimentKind::Oracle: {
      const auto model = load_model(cfg.models.front());
      std::ofstream out(cfg.output, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + cfg.output.string());
      out << "scheme,n_datapoints,net_bits_per_dim,neg_elbo_per_dim,neg_log_px_per_dim,"
             "kl_gap_per_dim,flagged\n";
      int status = 0;
      for (auto scheme : cfg.schemes) {
        const auto r =
            oracle_check(model, scheme, cfg.n_datapoints, cfg.seed_words, cfg.base_seed);
        out.precision(17);
        out << scheme_name(scheme) << ',' << r.n_datapoints << ',' << r.net_bits_per_dim << ','
            << r.neg_elbo_per_dim << ',' << r.neg_log_px_per_dim << ',' << r.kl_gap_per_dim << ','
            << (r.flagged ? 1 : 0) << '\n';
        std::printf("%-8s net %.5f  -ELBO %.5f  -log p(x) %.5f  KL %.5f%s\n",
                    scheme_name(scheme).c_str(), r.net_bits_per_dim, r.neg_elbo_per_dim,
                    r.neg_log_px_per_dim, r.kl_gap_per_dim, r.flagged ? "  FLAGGED" : "");
        if (r.flagged) status = 3;
      }
      return status;
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bits-back compression with BB-ANS and Bit-Swap"};
  app.require_subcommand(1);

  CompressArgs ca;
  auto* compress = app.add_subcommand("compress", "Compress raw symbols into a container");
  compress->add_option("--model", ca.model, "Model JSON")->required();
  compress->add_option("--scheme", ca.scheme, "bbans or bitswap")
      ->check(CLI::IsMember({"bbans", "bitswap"}));
  compress->add_option("--input", ca.input, "Raw input, one byte per symbol")->required();
  compress->add_option("--output", ca.output, "Container to write")->required();
  compress->add_option("--seed-words", ca.seed_words, "32-bit words of seeded initial bits");
  compress->add_option("--seed", ca.seed, "Seed of the initial words");

  DecompressArgs da;
  auto* decompress = app.add_subcommand("decompress", "Recover raw symbols from a container");
  decompress->add_option("--model", da.model, "Model JSON")->required();
  decompress->add_option("--input", da.input, "Container")->required();
  decompress->add_option("--output", da.output, "Raw output")->required();

  GenArgs ga;
  auto* gen = app.add_subcommand("gen-model", "Generate a synthetic model");
  gen->add_option("--family", ga.family, "tabular, affine-logistic or tabular-tree")
      ->check(CLI::IsMember({"tabular", "affine-logistic", "tabular-tree"}));
  gen->add_option("--depth", ga.spec.depth, "Number of latent layers")->check(CLI::Range(1, 255));
  gen->add_option("--dims", ga.dims, "Latent dims, one value or one per layer (comma separated)");
  gen->add_option("--data-dim", ga.spec.data_dim, "Dimension of x")->check(CLI::PositiveNumber);
  gen->add_option("--x-alphabet", ga.spec.x_alphabet, "Tabular observation alphabet")
      ->check(CLI::Range(2, 256));
  gen->add_option("--latent-alphabet", ga.spec.latent_alphabet, "Tabular latent alphabet")
      ->check(CLI::Range(2, 1 << 16));
  gen->add_option("--bins", ga.spec.bins, "Affine latent bins per dimension")
      ->check(CLI::Range(2, 1 << 16));
  gen->add_option("--precision", ga.spec.precision_bits, "Frequency precision bits (0: default)")
      ->check(CLI::Range(0, 24));
  gen->add_option("--inference", ga.inference, "exact, perturbed or random")
      ->check(CLI::IsMember({"exact", "perturbed", "random"}));
  gen->add_option("--perturbation", ga.spec.perturbation, "Noise scale for perturbed inference");
  gen->add_flag("--untied", ga.untied, "Independent tabular transitions per layer");
  gen->add_option("--grid-samples", ga.spec.grid_samples, "Samples used to place affine grids");
  gen->add_option("--seed", ga.spec.seed, "Generator seed");
  gen->add_option("--out", ga.out, "Model JSON to write")->required();

  fs::path experiment_config;
  auto* experiment = app.add_subcommand("experiment", "Run a CMA, initial-bits or oracle experiment");
  experiment->add_option("--config", experiment_config, "Experiment JSON")->required();

  fs::path inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Describe a model");
  inspect->add_option("--model", inspect_path, "Model JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compress) return cmd_compress(ca);
    if (*decompress) return cmd_decompress(da);
    if (*gen) return cmd_gen_model(ga);
    if (*experiment) return cmd_experiment(experiment_config);
    if (*inspect) return cmd_inspect(inspect_path);
  } catch (const StreamExhausted& e) {
    std::fprintf(stderr, "error: initial bits exhausted: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
