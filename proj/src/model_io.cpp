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

#include "bitswap/model_io.hpp"

#include <openssl/evp.h>

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bitswap/error.hpp"

namespace bitswap {

using json = nlohmann::json;

namespace {

// ---- JSON <-> model types --------------------------------------------------

json to_json(const TabularConditional& c) {
  json dims = json::array();
  for (const auto& f : c.dims) dims.push_back({{"base", f.base}, {"pairs", f.pairs}});
  return {{"child_alphabet", c.child_alphabet}, {"parent_alphabets", c.parent_alphabets},
          {"dims", dims}};
}

TabularConditional conditional_from_json(const json& j) {
  TabularConditional c;
  c.child_alphabet = j.at("child_alphabet").get<std::size_t>();
  c.parent_alphabets = j.at("parent_alphabets").get<std::vector<std::size_t>>();
  for (const auto& d : j.at("dims"))
    c.dims.push_back({d.at("base").get<std::vector<double>>(),
                      d.at("pairs").get<std::vector<std::vector<double>>>()});
  return c;
}

json to_json(const AffineMap& m) {
  return {{"in", m.in},          {"out", m.out},
          {"w_mu", m.w_mu},      {"b_mu", m.b_mu},
          {"w_log_scale", m.w_log_scale}, {"b_log_scale", m.b_log_scale}};
}

AffineMap affine_from_json(const json& j) {
  AffineMap m;
  m.in = j.at("in").get<std::size_t>();
  m.out = j.at("out").get<std::size_t>();
  m.w_mu = j.at("w_mu").get<std::vector<double>>();
  m.b_mu = j.at("b_mu").get<std::vector<double>>();
  m.w_log_scale = j.at("w_log_scale").get<std::vector<double>>();
  m.b_log_scale = j.at("b_log_scale").get<std::vector<double>>();
  return m;
}

template <class T, class F>
json list_to_json(const std::vector<T>& items, F convert) {
  json out = json::array();
  for (const auto& item : items) out.push_back(convert(item));
  return out;
}

template <class T, class F>
std::vector<T> list_from_json(const json& j, F convert) {
  std::vector<T> out;
  for (const auto& item : j) out.push_back(convert(item));
  return out;
}

json chain_to_json(const ChainModel& m) {
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["L"] = m.depth();
  doc["D"] = m.data_dim();
  doc["layer_dims"] = m.layer_dims();
  doc["precision_bits"] = m.precision_bits();
  doc["sampling_seed"] = m.sampling_seed();
  doc["grids"] = list_to_json(m.grids(), [](const BinGrid& g) {
    return json{{"interior_edges", std::vector<double>(g.edges().begin(), g.edges().end())},
                {"representatives",
                 std::vector<double>(g.representatives().begin(), g.representatives().end())}};
  });
  if (m.family() == Family::Tabular) {
    const auto& p = m.tabular_params();
    doc["family"] = "tabular";
    doc["params"] = {
        {"x_alphabet", p.x_alphabet},
        {"latent_alphabets", p.latent_alphabets},
        {"observation", to_json(p.observation)},
        {"generative", list_to_json(p.generative, [](const auto& c) { return to_json(c); })},
        {"prior", to_json(p.prior)},
        {"inference", list_to_json(p.inference, [](const auto& c) { return to_json(c); })},
    };
  } else {
    const auto& p = m.affine_params();
    doc["family"] = "affine-logistic";
    doc["params"] = {
        {"observation", to_json(p.observation)},
        {"generative", list_to_json(p.generative, [](const auto& a) { return to_json(a); })},
        {"inference", list_to_json(p.inference, [](const auto& a) { return to_json(a); })},
    };
  }
  return doc;
}

json tree_to_json(const TabularTreeModel& m) {
  auto conditionals = [](const std::vector<TreeConditional>& list, std::size_t first) {
    json out = json::array();
    for (std::size_t v = first; v < list.size(); ++v)
      out.push_back({{"var", list[v].var}, {"parents", list[v].parents},
                     {"table", to_json(list[v].table)}});
    return out;
  };
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["family"] = "tabular-tree";
  doc["precision_bits"] = m.precision_bits();
  doc["sampling_seed"] = m.sampling_seed();
  doc["variables"] = list_to_json(m.variables(), [](const TreeVariable& v) {
    return json{{"name", v.name}, {"alphabet", v.alphabet}, {"dims", v.dims}};
  });
  doc["generative"] = conditionals(m.generative(), 0);
  doc["inference"] = conditionals(m.inference(), 1);
  return doc;
}

AnyModel model_from_json(const json& doc) {
  const int version = doc.at("format_version").get<int>();
  if (version != kModelFormatVersion)
    throw FormatError("unsupported model format_version " + std::to_string(version));
  const auto family = doc.at("family").get<std::string>();
  const int r = doc.at("precision_bits").get<int>();
  const auto seed = doc.at("sampling_seed").get<std::uint64_t>();

  if (family == "tabular-tree") {
    auto conditionals = [](const json& list) {
      return list_from_json<TreeConditional>(list, [](const json& c) {
        return TreeConditional{c.at("var").get<int>(), c.at("parents").get<std::vector<int>>(),
                               conditional_from_json(c.at("table"))};
      });
    };
    auto vars = list_from_json<TreeVariable>(doc.at("variables"), [](const json& v) {
      return TreeVariable{v.at("name").get<std::string>(), v.at("alphabet").get<std::size_t>(),
                          v.at("dims").get<std::size_t>()};
    });
    return TabularTreeModel(std::move(vars), conditionals(doc.at("generative")),
                            conditionals(doc.at("inference")), r, seed);
  }

  const auto depth = doc.at("L").get<int>();
  const auto d = doc.at("D").get<std::size_t>();
  auto dims = doc.at("layer_dims").get<std::vector<std::size_t>>();
  if (depth < 1 || static_cast<std::size_t>(depth) != dims.size())
    throw FormatError("L does not match layer_dims");
  const json& p = doc.at("params");
  if (family == "tabular") {
    TabularParams tp;
    tp.x_alphabet = p.at("x_alphabet").get<std::size_t>();
    tp.latent_alphabets = p.at("latent_alphabets").get<std::vector<std::size_t>>();
    tp.observation = conditional_from_json(p.at("observation"));
    tp.generative = list_from_json<TabularConditional>(p.at("generative"), conditional_from_json);
    tp.prior = conditional_from_json(p.at("prior"));
    tp.inference = list_from_json<TabularConditional>(p.at("inference"), conditional_from_json);
    return ChainModel::tabular(d, std::move(dims), r, std::move(tp), seed);
  }
  if (family == "affine-logistic") {
    AffineParams ap;
    ap.observation = affine_from_json(p.at("observation"));
    ap.generative = list_from_json<AffineMap>(p.at("generative"), affine_from_json);
    ap.inference = list_from_json<AffineMap>(p.at("inference"), affine_from_json);
    auto grids = list_from_json<BinGrid>(doc.at("grids"), [](const json& g) {
      return BinGrid(g.at("interior_edges").get<std::vector<double>>(),
                     g.at("representatives").get<std::vector<double>>());
    });
    return ChainModel::affine_logistic(d, std::move(dims), r, std::move(ap), std::move(grids),
                                       seed);
  }
  throw FormatError("unknown model family '" + family + "'");
}

void check_precision(int r) {
  if (r < 1 || r > kMaxPrecisionBits)
    throw std::invalid_argument("precision_bits must be in [1, " +
                                std::to_string(kMaxPrecisionBits) + "]");
}

}  // namespace

std::string serialize_model(const AnyModel& model) {
  const json doc = std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, ChainModel>)
          return chain_to_json(m);
        else
          return tree_to_json(m);
      },
      model);
  return doc.dump();
}

AnyModel parse_model(std::string_view text) {
  try {
    const json doc = json::parse(text);
    const int r = doc.at("precision_bits").get<int>();
    check_precision(r);
    return model_from_json(doc);
  } catch (const FormatError&) {
    throw;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid model: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw FormatError(std::string("invalid model: ") + e.what());
  }
}

AnyModel load_any_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

ChainModel load_model(const std::filesystem::path& path) {
  auto any = load_any_model(path);
  if (auto* chain = std::get_if<ChainModel>(&any)) return std::move(*chain);
  throw FormatError(path.string() + " holds a tree model, not a chain");
}

void save_model(const AnyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_model(model) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::array<std::uint8_t, 32> model_hash(const AnyModel& model) {
  const std::string text = serialize_model(model);
  std::array<std::uint8_t, 32> digest{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != digest.size())
    throw std::runtime_error("SHA-256 failed");
  return digest;
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Tabular:
      return "tabular";
    case ModelKind::AffineLogistic:
      return "affine-logistic";
    case ModelKind::TabularTree:
      return "tabular-tree";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& name) {
  for (auto k : {ModelKind::Tabular, ModelKind::AffineLogistic, ModelKind::TabularTree})
    if (model_kind_name(k) == name) return k;
  throw std::invalid_argument("unknown model family '" + name + "'");
}

std::string inference_mode_name(InferenceMode mode) {
  switch (mode) {
    case InferenceMode::Exact:
      return "exact";
    case InferenceMode::Perturbed:
      return "perturbed";
    case InferenceMode::Random:
      return "random";
  }
  return "?";
}

InferenceMode parse_inference_mode(const std::string& name) {
  for (auto m : {InferenceMode::Exact, InferenceMode::Perturbed, InferenceMode::Random})
    if (inference_mode_name(m) == name) return m;
  throw std::invalid_argument("unknown inference mode '" + name + "'");
}

// ---- generation ------------------------------------------------------------

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Draws {
 public:
  explicit Draws(std::uint64_t seed) : rng_(seed) {}
  double normal() { return normal_(rng_); }
  double uniform() { return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53; }
  double logistic(double mu, double scale) {
    const double u = uniform();
    return mu + scale * std::log(u / (1.0 - u));
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

struct TabularShape {
  double kappa = 1.5;  // strength of the smooth cyclic component
  double sigma = 0.5;  // independent log-scale noise per entry
};

// Cyclic, smoothly varying factor: parent value u favours child values near
// u * child / parent + offset.
std::vector<double> cyclic_pair(std::size_t parent, std::size_t child, double kappa, double sigma,
                                double offset, Draws& draws) {
  std::vector<double> out(parent * child);
  for (std::size_t u = 0; u < parent; ++u) {
    const double centre = static_cast<double>(u) * static_cast<double>(child) /
                              static_cast<double>(parent) + offset;
    for (std::size_t c = 0; c < child; ++c) {
      const double phase = kTwoPi * (static_cast<double>(c) - centre) / static_cast<double>(child);
      out[u * child + c] = std::exp(kappa * std::cos(phase) + sigma * draws.normal());
    }
  }
  return out;
}

TabularConditional random_conditional(std::size_t child_alphabet, std::size_t child_dims,
                                      std::size_t parent_alphabet, std::size_t parent_dims,
                                      TabularShape shape, Draws& draws) {
  TabularConditional c;
  c.child_alphabet = child_alphabet;
  c.parent_alphabets.assign(parent_dims, parent_alphabet);
  const double kappa = parent_dims ? shape.kappa / std::sqrt(static_cast<double>(parent_dims))
                                   : shape.kappa * 0.5;
  for (std::size_t d = 0; d < child_dims; ++d) {
    FactorTable f;
    if (parent_dims == 0) {
      f.base = cyclic_pair(1, child_alphabet, kappa, shape.sigma,
                           draws.uniform() * static_cast<double>(child_alphabet), draws);
    } else {
      f.base.assign(child_alphabet, 1.0);
      for (std::size_t j = 0; j < parent_dims; ++j)
        f.pairs.push_back(cyclic_pair(parent_alphabet, child_alphabet, kappa, shape.sigma,
                                      draws.uniform() * static_cast<double>(child_alphabet),
                                      draws));
    }
    c.dims.push_back(std::move(f));
  }
  return c;
}

// Stationary distribution of a one-dimensional transition table by power
// iteration.
std::vector<double> stationary(const TabularConditional& t) {
  const std::size_t a = t.child_alphabet;
  std::vector<double> pi(a, 1.0 / static_cast<double>(a));
  for (int it = 0; it < 5000; ++it) {
    std::vector<double> next(a, 0.0);
    for (std::size_t u = 0; u < a; ++u) {
      const int parent = static_cast<int>(u);
      const auto row = t.row(0, std::span<const int>(&parent, 1));
      for (std::size_t c = 0; c < a; ++c) next[c] += pi[u] * row[c];
    }
    pi = std::move(next);
  }
  return pi;
}

// Marginal of a one-dimensional child given the parent's marginal.
std::vector<double> push_forward(const TabularConditional& t, const std::vector<double>& parent) {
  std::vector<double> out(t.child_alphabet, 0.0);
  for (std::size_t u = 0; u < parent.size(); ++u) {
    const int p = static_cast<int>(u);
    const auto row = t.row(0, std::span<const int>(&p, 1));
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += parent[u] * row[c];
  }
  return out;
}

void perturb(TabularConditional& c, double amount, Draws& draws) {
  for (auto& f : c.dims) {
    for (double& v : f.base) v *= std::exp(amount * draws.normal());
    for (auto& pair : f.pairs)
      for (double& v : pair) v *= std::exp(amount * draws.normal());
  }
}

std::vector<std::size_t> broadcast_dims(const GenSpec& spec, std::size_t n) {
  if (spec.layer_dims.size() == n) return spec.layer_dims;
  if (spec.layer_dims.size() == 1) return std::vector<std::size_t>(n, spec.layer_dims[0]);
  throw std::invalid_argument("layer_dims needs one entry or one per latent layer");
}

ChainModel gen_tabular(const GenSpec& spec) {
  const int depth = spec.depth;
  const auto l = static_cast<std::size_t>(depth);
  const auto dims = broadcast_dims(spec, l);
  const std::size_t a = spec.latent_alphabet;
  const std::size_t ax = spec.x_alphabet;
  const bool one_dim = std::all_of(dims.begin(), dims.end(), [](std::size_t d) { return d == 1; });
  if (spec.inference != InferenceMode::Random && !one_dim)
    throw std::invalid_argument("exact and perturbed inference need one-dimensional latents");
  Draws draws(spec.seed);
  const TabularShape latent_shape{1.5, 0.5};
  const TabularShape obs_shape{2.0, 0.5};

  TabularParams p;
  p.x_alphabet = ax;
  p.latent_alphabets.assign(l, a);
  p.observation = random_conditional(ax, spec.data_dim, a, dims[0], obs_shape, draws);

  const bool tied = spec.tied && std::all_of(dims.begin(), dims.end(),
                                             [&](std::size_t d) { return d == dims[0]; });
  const TabularConditional shared = random_conditional(a, dims[0], a, dims[0], latent_shape, draws);
  for (std::size_t i = 1; i < l; ++i)
    p.generative.push_back(tied ? shared
                                : random_conditional(a, dims[i - 1], a, dims[i], latent_shape, draws));
  if (tied && one_dim) {
    p.prior.child_alphabet = a;
    p.prior.dims.push_back({stationary(shared), {}});
  } else {
    p.prior = random_conditional(a, dims[l - 1], 1, 0, latent_shape, draws);
  }

  if (spec.inference == InferenceMode::Random) {
    p.inference.push_back(random_conditional(a, dims[0], ax, spec.data_dim, latent_shape, draws));
    for (std::size_t i = 1; i < l; ++i)
      p.inference.push_back(random_conditional(a, dims[i], a, dims[i - 1], latent_shape, draws));
  } else {
    // Marginals from the top: m[i] is the distribution of z_{i+1}.
    std::vector<std::vector<double>> m(l);
    m[l - 1] = p.prior.row(0, {});
    for (std::size_t i = l - 1; i-- > 0;) m[i] = push_forward(p.generative[i], m[i + 1]);

    // q(z1 | x) ∝ p(z1) prod_d p(x_d | z1).
    TabularConditional q1;
    q1.child_alphabet = a;
    q1.parent_alphabets.assign(spec.data_dim, ax);
    FactorTable f{m[0], {}};
    for (std::size_t d = 0; d < spec.data_dim; ++d) {
      std::vector<double> pair(ax * a);
      for (std::size_t z = 0; z < a; ++z) {
        const int parent = static_cast<int>(z);
        const auto row = p.observation.row(d, std::span<const int>(&parent, 1));
        for (std::size_t x = 0; x < ax; ++x) pair[x * a + z] = row[x];
      }
      f.pairs.push_back(std::move(pair));
    }
    q1.dims.push_back(std::move(f));
    p.inference.push_back(std::move(q1));

    // q(z_{i+1} | z_i) ∝ p(z_{i+1}) p(z_i | z_{i+1}).
    for (std::size_t i = 1; i < l; ++i) {
      TabularConditional q;
      q.child_alphabet = a;
      q.parent_alphabets = {a};
      std::vector<double> pair(a * a);
      for (std::size_t up = 0; up < a; ++up) {
        const int parent = static_cast<int>(up);
        const auto row = p.generative[i - 1].row(0, std::span<const int>(&parent, 1));
        for (std::size_t z = 0; z < a; ++z) pair[z * a + up] = m[i][up] * row[z];
      }
      q.dims.push_back({std::vector<double>(a, 1.0), {std::move(pair)}});
      p.inference.push_back(std::move(q));
    }
    if (spec.inference == InferenceMode::Perturbed)
      for (auto& q : p.inference) perturb(q, spec.perturbation, draws);
  }
  const int r = spec.precision_bits ? spec.precision_bits : kDefaultPrecisionBits;
  return ChainModel::tabular(spec.data_dim, dims, r, std::move(p), spec.seed);
}

TabularTreeModel gen_tree(const GenSpec& spec) {
  // x <- {z1, z2}, z1 <- z3 <- z4; inference x -> {z1, z2}, z1 -> z3 -> z4.
  const auto dims = broadcast_dims(spec, 4);
  const std::size_t a = spec.latent_alphabet;
  Draws draws(spec.seed);
  const TabularShape shape{1.5, 0.5};
  std::vector<TreeVariable> vars{{"x", spec.x_alphabet, spec.data_dim},
                                 {"z1", a, dims[0]},
                                 {"z2", a, dims[1]},
                                 {"z3", a, dims[2]},
                                 {"z4", a, dims[3]}};
  auto table = [&](int var, const std::vector<int>& parents) {
    const auto& child = vars[static_cast<std::size_t>(var)];
    std::size_t inputs = 0;
    for (int p : parents) inputs += vars[static_cast<std::size_t>(p)].dims;
    // All parents share the latent alphabet except x, which is never a
    // generative parent and is the only inference parent of z1 and z2.
    const std::size_t parent_alphabet =
        parents.empty() ? 1 : vars[static_cast<std::size_t>(parents[0])].alphabet;
    return TreeConditional{var, parents,
                           random_conditional(child.alphabet, child.dims, parent_alphabet, inputs,
                                              shape, draws)};
  };
  std::vector<TreeConditional> gen{table(0, {1, 2}), table(1, {3}), table(2, {}), table(3, {4}),
                                   table(4, {})};
  std::vector<TreeConditional> inf{table(1, {0}), table(2, {0}), table(3, {1}), table(4, {3})};
  const int r = spec.precision_bits ? spec.precision_bits : kDefaultPrecisionBits;
  return TabularTreeModel(std::move(vars), std::move(gen), std::move(inf), r, spec.seed);
}

ChainModel gen_affine(const GenSpec& spec) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const int depth = spec.depth;
  const auto l = static_cast<std::size_t>(depth);
  const auto dims = broadcast_dims(spec, l);
  const std::size_t dx = spec.data_dim;
  if (spec.inference == InferenceMode::Random)
    throw std::invalid_argument("affine-logistic models support exact or perturbed inference");
  const double logistic_var = std::numbers::pi * std::numbers::pi / 3.0;
  constexpr double kLatentNoise = 0.5;  // logistic scale of each latent transition
  constexpr double kPixelNoise = 4.0;   // logistic scale of p(x | z1), pixel units
  constexpr double kPixelSpread = 40.0;
  Draws draws(spec.seed);

  // Linear-logistic generative chain: z_i = A_i z_{i+1} + c_i + noise.
  // Index 0 is x; mats[i] maps layer i+1 to layer i.
  auto dim_of = [&](std::size_t layer) { return layer == 0 ? dx : dims[layer - 1]; };
  std::vector<MatrixXd> mats(l);
  std::vector<VectorXd> offs(l);
  std::vector<double> noise(l, kLatentNoise);
  noise[0] = kPixelNoise;
  for (std::size_t i = 1; i < l; ++i) {
    mats[i] = MatrixXd(dim_of(i), dim_of(i + 1));
    for (Eigen::Index r = 0; r < mats[i].rows(); ++r)
      for (Eigen::Index c = 0; c < mats[i].cols(); ++c)
        mats[i](r, c) = draws.normal() / std::sqrt(static_cast<double>(mats[i].cols()));
    offs[i] = VectorXd(dim_of(i));
    for (Eigen::Index r = 0; r < offs[i].size(); ++r) offs[i](r) = 0.3 * draws.normal();
  }

  // Moments, top down. Sigma[i] is Cov(layer i), mean[i] its mean.
  std::vector<MatrixXd> sigma(l + 1);
  std::vector<VectorXd> mean(l + 1);
  sigma[l] = MatrixXd::Identity(static_cast<Eigen::Index>(dims[l - 1]),
                                static_cast<Eigen::Index>(dims[l - 1])) * logistic_var;
  mean[l] = VectorXd::Zero(static_cast<Eigen::Index>(dims[l - 1]));
  for (std::size_t i = l - 1; i >= 1; --i) {
    sigma[i] = mats[i] * sigma[i + 1] * mats[i].transpose() +
               MatrixXd::Identity(mats[i].rows(), mats[i].rows()) * (noise[i] * noise[i] * logistic_var);
    mean[i] = mats[i] * mean[i + 1] + offs[i];
  }
  // Observation rows scaled to a fixed pixel spread around mid-grey.
  mats[0] = MatrixXd(dx, dims[0]);
  for (Eigen::Index r = 0; r < mats[0].rows(); ++r) {
    for (Eigen::Index c = 0; c < mats[0].cols(); ++c) mats[0](r, c) = draws.normal();
    const double sd = std::sqrt(mats[0].row(r) * sigma[1] * mats[0].row(r).transpose());
    mats[0].row(r) *= kPixelSpread / sd;
  }
  offs[0] = VectorXd::Constant(static_cast<Eigen::Index>(dx), 127.5) - mats[0] * mean[1];
  sigma[0] = mats[0] * sigma[1] * mats[0].transpose() +
             MatrixXd::Identity(static_cast<Eigen::Index>(dx), static_cast<Eigen::Index>(dx)) *
                 (kPixelNoise * kPixelNoise * logistic_var + 1.0 / 12.0);
  mean[0] = mats[0] * mean[1] + offs[0];

  auto generative_map = [&](std::size_t i) {
    AffineMap m;
    m.in = dim_of(i + 1);
    m.out = dim_of(i);
    m.w_mu.resize(m.in * m.out);
    for (std::size_t r = 0; r < m.out; ++r)
      for (std::size_t c = 0; c < m.in; ++c)
        m.w_mu[r * m.in + c] = mats[i](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    m.b_mu.assign(offs[i].data(), offs[i].data() + offs[i].size());
    m.w_log_scale.assign(m.in * m.out, 0.0);
    m.b_log_scale.assign(m.out, std::log(noise[i]));
    return m;
  };

  // q(layer i+1 | layer i) by Gaussian regression on the joint moments:
  // Cov(z_{i+1}, z_i) = Sigma[i+1] A_i^T.
  auto inference_map = [&](std::size_t i) {
    const MatrixXd cross = sigma[i + 1] * mats[i].transpose();
    const MatrixXd gain = sigma[i].ldlt().solve(cross.transpose()).transpose();
    const MatrixXd resid = sigma[i + 1] - gain * cross.transpose();
    // Layer 0 enters as v = x / 127.5 - 1.
    const double in_scale = i == 0 ? 127.5 : 1.0;
    const VectorXd in_shift = i == 0 ? VectorXd::Constant(static_cast<Eigen::Index>(dx), 127.5)
                                     : VectorXd::Zero(static_cast<Eigen::Index>(dim_of(i)));
    const VectorXd bias = mean[i + 1] + gain * (in_shift - mean[i]);
    AffineMap m;
    m.in = dim_of(i);
    m.out = dim_of(i + 1);
    m.w_mu.resize(m.in * m.out);
    for (std::size_t r = 0; r < m.out; ++r)
      for (std::size_t c = 0; c < m.in; ++c)
        m.w_mu[r * m.in + c] =
            in_scale * gain(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    m.b_mu.assign(bias.data(), bias.data() + bias.size());
    m.w_log_scale.assign(m.in * m.out, 0.0);
    for (std::size_t r = 0; r < m.out; ++r) {
      const double sd = std::sqrt(resid(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)));
      m.b_log_scale.push_back(std::log(sd * std::sqrt(3.0) / std::numbers::pi));
    }
    return m;
  };

  AffineParams p;
  p.observation = generative_map(0);
  for (std::size_t i = 1; i < l; ++i) p.generative.push_back(generative_map(i));
  for (std::size_t i = 0; i < l; ++i) p.inference.push_back(inference_map(i));
  if (spec.inference == InferenceMode::Perturbed) {
    for (auto& m : p.inference) {
      for (double& v : m.b_mu) v += 0.1 * spec.perturbation * draws.normal();
      for (double& v : m.b_log_scale) v += spec.perturbation * draws.normal();
    }
  }

  // Grids: equal mass under the prior on top, uniform over m +- 4 sd of
  // each lower layer's marginal, estimated by continuous ancestral sampling.
  std::vector<BinGrid> grids;
  Draws sampler(spec.seed ^ 0x5bd1e9955bd1e995ULL);
  std::vector<double> sum(l, 0.0), sum_sq(l, 0.0);
  for (std::size_t s = 0; s < spec.grid_samples; ++s) {
    VectorXd z(static_cast<Eigen::Index>(dims[l - 1]));
    for (Eigen::Index d = 0; d < z.size(); ++d) z(d) = sampler.logistic(0.0, 1.0);
    for (std::size_t i = l - 1; i >= 1; --i) {
      VectorXd child = mats[i] * z + offs[i];
      for (Eigen::Index d = 0; d < child.size(); ++d) {
        child(d) = sampler.logistic(child(d), noise[i]);
        sum[i - 1] += child(d);
        sum_sq[i - 1] += child(d) * child(d);
      }
      z = std::move(child);
    }
  }
  for (std::size_t i = 0; i + 1 < l; ++i) {
    const double n = static_cast<double>(spec.grid_samples * dims[i]);
    const double m = sum[i] / n;
    const double sd = std::sqrt(std::max(sum_sq[i] / n - m * m, 1e-12));
    grids.push_back(uniform_grid(m - 4.0 * sd, m + 4.0 * sd, spec.bins));
  }
  grids.push_back(equal_mass_grid({0.0, 1.0}, spec.bins));

  const int r = spec.precision_bits ? spec.precision_bits : 20;
  return ChainModel::affine_logistic(dx, dims, r, std::move(p), std::move(grids), spec.seed);
}

}  // namespace

AnyModel gen_model(const GenSpec& spec) {
  if (spec.depth < 1) throw std::invalid_argument("depth must be >= 1");
  if (spec.data_dim < 1) throw std::invalid_argument("data dimension must be >= 1");
  if (spec.precision_bits) check_precision(spec.precision_bits);
  switch (spec.kind) {
    case ModelKind::Tabular:
      return gen_tabular(spec);
    case ModelKind::AffineLogistic:
      if (spec.grid_samples < 2) throw std::invalid_argument("grid estimation needs samples");
      return gen_affine(spec);
    case ModelKind::TabularTree:
      return gen_tree(spec);
  }
  throw std::invalid_argument("unknown model kind");
}

}  // namespace bitswap
