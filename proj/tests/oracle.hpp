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

// Brute-force reference values for small tabular chains: every latent
// configuration is enumerated explicitly.

#include <cmath>
#include <functional>
#include <vector>

#include "bitswap/latent_model.hpp"

namespace oracle {

struct Values {
  double neg_elbo_bits = 0.0;
  double neg_log_px_bits = 0.0;
  double kl_bits = 0.0;  // KL(q(z|x) || p(z|x)), from the enumerated posterior
};

inline double prob(const bitswap::LayerTables& tables, const std::vector<int>& v) {
  double p = 1.0;
  for (std::size_t d = 0; d < tables.size(); ++d) p *= tables[d].probability(static_cast<std::size_t>(v[d]));
  return p;
}

/// Calls f(z) for every configuration z[0..L-1] of the latent layers.
inline void for_each_latent(const bitswap::ChainModel& m,
                            const std::function<void(const std::vector<std::vector<int>>&)>& f) {
  const int depth = m.depth();
  std::vector<std::vector<int>> z(static_cast<std::size_t>(depth));
  for (int i = 1; i <= depth; ++i) z[i - 1].assign(m.layer_dim(i), 0);
  for (;;) {
    f(z);
    // Odometer increment over all latent symbols.
    int i = 1;
    std::size_t d = 0;
    for (;;) {
      if (i > depth) return;
      auto& layer = z[i - 1];
      if (++layer[d] < static_cast<int>(m.alphabet(i))) break;
      layer[d] = 0;
      if (++d == layer.size()) {
        d = 0;
        ++i;
      }
    }
  }
}

inline Values enumerate(const bitswap::ChainModel& m, const std::vector<int>& x) {
  const int depth = m.depth();
  std::vector<double> joints, qs;
  for_each_latent(m, [&](const std::vector<std::vector<int>>& z) {
    double joint = prob(m.prior_tables(), z[depth - 1]);
    for (int i = 1; i < depth; ++i) joint *= prob(m.generative_tables(i, z[i]), z[i - 1]);
    joint *= prob(m.generative_tables(0, z[0]), x);
    double q = prob(m.inference_tables(1, x), z[0]);
    for (int i = 2; i <= depth; ++i) q *= prob(m.inference_tables(i, z[i - 2]), z[i - 1]);
    joints.push_back(joint);
    qs.push_back(q);
  });
  double px = 0.0, elbo = 0.0, kl = 0.0;
  for (double j : joints) px += j;
  for (std::size_t k = 0; k < qs.size(); ++k) {
    if (qs[k] <= 0.0) continue;
    elbo += qs[k] * (std::log2(joints[k]) - std::log2(qs[k]));
    kl += qs[k] * (std::log2(qs[k]) - std::log2(joints[k] / px));
  }
  return {-elbo, -std::log2(px), kl};
}

}  // namespace oracle
