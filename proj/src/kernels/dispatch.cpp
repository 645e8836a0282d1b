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

#include <atomic>
#include <stdexcept>
#include <string>

#include "bitswap/kernels.hpp"
#include "kernel_table.hpp"

namespace bitswap::kernels {
namespace detail {
double exp_reference(double t);
}

namespace {

const detail::KernelTable* table_for(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return &detail::kScalarKernels;
    case Backend::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      if (detail::kAvx2Kernels != nullptr && __builtin_cpu_supports("avx2"))
        return detail::kAvx2Kernels;
#endif
      return nullptr;
    case Backend::Neon:
      return detail::kNeonKernels;
  }
  return nullptr;
}

Backend detect() {
  if (table_for(Backend::Avx2) != nullptr) return Backend::Avx2;
  if (table_for(Backend::Neon) != nullptr) return Backend::Neon;
  return Backend::Scalar;
}

std::atomic<Backend>& active() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

const detail::KernelTable& checked(Backend backend) {
  const auto* t = table_for(backend);
  if (t == nullptr)
    throw std::invalid_argument("kernel backend not available: " +
                                std::string(backend_name(backend)));
  return *t;
}

void require_sizes(std::size_t in, std::size_t out) {
  if (in != out) throw std::invalid_argument("kernel span size mismatch");
}

}  // namespace

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

bool backend_available(Backend backend) { return table_for(backend) != nullptr; }

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon})
    if (backend_available(b)) out.push_back(b);
  return out;
}

Backend active_backend() { return active().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  checked(backend);
  active().store(backend, std::memory_order_relaxed);
}

double exp(double t) { return detail::exp_reference(t); }

void logistic_cdf(Backend backend, std::span<const double> x, double mu, double scale,
                  std::span<double> out) {
  require_sizes(x.size(), out.size());
  checked(backend).logistic_cdf(x.data(), x.size(), mu, scale, out.data());
}

void logistic_bin_masses(Backend backend, std::span<const double> edges, double mu,
                         double scale, std::span<double> masses) {
  if (edges.empty()) throw std::invalid_argument("bin masses need at least one edge");
  require_sizes(edges.size() + 1, masses.size());
  checked(backend).logistic_bin_masses(edges.data(), edges.size(), mu, scale, masses.data());
}

void scale_floor(Backend backend, std::span<const double> probs, double total,
                 std::span<std::uint32_t> floors, std::span<double> rems) {
  require_sizes(probs.size(), floors.size());
  require_sizes(probs.size(), rems.size());
  checked(backend).scale_floor(probs.data(), probs.size(), total, floors.data(), rems.data());
}

void logistic_cdf(std::span<const double> x, double mu, double scale, std::span<double> out) {
  logistic_cdf(active_backend(), x, mu, scale, out);
}

void logistic_bin_masses(std::span<const double> edges, double mu, double scale,
                         std::span<double> masses) {
  logistic_bin_masses(active_backend(), edges, mu, scale, masses);
}

void scale_floor(std::span<const double> probs, double total,
                 std::span<std::uint32_t> floors, std::span<double> rems) {
  scale_floor(active_backend(), probs, total, floors, rems);
}

}  // namespace bitswap::kernels
