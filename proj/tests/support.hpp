#pragma once

// Instance generators and independent checkers shared by the test binaries.

#include <cmath>
#include <cstdint>
#include <vector>

#include "algoselect/greedy.hpp"
#include "algoselect/random.hpp"

namespace testsupport {

using algoselect::Rng;
using namespace algoselect::greedy;

// G(n, p) graph with weights uniform on (0, 1).
inline MwisInstance random_mwis(Rng& rng, std::size_t n, double p = 0.4) {
  std::vector<Edge> edges;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) edges.emplace_back(u, v);
  std::vector<double> w(n);
  for (auto& x : w) x = rng.uniform_open();
  return make_mwis(n, edges, std::move(w));
}

// Values and sizes uniform on (0, 1), capacity half the total size.
inline KnapsackInstance random_knapsack(Rng& rng, std::size_t n) {
  KnapsackInstance k;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    k.values.push_back(rng.uniform_open());
    k.sizes.push_back(rng.uniform_open());
    total += k.sizes.back();
  }
  k.capacity = 0.5 * total;
  return k;
}

inline bool is_independent(const MwisInstance& x, const std::vector<std::uint32_t>& chosen) {
  std::vector<char> in(x.size(), 0);
  for (auto v : chosen) {
    if (v >= x.size() || in[v]) return false;
    in[v] = 1;
  }
  for (const auto& [u, v] : x.graph->edges())
    if (in[u] && in[v]) return false;
  return true;
}

inline bool fits(const KnapsackInstance& k, const std::vector<std::uint32_t>& chosen) {
  std::vector<char> in(k.size(), 0);
  double used = 0.0;
  for (auto i : chosen) {
    if (i >= k.size() || in[i]) return false;
    in[i] = 1;
    used += k.sizes[i];
  }
  return used <= k.capacity * (1.0 + 1e-12);
}

}  // namespace testsupport
