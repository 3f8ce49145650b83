#pragma once

// Brute-force references. Ties resolve to the lexicographically smallest
// candidate (first vertex / node most significant).

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lscut/errors.hpp"
#include "lscut/maxflow.hpp"
#include "lscut/mrf_model.hpp"

namespace lscut {

struct OracleResult {
  double optimum_value = 0.0;
  std::vector<int> optimizer;
};

inline constexpr std::uint64_t kMaxMrfEnumeration = 10'000'000;
inline constexpr int kMaxCutEnumerationNodes = 20;

/// Minimum of the MRF energy over all k^|V| labelings, honouring seeds.
inline OracleResult exhaustive_mrf(const MrfProblem& problem) {
  const int n = problem.num_vertices();
  const int k = problem.k();
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    total *= static_cast<std::uint64_t>(k);
    if (total > kMaxMrfEnumeration)
      throw SizeError("exhaustive_mrf: k^|V| exceeds " + std::to_string(kMaxMrfEnumeration));
  }

  // Per-vertex allowed labels (seeded vertices are fixed).
  std::vector<int> lo(static_cast<std::size_t>(n), 0), hi(static_cast<std::size_t>(n), k - 1);
  for (auto [v, l] : problem.seeds()) lo[v] = hi[v] = l;

  std::vector<int> labels(lo);
  OracleResult best;
  best.optimum_value = std::numeric_limits<double>::infinity();
  for (;;) {
    const double e = problem.energy(labels);
    if (e < best.optimum_value) {
      best.optimum_value = e;
      best.optimizer = labels;
    }
    int pos = n - 1;
    while (pos >= 0 && labels[pos] == hi[pos]) {
      labels[pos] = lo[pos];
      --pos;
    }
    if (pos < 0) break;
    ++labels[pos];
  }
  return best;
}

/// Minimum cut over all bipartitions of the non-terminal nodes. The optimizer
/// holds one entry per node: 0 = source side, 1 = sink side.
inline OracleResult exhaustive_min_cut(const FlowNetwork& net) {
  validate(net);
  std::vector<int> inner;
  for (int v = 0; v < net.node_count; ++v)
    if (v != net.source && v != net.sink) inner.push_back(v);
  const int m = static_cast<int>(inner.size());
  if (m > kMaxCutEnumerationNodes)
    throw SizeError("exhaustive_min_cut: " + std::to_string(m) + " non-terminal nodes exceeds " +
                    std::to_string(kMaxCutEnumerationNodes));

  std::vector<std::uint8_t> s_side(static_cast<std::size_t>(net.node_count), 0);
  s_side[net.source] = 1;
  OracleResult best;
  best.optimum_value = std::numeric_limits<double>::infinity();
  // mask bit (m-1-idx) set => inner[idx] on the sink side, so increasing
  // masks enumerate assignments in lexicographic order.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    for (int idx = 0; idx < m; ++idx) s_side[inner[idx]] = ((mask >> (m - 1 - idx)) & 1u) ? 0 : 1;
    const double c = cut_capacity(net, s_side);
    if (c < best.optimum_value) {
      best.optimum_value = c;
      best.optimizer.assign(static_cast<std::size_t>(net.node_count), 0);
      for (int v = 0; v < net.node_count; ++v) best.optimizer[v] = s_side[v] ? 0 : 1;
    }
  }
  return best;
}

}  // namespace lscut
