#pragma once

#include <cstdint>
#include <vector>

#include "lscut/cut_graph.hpp"
#include "lscut/label_codec.hpp"
#include "lscut/ls_systems.hpp"
#include "lscut/maxflow.hpp"
#include "lscut/mrf_model.hpp"

namespace lscut {

struct SolveResult {
  Labeling labeling;
  std::vector<std::uint8_t> binary_labels;  // per inner node: 0 = source side, 1 = sink side
  double cut_cost = 0.0;
  double energy = 0.0;
  double mean_e_b = 0.0;
  double mean_e_t = 0.0;
  ClampStats clamp;
};

/// Decodes the b bits of each vertex (MSB first) and folds unused codes.
inline Labeling decode_labeling(std::span<const std::uint8_t> binary_labels, const LabelSpace& space, int num_vertices) {
  const int b = space.b();
  if (binary_labels.size() != static_cast<std::size_t>(b) * num_vertices)
    throw InvalidArgument("decode_labeling: expected b bits per vertex");
  Labeling labels(static_cast<std::size_t>(num_vertices));
  for (int i = 0; i < num_vertices; ++i)
    labels[i] = space.merge(decode(binary_labels.subspan(static_cast<std::size_t>(i) * b, static_cast<std::size_t>(b))));
  return labels;
}

inline SolveResult solve(const MrfProblem& problem, SystemCache& cache = SystemCache::global()) {
  const LabelSpace space(problem.k());
  const BinaryCutGraph g = build_graph(problem, space, cache.data(space.b()), cache.prior(space.b()));
  const MinCutResult cut = min_cut(g.to_network());

  SolveResult out;
  out.binary_labels.resize(static_cast<std::size_t>(g.num_inner_nodes));
  for (int v = 0; v < g.num_inner_nodes; ++v) out.binary_labels[v] = cut.s_side[v] ? 0 : 1;
  out.labeling = decode_labeling(out.binary_labels, space, problem.num_vertices());
  out.cut_cost = cut.flow_value;
  out.energy = problem.energy(out.labeling);
  out.mean_e_b = g.residuals.mean_e_b;
  out.mean_e_t = g.residuals.mean_e_t;
  out.clamp = g.clamp;
  return out;
}

}  // namespace lscut
