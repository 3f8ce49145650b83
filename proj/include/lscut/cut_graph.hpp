#pragma once

// Expanded binary graph: vertex i becomes inner nodes i*b .. i*b+b-1 (bit 0 is
// the most significant), followed by the source and sink. Capacities come
// from the least-squares solves in ls_systems.hpp.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lscut/errors.hpp"
#include "lscut/label_codec.hpp"
#include "lscut/ls_systems.hpp"
#include "lscut/maxflow.hpp"
#include "lscut/mrf_model.hpp"

namespace lscut {

enum class EdgeClass : std::uint8_t { t_link_s, t_link_t, intra, n_sparse, n_full };

inline const char* to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::t_link_s: return "t_link_s";
    case EdgeClass::t_link_t: return "t_link_t";
    case EdgeClass::intra: return "intra";
    case EdgeClass::n_sparse: return "n_sparse";
    case EdgeClass::n_full: return "n_full";
  }
  return "?";
}

struct CutArc {
  int from;
  int to;
  double capacity;
  EdgeClass cls;
};

struct ClampStats {
  std::size_t count = 0;      // negative weights set to zero
  double magnitude = 0.0;     // sum of |w| over those weights
  std::size_t total = 0;      // weights considered

  double ratio() const { return total ? static_cast<double>(count) / static_cast<double>(total) : 0.0; }
};

struct ResidualSummary {
  double mean_e_b = 0.0;
  double mean_e_t = 0.0;
  std::size_t vertices = 0;  // vertices with a non-zero data vector
  std::size_t edges = 0;     // edges with a non-zero interaction vector
};

struct BinaryCutGraph {
  int b = 1;
  int num_vertices = 0;
  int num_inner_nodes = 0;
  int source = 0;
  int sink = 1;
  std::vector<CutArc> arcs;
  ClampStats clamp;
  ResidualSummary residuals;

  int node_count() const { return num_inner_nodes + 2; }
  int inner_node(int vertex, int bit) const { return vertex * b + bit; }

  std::size_t arc_count(EdgeClass c) const {
    return static_cast<std::size_t>(std::count_if(arcs.begin(), arcs.end(), [c](const CutArc& a) { return a.cls == c; }));
  }

  /// t-links are single arcs; intra and n-links are stored as antiparallel pairs.
  std::size_t undirected_count(EdgeClass c) const {
    const std::size_t n = arc_count(c);
    return (c == EdgeClass::t_link_s || c == EdgeClass::t_link_t) ? n : n / 2;
  }

  FlowNetwork to_network() const {
    FlowNetwork net;
    net.node_count = node_count();
    net.source = source;
    net.sink = sink;
    net.arcs.reserve(arcs.size());
    for (const auto& a : arcs) net.arcs.push_back({a.from, a.to, a.capacity});
    return net;
  }
};

/// "node_count N" then one "arc from to capacity class" line per arc, in
/// storage order.
inline void dump_graph(std::ostream& out, const BinaryCutGraph& g) {
  out << "node_count " << g.node_count() << '\n';
  char buf[64];
  for (const auto& a : g.arcs) {
    std::snprintf(buf, sizeof buf, "%.17g", a.capacity);
    out << "arc " << a.from << ' ' << a.to << ' ' << buf << ' ' << to_string(a.cls) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Right-hand sides

/// Entry n is D_i(merge(n)).
inline std::vector<double> assemble_data_vector(const MrfProblem& problem, const LabelSpace& space, int i) {
  if (i < 0 || i >= problem.num_vertices()) throw RangeError("vertex " + std::to_string(i) + " out of range");
  std::vector<double> rhs(space.num_codes());
  for (std::uint32_t n = 0; n < space.num_codes(); ++n) rhs[n] = problem.data_term(i, space.merge(n));
  return rhs;
}

/// Entry m*2^b + n is the interaction of (i, j) under labels (merge(m), merge(n)).
inline std::vector<double> assemble_prior_vector(const MrfProblem& problem, const LabelSpace& space, int i, int j) {
  auto e = problem.find_edge(i, j);
  if (!e) throw InvalidArgument("(" + std::to_string(i) + ", " + std::to_string(j) + ") is not an edge");
  const bool flipped = problem.edges()[*e].i != i;
  const std::uint32_t codes = space.num_codes();
  std::vector<double> rhs(static_cast<std::size_t>(codes) * codes);
  for (std::uint32_t m = 0; m < codes; ++m)
    for (std::uint32_t n = 0; n < codes; ++n) {
      const int lm = space.merge(m), ln = space.merge(n);
      rhs[static_cast<std::size_t>(m) * codes + n] =
          flipped ? problem.edge_interaction(*e, ln, lm) : problem.edge_interaction(*e, lm, ln);
    }
  return rhs;
}

// ---------------------------------------------------------------------------
// Assembly

namespace detail {

inline double clamp_weight(double w, ClampStats& stats) {
  ++stats.total;
  if (w < 0.0) {
    ++stats.count;
    stats.magnitude += -w;
    return 0.0;
  }
  return w;
}

inline void add_undirected(std::vector<CutArc>& arcs, int u, int v, double w, EdgeClass c) {
  arcs.push_back({u, v, w, c});
  arcs.push_back({v, u, w, c});
}

}  // namespace detail

/// Lays out arcs from per-vertex weight groups (ordered like the data-system
/// unknowns) and per-edge groups (ordered like the prior-system unknowns).
/// Negative weights are clamped to zero and counted.
inline BinaryCutGraph assemble_graph(int b, int num_vertices, std::span<const Edge> edges,
                                     std::span<const Vector> vertex_weights, std::span<const Vector> edge_weights) {
  check_bits(b);
  if (vertex_weights.size() != static_cast<std::size_t>(num_vertices) || edge_weights.size() != edges.size())
    throw InvalidArgument("assemble_graph: weight group count mismatch");
  BinaryCutGraph g;
  g.b = b;
  g.num_vertices = num_vertices;
  g.num_inner_nodes = b * num_vertices;
  g.source = g.num_inner_nodes;
  g.sink = g.num_inner_nodes + 1;
  const int intra = b * (b - 1) / 2;
  g.arcs.reserve(static_cast<std::size_t>(num_vertices) * (2 * b + 2 * intra) + edges.size() * 2 * b * b);

  for (int i = 0; i < num_vertices; ++i) {
    const Vector& x = vertex_weights[i];
    if (x.size() != num_data_unknowns(b)) throw InvalidArgument("assemble_graph: vertex weight group has wrong length");
    for (int p = 0; p < b; ++p) {
      const int node = g.inner_node(i, p);
      g.arcs.push_back({g.source, node, detail::clamp_weight(x(2 * p), g.clamp), EdgeClass::t_link_s});
      g.arcs.push_back({node, g.sink, detail::clamp_weight(x(2 * p + 1), g.clamp), EdgeClass::t_link_t});
    }
    int col = 2 * b;
    for (int m = 0; m < b; ++m)
      for (int n = m + 1; n < b; ++n)
        detail::add_undirected(g.arcs, g.inner_node(i, m), g.inner_node(i, n), detail::clamp_weight(x(col++), g.clamp),
                               EdgeClass::intra);
  }

  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Vector& y = edge_weights[e];
    if (y.size() != num_prior_unknowns(b)) throw InvalidArgument("assemble_graph: edge weight group has wrong length");
    for (int p = 0; p < b; ++p)
      for (int q = 0; q < b; ++q)
        detail::add_undirected(g.arcs, g.inner_node(edges[e].i, p), g.inner_node(edges[e].j, q),
                               detail::clamp_weight(y(p * b + q), g.clamp),
                               p == q ? EdgeClass::n_sparse : EdgeClass::n_full);
  }
  return g;
}

/// Multiplier applied to the largest finite capacity for hard-seed t-links.
inline constexpr double kSeedCapacityFactor = 1e6;

/// LS-fitted expanded graph for a problem.
inline BinaryCutGraph build_graph(const MrfProblem& problem, const LabelSpace& space, const DataSystem& data_sys,
                                  const PriorSystem& prior_sys) {
  const int b = space.b();
  if (data_sys.b != b || prior_sys.b != b) throw InvalidArgument("build_graph: systems do not match the label space");
  if (space.k() != problem.k()) throw InvalidArgument("build_graph: label space does not match the problem");
  const int nv = problem.num_vertices();
  const auto& edges = problem.edges();

  ResidualSummary res;
  std::vector<Vector> vertex_weights(static_cast<std::size_t>(nv));
  for (int i = 0; i < nv; ++i) {
    const auto rhs = assemble_data_vector(problem, space, i);
    vertex_weights[i] = solve_data_weights(data_sys, rhs);
    if (detail::as_vector(rhs).norm() > 0.0) {
      res.mean_e_b += residual_data(data_sys, rhs);
      ++res.vertices;
    }
  }

  std::vector<Vector> edge_weights(edges.size());
  if (problem.edge_tables().empty() && !edges.empty()) {
    // T_ij = lambda * Vd(d_i, d_j) * Vl(merge m, merge n): solve the shared
    // label part once and scale per edge.
    const std::uint32_t codes = space.num_codes();
    std::vector<double> base(static_cast<std::size_t>(codes) * codes);
    for (std::uint32_t m = 0; m < codes; ++m)
      for (std::uint32_t n = 0; n < codes; ++n)
        base[static_cast<std::size_t>(m) * codes + n] =
            problem.label_table()[static_cast<std::size_t>(space.merge(m)) * problem.k() + space.merge(n)];
    const Vector base_w = solve_prior_weights(prior_sys, base);
    const bool nonzero = detail::as_vector(base).norm() > 0.0;
    const double base_e = nonzero ? residual_prior(prior_sys, base) : 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double scale =
          problem.lambda() * problem.prior().data_penalty(problem.data()[edges[e].i], problem.data()[edges[e].j]);
      edge_weights[e] = scale * base_w;
      if (nonzero && scale > 0.0) {
        res.mean_e_t += base_e;
        ++res.edges;
      }
    }
  } else {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto rhs = assemble_prior_vector(problem, space, edges[e].i, edges[e].j);
      edge_weights[e] = solve_prior_weights(prior_sys, rhs);
      if (detail::as_vector(rhs).norm() > 0.0) {
        res.mean_e_t += residual_prior(prior_sys, rhs);
        ++res.edges;
      }
    }
  }
  if (res.vertices) res.mean_e_b /= static_cast<double>(res.vertices);
  if (res.edges) res.mean_e_t /= static_cast<double>(res.edges);

  BinaryCutGraph g = assemble_graph(b, nv, edges, vertex_weights, edge_weights);
  g.residuals = res;

  if (!problem.seeds().empty()) {
    double max_cap = 0.0;
    for (const auto& a : g.arcs) max_cap = std::max(max_cap, a.capacity);
    const double hard = kSeedCapacityFactor * (max_cap > 0.0 ? max_cap : 1.0);
    // Arc layout per vertex: (s-link, t-link) for each bit, then intra pairs.
    const std::size_t per_vertex = static_cast<std::size_t>(2 * b + b * (b - 1));
    for (auto [v, label] : problem.seeds()) {
      for (int p = 0; p < b; ++p) {
        const std::size_t base_arc = static_cast<std::size_t>(v) * per_vertex + 2 * static_cast<std::size_t>(p);
        // Bit 0 keeps the node with the source: severing its s-link must be prohibitive.
        const int bit = code_bit(static_cast<std::uint32_t>(label), p, b);
        g.arcs[base_arc + (bit == 0 ? 0 : 1)].capacity += hard;
      }
    }
  }
  return g;
}

inline BinaryCutGraph build_graph(const MrfProblem& problem, SystemCache& cache = SystemCache::global()) {
  LabelSpace space(problem.k());
  return build_graph(problem, space, cache.data(space.b()), cache.prior(space.b()));
}

}  // namespace lscut
