#pragma once

// Exact s-t max-flow / min-cut (Dinic) on a directed network with double
// capacities. The returned source side is the set of nodes reachable from the
// source in the final residual graph, which makes the cut unique for a given
// network and arc order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lscut/errors.hpp"

namespace lscut {

struct FlowArc {
  int from;
  int to;
  double capacity;
};

struct FlowNetwork {
  int node_count = 0;
  int source = 0;
  int sink = 1;
  std::vector<FlowArc> arcs;
};

struct MinCutResult {
  double flow_value = 0.0;
  std::vector<std::uint8_t> s_side;  // 1 = source side
  std::vector<double> arc_flow;      // flow on each input arc
};

inline void validate(const FlowNetwork& net) {
  if (net.node_count < 2) throw InvalidArgument("flow network needs at least two nodes");
  auto in_range = [&](int v) { return v >= 0 && v < net.node_count; };
  if (!in_range(net.source) || !in_range(net.sink)) throw RangeError("terminal node out of range");
  if (net.source == net.sink) throw InvalidArgument("source and sink must differ");
  for (const auto& a : net.arcs) {
    if (!in_range(a.from) || !in_range(a.to)) throw RangeError("arc endpoint out of range");
    if (!std::isfinite(a.capacity)) throw InvalidArgument("arc capacity must be finite");
    if (a.capacity < 0.0) throw InvalidArgument("negative arc capacity " + std::to_string(a.capacity));
  }
}

/// Total capacity of arcs leaving the source side.
inline double cut_capacity(const FlowNetwork& net, std::span<const std::uint8_t> s_side) {
  double sum = 0.0;
  for (const auto& a : net.arcs)
    if (s_side[a.from] && !s_side[a.to]) sum += a.capacity;
  return sum;
}

namespace detail {

class Dinic {
 public:
  // Residual capacity at or below kRelTol times the arc's own capacity counts
  // as saturated.
  static constexpr double kRelTol = 1e-12;

  explicit Dinic(const FlowNetwork& net) : n_(net.node_count), s_(net.source), t_(net.sink) {
    const std::size_t m = net.arcs.size();
    first_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (const auto& a : net.arcs) {
      ++first_[a.from + 1];
      ++first_[a.to + 1];
    }
    for (int v = 0; v < n_; ++v) first_[v + 1] += first_[v];
    to_.resize(2 * m);
    res_.resize(2 * m);
    eps_.resize(2 * m);
    rev_.resize(2 * m);
    fwd_.resize(m);
    std::vector<std::size_t> fill(first_.begin(), first_.end() - 1);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& a = net.arcs[i];
      const std::size_t e = fill[a.from]++;
      const std::size_t r = fill[a.to]++;
      to_[e] = a.to;
      res_[e] = a.capacity;
      to_[r] = a.from;
      res_[r] = 0.0;
      eps_[e] = eps_[r] = kRelTol * a.capacity;
      rev_[e] = r;
      rev_[r] = e;
      fwd_[i] = e;
    }
  }

  double run() {
    double total = 0.0;
    while (build_levels()) total += blocking_flow();
    return total;
  }

  std::vector<std::uint8_t> source_side() const {
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(n_), 0);
    std::vector<int> queue{s_};
    seen[s_] = 1;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int u = queue[h];
      for (std::size_t e = first_[u]; e < first_[u + 1]; ++e)
        if (usable(e) && !seen[to_[e]]) {
          seen[to_[e]] = 1;
          queue.push_back(to_[e]);
        }
    }
    return seen;
  }

  std::vector<double> arc_flow(const FlowNetwork& net) const {
    std::vector<double> f(net.arcs.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = res_[rev_[fwd_[i]]];
    return f;
  }

 private:
  bool usable(std::size_t e) const { return res_[e] > eps_[e]; }

  bool build_levels() {
    level_.assign(static_cast<std::size_t>(n_), -1);
    std::vector<int> queue{s_};
    level_[s_] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int u = queue[h];
      for (std::size_t e = first_[u]; e < first_[u + 1]; ++e)
        if (usable(e) && level_[to_[e]] < 0) {
          level_[to_[e]] = level_[u] + 1;
          queue.push_back(to_[e]);
        }
    }
    return level_[t_] >= 0;
  }

  double blocking_flow() {
    std::vector<std::size_t> it(first_.begin(), first_.end() - 1);
    std::vector<std::size_t> path;
    double pushed = 0.0;
    int u = s_;
    for (;;) {
      if (u == t_) {
        double f = std::numeric_limits<double>::infinity();
        for (auto e : path) f = std::min(f, res_[e]);
        for (auto e : path) {
          res_[e] -= f;
          res_[rev_[e]] += f;
        }
        pushed += f;
        path.clear();
        u = s_;
        continue;
      }
      bool advanced = false;
      for (auto& e = it[u]; e < first_[u + 1]; ++e) {
        const int v = to_[e];
        if (usable(e) && level_[v] == level_[u] + 1) {
          path.push_back(e);
          u = v;
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      level_[u] = -1;  // dead end for the rest of the phase
      if (path.empty()) return pushed;
      const std::size_t e = path.back();
      path.pop_back();
      u = to_[rev_[e]];
      ++it[u];
    }
  }

  int n_, s_, t_;
  std::vector<std::size_t> first_;
  std::vector<int> to_;
  std::vector<double> res_;
  std::vector<double> eps_;
  std::vector<std::size_t> rev_;
  std::vector<std::size_t> fwd_;
  std::vector<int> level_;
};

}  // namespace detail

inline MinCutResult min_cut(const FlowNetwork& net) {
  validate(net);
  detail::Dinic solver(net);
  MinCutResult out;
  out.flow_value = solver.run();
  out.s_side = solver.source_side();
  out.arc_flow = solver.arc_flow(net);
  return out;
}

}  // namespace lscut
