#pragma once

// Monte Carlo studies of the least-squares approximation: relative residuals
// of the data/prior systems over random right-hand sides, and the effect of
// weight errors on a grid-shaped expanded graph's min cut.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lscut/cut_graph.hpp"
#include "lscut/label_codec.hpp"
#include "lscut/ls_systems.hpp"
#include "lscut/maxflow.hpp"
#include "lscut/mrf_model.hpp"

namespace lscut {

/// Independent generator for (seed, stream, a, b) so results do not depend on
/// evaluation order.
inline std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t a = 0, std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
};

inline MeanStd mean_std(std::span<const double> xs) {
  MeanStd out;
  if (xs.empty()) return out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Residual Monte Carlo

namespace streams {
inline constexpr std::uint64_t data_rhs = 1;
inline constexpr std::uint64_t prior_rhs = 2;
inline constexpr std::uint64_t grid = 3;
inline constexpr std::uint64_t error_model = 4;
}  // namespace streams

inline constexpr Eigen::Index kResidualBatch = 64;

/// e_b for `trials` random data-term rows: k uniform [0,1] penalties, laid out
/// over the 2^b codes with extra codes folded onto their merge targets.
inline std::vector<double> data_residual_samples(int k, int trials, std::uint64_t seed, SystemCache& cache) {
  const LabelSpace space(k);
  const DataSystem& sys = cache.data(space.b());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(trials));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> d(static_cast<std::size_t>(k));
  for (int t0 = 0; t0 < trials; t0 += kResidualBatch) {
    const Eigen::Index n = std::min<Eigen::Index>(kResidualBatch, trials - t0);
    Matrix rhs(space.num_codes(), n);
    for (Eigen::Index c = 0; c < n; ++c) {
      auto rng = derived_rng(seed, streams::data_rhs, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(t0 + c));
      for (auto& x : d) x = unif(rng);
      for (std::uint32_t code = 0; code < space.num_codes(); ++code) rhs(code, c) = d[space.merge(code)];
    }
    const Vector e = relative_residuals(sys.A, sys.A_pinv, rhs);
    out.insert(out.end(), e.data(), e.data() + e.size());
  }
  return out;
}

/// e_t for `trials` random k x k interaction tables (uniform [0,1] entries),
/// laid out over all code pairs with extra codes folded.
inline std::vector<double> prior_residual_samples(int k, int trials, std::uint64_t seed, SystemCache& cache) {
  const LabelSpace space(k);
  const PriorSystem& sys = cache.prior(space.b());
  const std::uint32_t codes = space.num_codes();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(trials));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> table(static_cast<std::size_t>(k) * k);
  for (int t0 = 0; t0 < trials; t0 += kResidualBatch) {
    const Eigen::Index n = std::min<Eigen::Index>(kResidualBatch, trials - t0);
    Matrix rhs(static_cast<Eigen::Index>(codes) * codes, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      auto rng = derived_rng(seed, streams::prior_rhs, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(t0 + c));
      for (auto& x : table) x = unif(rng);
      for (std::uint32_t m = 0; m < codes; ++m) {
        const std::size_t row = static_cast<std::size_t>(space.merge(m)) * k;
        for (std::uint32_t q = 0; q < codes; ++q)
          rhs(static_cast<Eigen::Index>(m) * codes + q, c) = table[row + space.merge(q)];
      }
    }
    const Vector e = relative_residuals(sys.S, sys.S_pinv, rhs);
    out.insert(out.end(), e.data(), e.data() + e.size());
  }
  return out;
}

struct ResidualRow {
  int k = 0;
  int b = 0;
  MeanStd e_b;
  MeanStd e_t;
  std::vector<double> samples_e_b;
  std::vector<double> samples_e_t;
};

struct ResidualStats {
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<ResidualRow> rows;
};

struct ResidualOptions {
  bool data = true;
  bool prior = true;
};

inline ResidualStats ls_error_mc(std::span<const int> k_list, int trials, std::uint64_t seed,
                                 ResidualOptions opts = {}, SystemCache& cache = SystemCache::global()) {
  if (trials < 1) throw InvalidArgument("ls_error_mc: trials must be >= 1");
  ResidualStats stats;
  stats.seed = seed;
  stats.trials = trials;
  for (int k : k_list) {
    ResidualRow row;
    row.k = k;
    row.b = bit_width(k);
    if (opts.data) {
      row.samples_e_b = data_residual_samples(k, trials, seed, cache);
      row.e_b = mean_std(row.samples_e_b);
    }
    if (opts.prior) {
      row.samples_e_t = prior_residual_samples(k, trials, seed, cache);
      row.e_t = mean_std(row.samples_e_t);
    }
    stats.rows.push_back(std::move(row));
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Cut perturbation study

enum class PerturbationMode { ls, random };

struct PerturbationRow {
  int k = 0;
  int b = 0;
  MeanStd delta_cut;
  MeanStd acc;
  std::vector<double> samples_delta_cut;
  std::vector<double> samples_acc;
};

struct PerturbationStats {
  PerturbationMode mode = PerturbationMode::ls;
  double noise_level = 0.0;
  int grid_w = 0;
  int grid_h = 0;
  int realizations = 0;
  std::uint64_t seed = 0;
  std::vector<PerturbationRow> rows;
};

struct PerturbationOptions {
  PerturbationMode mode = PerturbationMode::ls;
  double noise_level = 0.25;  // random mode: additive U[0, noise_level]
  int grid_w = 25;
  int grid_h = 25;
  int realizations = 10;
  int error_trials = 200;     // ls mode: residual samples per k for the error model
  std::uint64_t seed = 1;
};

namespace detail {

inline Vector uniform_group(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = unif(rng);
  return v;
}

/// w + r * |w| * u with u uniform on the unit sphere; negatives are clamped
/// by the graph assembly.
inline Vector perturb_on_sphere(const Vector& w, double rel_norm, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(w.size());
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = normal(rng);
    norm = u.norm();
  } while (!(norm > 0.0));
  return w + (rel_norm * w.norm() / norm) * u;
}

inline double draw_sample(std::span<const double> samples, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
  return samples[pick(rng)];
}

}  // namespace detail

/// One realization: uniform capacities on the expanded grid topology and a
/// perturbed copy. Returns (relative cut-cost error, fraction of inner nodes
/// on the same side).
inline std::pair<double, double> perturbation_trial(int b, int grid_w, int grid_h, const PerturbationOptions& opts,
                                                    std::span<const double> e_b, std::span<const double> e_t,
                                                    std::mt19937_64& rng) {
  const int nv = grid_w * grid_h;
  const auto edges = grid_edges(grid_w, grid_h);
  std::vector<Vector> vw(static_cast<std::size_t>(nv)), ew(edges.size());
  for (auto& g : vw) g = detail::uniform_group(num_data_unknowns(b), rng);
  for (auto& g : ew) g = detail::uniform_group(num_prior_unknowns(b), rng);

  std::vector<Vector> pvw(vw.size()), pew(ew.size());
  if (opts.mode == PerturbationMode::ls) {
    for (std::size_t i = 0; i < vw.size(); ++i) pvw[i] = detail::perturb_on_sphere(vw[i], detail::draw_sample(e_b, rng), rng);
    for (std::size_t e = 0; e < ew.size(); ++e) pew[e] = detail::perturb_on_sphere(ew[e], detail::draw_sample(e_t, rng), rng);
  } else {
    std::uniform_real_distribution<double> noise(0.0, opts.noise_level);
    auto add_noise = [&](const Vector& w) {
      Vector out = w;
      for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += opts.noise_level > 0.0 ? noise(rng) : 0.0;
      return out;
    };
    for (std::size_t i = 0; i < vw.size(); ++i) pvw[i] = add_noise(vw[i]);
    for (std::size_t e = 0; e < ew.size(); ++e) pew[e] = add_noise(ew[e]);
  }

  const BinaryCutGraph g = assemble_graph(b, nv, edges, vw, ew);
  const BinaryCutGraph gp = assemble_graph(b, nv, edges, pvw, pew);
  const MinCutResult c = min_cut(g.to_network());
  const MinCutResult cp = min_cut(gp.to_network());
  const double dc = c.flow_value > 0.0 ? std::abs(c.flow_value - cp.flow_value) / c.flow_value : 0.0;
  std::size_t same = 0;
  for (int v = 0; v < g.num_inner_nodes; ++v) same += (c.s_side[v] == cp.s_side[v]);
  return {dc, static_cast<double>(same) / static_cast<double>(g.num_inner_nodes)};
}

inline PerturbationStats cut_perturbation(std::span<const int> k_list, const PerturbationOptions& opts,
                                          SystemCache& cache = SystemCache::global()) {
  if (opts.grid_w < 2 || opts.grid_h < 2) throw InvalidArgument("cut_perturbation: grid must be at least 2x2");
  if (opts.realizations < 1) throw InvalidArgument("cut_perturbation: realizations must be >= 1");
  if (opts.mode == PerturbationMode::random && opts.noise_level < 0.0)
    throw InvalidArgument("cut_perturbation: noise level must be >= 0");
  PerturbationStats stats;
  stats.mode = opts.mode;
  stats.noise_level = opts.noise_level;
  stats.grid_w = opts.grid_w;
  stats.grid_h = opts.grid_h;
  stats.realizations = opts.realizations;
  stats.seed = opts.seed;
  for (int k : k_list) {
    PerturbationRow row;
    row.k = k;
    row.b = bit_width(k);
    std::vector<double> e_b, e_t;
    if (opts.mode == PerturbationMode::ls) {
      const std::uint64_t error_seed = derived_rng(opts.seed, streams::error_model)();
      e_b = data_residual_samples(k, opts.error_trials, error_seed, cache);
      e_t = prior_residual_samples(k, opts.error_trials, error_seed, cache);
    }
    for (int r = 0; r < opts.realizations; ++r) {
      auto rng = derived_rng(opts.seed, streams::grid, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(r));
      auto [dc, acc] = perturbation_trial(row.b, opts.grid_w, opts.grid_h, opts, e_b, e_t, rng);
      row.samples_delta_cut.push_back(dc);
      row.samples_acc.push_back(acc);
    }
    row.delta_cut = mean_std(row.samples_delta_cut);
    row.acc = mean_std(row.samples_acc);
    stats.rows.push_back(std::move(row));
  }
  return stats;
}

// ---------------------------------------------------------------------------
// CSV: k,metric,mean,std,trials

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline void write_residual_csv(std::ostream& out, const ResidualStats& s) {
  out << "k,metric,mean,std,trials\n";
  for (const auto& r : s.rows) {
    if (!r.samples_e_b.empty())
      out << r.k << ",e_b," << format_number(r.e_b.mean) << ',' << format_number(r.e_b.std) << ',' << s.trials << '\n';
    if (!r.samples_e_t.empty())
      out << r.k << ",e_t," << format_number(r.e_t.mean) << ',' << format_number(r.e_t.std) << ',' << s.trials << '\n';
  }
}

inline void write_perturbation_csv(std::ostream& out, const PerturbationStats& s) {
  out << "k,metric,mean,std,trials\n";
  for (const auto& r : s.rows) {
    out << r.k << ",delta_cut," << format_number(r.delta_cut.mean) << ',' << format_number(r.delta_cut.std) << ','
        << s.realizations << '\n';
    out << r.k << ",acc," << format_number(r.acc.mean) << ',' << format_number(r.acc.std) << ',' << s.realizations << '\n';
  }
}

}  // namespace lscut
