#pragma once

// Multi-label MRF: E(l) = sum_i D_i(l_i) + sum_{(i,j) in E} lambda * Vl(l_i, l_j) * Vd(d_i, d_j).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lscut/errors.hpp"
#include "lscut/label_codec.hpp"

namespace lscut {

enum class LabelKind { potts, linear, quadratic, truncated_linear, truncated_quadratic, table };
enum class DataKind { constant, gaussian, reciprocal };

struct PriorSpec {
  LabelKind label_kind = LabelKind::potts;
  DataKind data_kind = DataKind::constant;
  double T = 1.0;     // truncation threshold
  double beta = 0.0;
  std::vector<double> table;  // k*k row-major, only for LabelKind::table

  /// Vl(a, c); `k` is only consulted for the table kind.
  double label_penalty(int a, int c, int k) const {
    const double diff = std::abs(static_cast<double>(a) - static_cast<double>(c));
    switch (label_kind) {
      case LabelKind::potts: return a == c ? 0.0 : 1.0;
      case LabelKind::linear: return diff;
      case LabelKind::quadratic: return diff * diff;
      case LabelKind::truncated_linear: return std::min(T, diff);
      case LabelKind::truncated_quadratic: return std::min(T, diff * diff);
      case LabelKind::table: return table[static_cast<std::size_t>(a) * k + static_cast<std::size_t>(c)];
    }
    return 0.0;
  }

  double data_penalty(double di, double dj) const {
    const double sq = (di - dj) * (di - dj);
    switch (data_kind) {
      case DataKind::constant: return 1.0;
      case DataKind::gaussian: return std::exp(-beta * sq);
      case DataKind::reciprocal: return 1.0 / (1.0 + beta * sq);
    }
    return 1.0;
  }
};

inline std::string to_string(LabelKind kind) {
  switch (kind) {
    case LabelKind::potts: return "potts";
    case LabelKind::linear: return "linear";
    case LabelKind::quadratic: return "quadratic";
    case LabelKind::truncated_linear: return "truncated_linear";
    case LabelKind::truncated_quadratic: return "truncated_quadratic";
    case LabelKind::table: return "table";
  }
  return "potts";
}

inline std::string to_string(DataKind kind) {
  switch (kind) {
    case DataKind::constant: return "constant";
    case DataKind::gaussian: return "gaussian";
    case DataKind::reciprocal: return "reciprocal";
  }
  return "constant";
}

inline LabelKind label_kind_from_string(const std::string& s) {
  static const std::map<std::string, LabelKind> kinds = {
      {"potts", LabelKind::potts},
      {"linear", LabelKind::linear},
      {"quadratic", LabelKind::quadratic},
      {"truncated_linear", LabelKind::truncated_linear},
      {"truncated_quadratic", LabelKind::truncated_quadratic},
      {"table", LabelKind::table}};
  auto it = kinds.find(s);
  if (it == kinds.end()) throw InvalidArgument("unknown label_kind '" + s + "'");
  return it->second;
}

inline DataKind data_kind_from_string(const std::string& s) {
  if (s == "constant") return DataKind::constant;
  if (s == "gaussian") return DataKind::gaussian;
  if (s == "reciprocal") return DataKind::reciprocal;
  throw InvalidArgument("unknown data_kind '" + s + "'");
}

struct Edge {
  int i;
  int j;
  friend bool operator==(const Edge&, const Edge&) = default;
};

using Labeling = std::vector<int>;

class MrfProblem {
 public:
  MrfProblem(int num_vertices, int k, std::vector<Edge> edges, std::vector<double> data,
             std::vector<double> data_terms, PriorSpec prior, double lambda)
      : num_vertices_(num_vertices),
        k_(k),
        edges_(std::move(edges)),
        data_(std::move(data)),
        data_terms_(std::move(data_terms)),
        prior_(std::move(prior)),
        lambda_(lambda) {
    validate();
  }

  int num_vertices() const { return num_vertices_; }
  int k() const { return k_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& data() const { return data_; }
  const std::vector<double>& data_terms() const { return data_terms_; }
  const PriorSpec& prior() const { return prior_; }
  double lambda() const { return lambda_; }

  std::span<const double> data_row(int i) const {
    return {data_terms_.data() + static_cast<std::size_t>(i) * k_, static_cast<std::size_t>(k_)};
  }
  double data_term(int i, int label) const { return data_terms_[static_cast<std::size_t>(i) * k_ + label]; }

  /// Vl over all label pairs, row-major k*k.
  const std::vector<double>& label_table() const { return label_table_; }

  /// Per-edge k*k label penalty tables overriding the prior's label kind.
  const std::vector<std::vector<double>>& edge_tables() const { return edge_tables_; }
  void set_edge_tables(std::vector<std::vector<double>> tables) {
    if (tables.size() != edges_.size()) throw InvalidArgument("edge_tables: need one table per edge");
    for (const auto& t : tables) check_table(t, "edge_tables");
    edge_tables_ = std::move(tables);
  }

  /// Hard constraints: vertex -> required label.
  const std::map<int, int>& seeds() const { return seeds_; }
  void set_seed(int vertex, int label) {
    check_vertex(vertex);
    check_label(label);
    seeds_[vertex] = label;
  }

  /// Index of the edge joining i and j, or nullopt.
  std::optional<std::size_t> find_edge(int i, int j) const {
    auto it = edge_index_.find(key(i, j));
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
  }

  /// lambda * Vl * Vd for a pair of labels on edge e (oriented as stored).
  double edge_interaction(std::size_t e, int li, int lj) const {
    const Edge& ed = edges_[e];
    const auto cell = static_cast<std::size_t>(li) * k_ + lj;
    const double vl = edge_tables_.empty() ? label_table_[cell] : edge_tables_[e][cell];
    return lambda_ * vl * prior_.data_penalty(data_[ed.i], data_[ed.j]);
  }

  double interaction(int i, int j, int li, int lj) const {
    check_label(li);
    check_label(lj);
    auto e = find_edge(i, j);
    if (!e) throw InvalidArgument("(" + std::to_string(i) + ", " + std::to_string(j) + ") is not an edge");
    if (edges_[*e].i == i) return edge_interaction(*e, li, lj);
    return edge_interaction(*e, lj, li);
  }

  double energy(std::span<const int> labeling) const {
    if (labeling.size() != static_cast<std::size_t>(num_vertices_))
      throw InvalidArgument("labeling length does not match vertex count");
    double sum = 0.0;
    for (int i = 0; i < num_vertices_; ++i) {
      check_label(labeling[i]);
      sum += data_term(i, labeling[i]);
    }
    for (std::size_t e = 0; e < edges_.size(); ++e)
      sum += edge_interaction(e, labeling[edges_[e].i], labeling[edges_[e].j]);
    return sum;
  }

 private:
  static std::uint64_t key(int i, int j) {
    const auto lo = static_cast<std::uint64_t>(std::min(i, j));
    const auto hi = static_cast<std::uint64_t>(std::max(i, j));
    return (lo << 32) | hi;
  }

  void check_vertex(int v) const {
    if (v < 0 || v >= num_vertices_) throw RangeError("vertex " + std::to_string(v) + " out of range");
  }
  void check_label(int l) const {
    if (l < 0 || l >= k_) throw RangeError("label " + std::to_string(l) + " out of range [0, " + std::to_string(k_) + ")");
  }
  void check_table(const std::vector<double>& t, const char* what) const {
    if (t.size() != static_cast<std::size_t>(k_) * k_) throw InvalidArgument(std::string(what) + ": table must be k*k");
    for (double v : t)
      if (!std::isfinite(v) || v < 0.0) throw InvalidArgument(std::string(what) + ": entries must be finite and >= 0");
  }

  void validate() {
    if (num_vertices_ < 1) throw InvalidArgument("num_vertices must be positive");
    bit_width(k_);
    if (k_ > kMaxLabels) throw InvalidArgument("k exceeds " + std::to_string(kMaxLabels));
    if (data_.size() != static_cast<std::size_t>(num_vertices_)) throw InvalidArgument("data: need one value per vertex");
    if (data_terms_.size() != static_cast<std::size_t>(num_vertices_) * k_)
      throw InvalidArgument("data_terms: need num_vertices * k entries");
    for (double v : data_)
      if (!std::isfinite(v)) throw InvalidArgument("data values must be finite");
    for (double v : data_terms_)
      if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("data_terms entries must be finite and >= 0");
    if (!std::isfinite(lambda_) || lambda_ < 0.0) throw InvalidArgument("lambda must be finite and >= 0");
    if (prior_.label_kind == LabelKind::table) check_table(prior_.table, "prior.table");
    if ((prior_.label_kind == LabelKind::truncated_linear || prior_.label_kind == LabelKind::truncated_quadratic) &&
        !(prior_.T > 0.0))
      throw InvalidArgument("truncation threshold T must be positive");
    if (!std::isfinite(prior_.beta) || prior_.beta < 0.0) throw InvalidArgument("beta must be finite and >= 0");

    label_table_.resize(static_cast<std::size_t>(k_) * k_);
    for (int a = 0; a < k_; ++a)
      for (int c = 0; c < k_; ++c) label_table_[static_cast<std::size_t>(a) * k_ + c] = prior_.label_penalty(a, c, k_);

    edge_index_.reserve(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const Edge& ed = edges_[e];
      check_vertex(ed.i);
      check_vertex(ed.j);
      if (ed.i == ed.j) throw InvalidArgument("self-loop on vertex " + std::to_string(ed.i));
      if (!edge_index_.emplace(key(ed.i, ed.j), e).second)
        throw InvalidArgument("duplicate edge (" + std::to_string(ed.i) + ", " + std::to_string(ed.j) + ")");
    }
  }

  int num_vertices_;
  int k_;
  std::vector<Edge> edges_;
  std::vector<double> data_;
  std::vector<double> data_terms_;
  PriorSpec prior_;
  double lambda_;
  std::vector<double> label_table_;
  std::vector<std::vector<double>> edge_tables_;
  std::map<int, int> seeds_;
  std::unordered_map<std::uint64_t, std::size_t> edge_index_;
};

/// 4-connected grid edges in row-major order: right neighbour, then down.
inline std::vector<Edge> grid_edges(int width, int height) {
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(2 * width * height));
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const int v = y * width + x;
      if (x + 1 < width) edges.push_back({v, v + 1});
      if (y + 1 < height) edges.push_back({v, v + width});
    }
  return edges;
}

}  // namespace lscut
