#pragma once

// JSON problem files:
//   { "num_vertices": N, "k": K, "edges": [[i, j], ...], "data": [...],
//     "data_terms": [N*K row-major], "lambda": x,
//     "prior": { "label_kind": "...", "data_kind": "...", "T": t, "beta": b, "table": [K*K] },
//     "edge_tables": [[K*K], ...],          // optional, one per edge
//     "seeds": [[vertex, label], ...] }      // optional

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lscut/errors.hpp"
#include "lscut/mrf_model.hpp"

namespace lscut {

inline MrfProblem problem_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("num_vertices").get<int>();
    const int k = j.at("k").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : j.value("edges", nlohmann::json::array())) {
      if (!e.is_array() || e.size() != 2) throw InvalidArgument("edges: each entry must be a pair");
      edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    auto data = j.contains("data") ? j.at("data").get<std::vector<double>>() : std::vector<double>(n, 0.0);
    auto terms = j.at("data_terms").get<std::vector<double>>();

    PriorSpec prior;
    if (j.contains("prior")) {
      const auto& p = j.at("prior");
      prior.label_kind = label_kind_from_string(p.value("label_kind", std::string("potts")));
      prior.data_kind = data_kind_from_string(p.value("data_kind", std::string("constant")));
      prior.T = p.value("T", 1.0);
      prior.beta = p.value("beta", 0.0);
      if (p.contains("table")) prior.table = p.at("table").get<std::vector<double>>();
    }
    MrfProblem problem(n, k, std::move(edges), std::move(data), std::move(terms), std::move(prior),
                       j.value("lambda", 1.0));
    if (j.contains("edge_tables")) problem.set_edge_tables(j.at("edge_tables").get<std::vector<std::vector<double>>>());
    for (const auto& s : j.value("seeds", nlohmann::json::array())) {
      if (!s.is_array() || s.size() != 2) throw InvalidArgument("seeds: each entry must be [vertex, label]");
      problem.set_seed(s[0].get<int>(), s[1].get<int>());
    }
    return problem;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed problem: ") + e.what());
  }
}

inline nlohmann::json problem_to_json(const MrfProblem& p) {
  nlohmann::json j;
  j["num_vertices"] = p.num_vertices();
  j["k"] = p.k();
  auto edges = nlohmann::json::array();
  for (const auto& e : p.edges()) edges.push_back({e.i, e.j});
  j["edges"] = edges;
  j["data"] = p.data();
  j["data_terms"] = p.data_terms();
  j["lambda"] = p.lambda();
  nlohmann::json prior{{"label_kind", to_string(p.prior().label_kind)},
                       {"data_kind", to_string(p.prior().data_kind)},
                       {"T", p.prior().T},
                       {"beta", p.prior().beta}};
  if (p.prior().label_kind == LabelKind::table) prior["table"] = p.prior().table;
  j["prior"] = prior;
  if (!p.edge_tables().empty()) j["edge_tables"] = p.edge_tables();
  if (!p.seeds().empty()) {
    auto seeds = nlohmann::json::array();
    for (auto [v, l] : p.seeds()) seeds.push_back({v, l});
    j["seeds"] = seeds;
  }
  return j;
}

inline MrfProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("problem file '" + path + "' is not valid JSON: " + e.what());
  }
  return problem_from_json(j);
}

}  // namespace lscut
