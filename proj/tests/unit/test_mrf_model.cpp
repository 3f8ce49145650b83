#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "lscut/problem_io.hpp"

using namespace lscut;
using lscut::testing::random_grid_problem;

namespace {

MrfProblem chain(int k, std::vector<double> data_terms, PriorSpec prior, double lambda, std::vector<double> data = {0, 0}) {
  return MrfProblem(2, k, {{0, 1}}, std::move(data), std::move(data_terms), std::move(prior), lambda);
}

}  // namespace

TEST(MrfModel, PottsDiagonalIsZero) {
  PriorSpec p = lscut::testing::gaussian_prior(2.0);
  const auto m = chain(3, std::vector<double>(6, 0.0), p, 7.5, {0.1, 0.9});
  for (int l = 0; l < 3; ++l) EXPECT_EQ(m.interaction(0, 1, l, l), 0.0);
}

TEST(MrfModel, GaussianEqualDataGivesOne) {
  const auto m = chain(2, std::vector<double>(4, 0.0), lscut::testing::gaussian_prior(1.0), 1.0, {0.4, 0.4});
  EXPECT_DOUBLE_EQ(m.interaction(0, 1, 0, 1), 1.0);
}

TEST(MrfModel, TruncatedQuadratic) {
  PriorSpec p;
  p.label_kind = LabelKind::truncated_quadratic;
  p.T = 4.0;
  const auto m = chain(5, std::vector<double>(10, 0.0), p, 1.0);
  EXPECT_DOUBLE_EQ(m.interaction(0, 1, 0, 3), 4.0);
  EXPECT_DOUBLE_EQ(m.interaction(0, 1, 1, 2), 1.0);
}

TEST(MrfModel, LabelKinds) {
  PriorSpec p;
  p.label_kind = LabelKind::linear;
  EXPECT_EQ(p.label_penalty(1, 4, 5), 3.0);
  p.label_kind = LabelKind::quadratic;
  EXPECT_EQ(p.label_penalty(1, 4, 5), 9.0);
  p.label_kind = LabelKind::truncated_linear;
  p.T = 2.0;
  EXPECT_EQ(p.label_penalty(1, 4, 5), 2.0);
  p.data_kind = DataKind::reciprocal;
  p.beta = 3.0;
  EXPECT_DOUBLE_EQ(p.data_penalty(0.0, 1.0), 0.25);
}

TEST(MrfModel, InteractionOnNonEdgeThrows) {
  const MrfProblem m(3, 2, {{0, 1}}, {0, 0, 0}, std::vector<double>(6, 0.0), {}, 1.0);
  EXPECT_THROW(m.interaction(0, 2, 0, 1), InvalidArgument);
  EXPECT_THROW(m.interaction(0, 1, 0, 2), RangeError);
}

TEST(MrfModel, EnergyExamples) {
  const MrfProblem single(1, 2, {}, {0}, {2, 5}, {}, 1.0);
  EXPECT_EQ(single.energy(std::vector<int>{0}), 2.0);

  const auto c = chain(2, std::vector<double>(4, 0.0), {}, 3.0);
  EXPECT_EQ(c.energy(std::vector<int>{0, 1}), 3.0);
  EXPECT_EQ(c.energy(std::vector<int>{1, 1}), 0.0);
  EXPECT_THROW(c.energy(std::vector<int>{0, 2}), RangeError);
  EXPECT_THROW(c.energy(std::vector<int>{0}), InvalidArgument);
}

TEST(MrfModel, LambdaZeroEnergyIsDataSum) {
  std::mt19937_64 rng(3);
  const auto m = random_grid_problem(3, 3, 4, lscut::testing::gaussian_prior(1.0), 0.0, rng);
  std::uniform_int_distribution<int> lab(0, 3);
  for (int t = 0; t < 20; ++t) {
    std::vector<int> l(9);
    double expect = 0.0;
    for (int i = 0; i < 9; ++i) {
      l[i] = lab(rng);
      expect += m.data_term(i, l[i]);
    }
    EXPECT_EQ(m.energy(l), expect);
  }
}

TEST(MrfModel, InteractionSymmetric) {
  std::mt19937_64 rng(5);
  for (auto kind : {LabelKind::potts, LabelKind::linear, LabelKind::quadratic, LabelKind::truncated_linear,
                    LabelKind::truncated_quadratic}) {
    PriorSpec p = lscut::testing::gaussian_prior(1.5);
    p.label_kind = kind;
    p.T = 2.5;
    const auto m = random_grid_problem(2, 2, 5, p, 0.7, rng);
    for (const auto& e : m.edges())
      for (int a = 0; a < 5; ++a)
        for (int c = 0; c < 5; ++c) {
          EXPECT_EQ(m.interaction(e.i, e.j, a, c), m.interaction(e.j, e.i, c, a));
          EXPECT_GE(m.interaction(e.i, e.j, a, c), 0.0);
        }
  }
}

TEST(MrfModel, PottsLocalEnergyChange) {
  std::mt19937_64 rng(11);
  const auto m = random_grid_problem(3, 3, 3, {}, 1.3, rng);
  std::uniform_int_distribution<int> lab(0, 2), vert(0, 8);
  for (int t = 0; t < 50; ++t) {
    std::vector<int> l(9);
    for (auto& x : l) x = lab(rng);
    const int v = vert(rng);
    std::vector<int> l2 = l;
    l2[v] = (l[v] + 1) % 3;
    int disagree_before = 0, disagree_after = 0;
    for (const auto& e : m.edges()) {
      if (e.i != v && e.j != v) continue;
      disagree_before += l[e.i] != l[e.j];
      disagree_after += l2[e.i] != l2[e.j];
    }
    const double expect = m.data_term(v, l2[v]) - m.data_term(v, l[v]) + 1.3 * (disagree_after - disagree_before);
    EXPECT_NEAR(m.energy(l2) - m.energy(l), expect, 1e-12);
  }
}

TEST(MrfModel, EnergyNonNegative) {
  std::mt19937_64 rng(17);
  const auto m = random_grid_problem(4, 4, 6, lscut::testing::gaussian_prior(0.5), 2.0, rng);
  std::uniform_int_distribution<int> lab(0, 5);
  for (int t = 0; t < 50; ++t) {
    std::vector<int> l(16);
    for (auto& x : l) x = lab(rng);
    EXPECT_GE(m.energy(l), 0.0);
  }
}

TEST(MrfModel, ValidationErrors) {
  const std::vector<double> d2{0, 0}, dt(4, 0.0);
  EXPECT_THROW(MrfProblem(2, 2, {{0, 0}}, d2, dt, {}, 1.0), InvalidArgument);
  EXPECT_THROW(MrfProblem(2, 2, {{0, 1}, {1, 0}}, d2, dt, {}, 1.0), InvalidArgument);
  EXPECT_THROW(MrfProblem(2, 2, {{0, 2}}, d2, dt, {}, 1.0), RangeError);
  EXPECT_THROW(MrfProblem(2, 2, {}, d2, {0, 0, -1, 0}, {}, 1.0), InvalidArgument);
  EXPECT_THROW(MrfProblem(2, 2, {}, d2, {0, 0, NAN, 0}, {}, 1.0), InvalidArgument);
  EXPECT_THROW(MrfProblem(2, 2, {}, d2, {0, 0, 0}, {}, 1.0), InvalidArgument);
  EXPECT_THROW(MrfProblem(2, 2, {}, d2, dt, {}, -1.0), InvalidArgument);
  EXPECT_THROW(MrfProblem(2, 1, {}, d2, {0, 0}, {}, 1.0), InvalidArgument);
  PriorSpec t;
  t.label_kind = LabelKind::truncated_linear;
  t.T = 0.0;
  EXPECT_THROW(MrfProblem(2, 2, {}, d2, dt, t, 1.0), InvalidArgument);
  PriorSpec table;
  table.label_kind = LabelKind::table;
  table.table = {0, 1, 1};
  EXPECT_THROW(MrfProblem(2, 2, {}, d2, dt, table, 1.0), InvalidArgument);
}

TEST(MrfModel, TableKindAndEdgeTables) {
  PriorSpec p;
  p.label_kind = LabelKind::table;
  p.table = {0, 2, 7, 0};
  auto m = chain(2, std::vector<double>(4, 0.0), p, 2.0);
  EXPECT_EQ(m.interaction(0, 1, 0, 1), 4.0);
  EXPECT_EQ(m.interaction(1, 0, 0, 1), 14.0);
  m.set_edge_tables({{0, 1, 1, 0}});
  EXPECT_EQ(m.interaction(0, 1, 1, 0), 2.0);
  EXPECT_THROW(m.set_edge_tables({}), InvalidArgument);
}

TEST(MrfModel, GridEdgesOrder) {
  const auto e = grid_edges(3, 2);
  ASSERT_EQ(e.size(), 7u);
  EXPECT_EQ(e[0], (Edge{0, 1}));
  EXPECT_EQ(e[1], (Edge{0, 3}));
  EXPECT_EQ(e[2], (Edge{1, 2}));
  EXPECT_EQ(e.back(), (Edge{4, 5}));
}

TEST(ProblemIo, RoundTrip) {
  std::mt19937_64 rng(23);
  PriorSpec p = lscut::testing::gaussian_prior(1.25);
  p.label_kind = LabelKind::truncated_linear;
  p.T = 1.5;
  auto m = random_grid_problem(3, 2, 3, p, 0.4, rng);
  m.set_seed(2, 1);
  const auto j = problem_to_json(m);
  const auto back = problem_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.num_vertices(), m.num_vertices());
  EXPECT_EQ(back.edges(), m.edges());
  EXPECT_EQ(back.data_terms(), m.data_terms());
  EXPECT_EQ(back.data(), m.data());
  EXPECT_EQ(back.seeds(), m.seeds());
  EXPECT_EQ(back.label_table(), m.label_table());
  EXPECT_EQ(back.lambda(), m.lambda());
}

TEST(ProblemIo, MalformedInput) {
  EXPECT_THROW(problem_from_json(nlohmann::json::parse(R"({"k": 2})")), InvalidArgument);
  EXPECT_THROW(problem_from_json(nlohmann::json::parse(
                   R"({"num_vertices": 1, "k": 2, "data_terms": [0, 1], "prior": {"label_kind": "cubic"}})")),
               InvalidArgument);
  EXPECT_THROW(load_problem("/nonexistent/problem.json"), IoError);
}
