#include <gtest/gtest.h>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <bit>
#include <filesystem>
#include <random>
#include <sstream>

#include "lscut/ls_systems.hpp"

using namespace lscut;

namespace {

Matrix rows_of(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// Minimum-norm solution of a full-row-rank system via A^T (A A^T)^-1 b.
Vector min_norm_row_rank(const Matrix& a, const Vector& b) {
  const Matrix gram = a * a.transpose();
  return a.transpose() * gram.fullPivLu().solve(b);
}

// Least-squares solution of a full-column-rank system via (M^T M)^-1 M^T t.
Vector normal_equations(const Matrix& m, const Vector& t) {
  return (m.transpose() * m).ldlt().solve(m.transpose() * t);
}

// Projection of v onto the column space of m by modified Gram-Schmidt.
Vector gram_schmidt_project(const Matrix& m, const Vector& v) {
  std::vector<Vector> basis;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Vector q = m.col(c);
    for (const auto& u : basis) q -= u.dot(q) * u;
    if (q.norm() > 1e-10) basis.push_back(q / q.norm());
  }
  Vector p = Vector::Zero(v.size());
  for (const auto& u : basis) p += u.dot(v) * u;
  return p;
}

}  // namespace

TEST(LsSystems, DataMatrixB1) { EXPECT_EQ(data_matrix(1), rows_of({{0, 1}, {1, 0}})); }

TEST(LsSystems, DataMatrixB2) {
  EXPECT_EQ(data_matrix(2), rows_of({{0, 1, 0, 1, 0}, {0, 1, 1, 0, 1}, {1, 0, 0, 1, 1}, {1, 0, 1, 0, 0}}));
}

TEST(LsSystems, DataMatrixB3) {
  const Matrix a = data_matrix(3);
  ASSERT_EQ(a.rows(), 8);
  ASSERT_EQ(a.cols(), 9);
  EXPECT_EQ(Matrix(a.row(5)), rows_of({{1, 0, 0, 1, 1, 0, 1, 0, 1}}));
  EXPECT_EQ(Matrix(a.row(0)), rows_of({{0, 1, 0, 1, 0, 1, 0, 0, 0}}));
  EXPECT_EQ(Matrix(a.row(7)), rows_of({{1, 0, 1, 0, 1, 0, 0, 0, 0}}));
}

TEST(LsSystems, PriorMatrixExamples) {
  EXPECT_EQ(prior_matrix(1), rows_of({{0}, {1}, {1}, {0}}));
  const Matrix s2 = prior_matrix(2);
  ASSERT_EQ(s2.rows(), 16);
  ASSERT_EQ(s2.cols(), 4);
  EXPECT_EQ(Matrix(s2.row(1)), rows_of({{0, 1, 0, 1}}));
  EXPECT_EQ(Matrix(s2.row(15)), rows_of({{0, 0, 0, 0}}));
  EXPECT_EQ(Matrix(s2.row(0 * 4 + 2)), rows_of({{1, 0, 1, 0}}));
  EXPECT_EQ(Matrix(s2.row(3 * 4 + 0)), rows_of({{1, 1, 1, 1}}));
}

TEST(LsSystems, MatrixEntriesMatchXorDefinition) {
  for (int b = 1; b <= 4; ++b) {
    const Matrix s = prior_matrix(b);
    const int codes = 1 << b;
    for (int m = 0; m < codes; ++m)
      for (int n = 0; n < codes; ++n)
        for (int p = 0; p < b; ++p)
          for (int q = 0; q < b; ++q)
            EXPECT_EQ(s(m * codes + n, p * b + q), code_bit(m, p, b) ^ code_bit(n, q, b));
  }
}

TEST(LsSystems, DataRowSums) {
  for (int b = 1; b <= 8; ++b) {
    const Matrix a = data_matrix(b);
    ASSERT_EQ(a.cols(), num_data_unknowns(b));
    for (int n = 0; n < (1 << b); ++n) {
      const int ones = std::popcount(static_cast<unsigned>(n));
      EXPECT_EQ(a.row(n).sum(), b + ones * (b - ones)) << "b=" << b << " n=" << n;
    }
  }
}

TEST(LsSystems, RejectsBadBitWidth) {
  EXPECT_THROW(data_matrix(0), RangeError);
  EXPECT_THROW(prior_matrix(9), RangeError);
  EXPECT_THROW(build_data_system(9), RangeError);
}

TEST(LsSystems, PseudoinverseExamples) {
  const Matrix s1p = pseudoinverse(prior_matrix(1));
  EXPECT_EQ(s1p.rows(), 1);
  EXPECT_NEAR(s1p(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(s1p(0, 1), 0.5, 1e-12);
  EXPECT_NEAR(s1p(0, 2), 0.5, 1e-12);
  EXPECT_NEAR(s1p(0, 3), 0.0, 1e-12);

  const Matrix id = Matrix::Identity(5, 5);
  EXPECT_TRUE(pseudoinverse(id).isApprox(id, 1e-14));
  const Matrix a1 = data_matrix(1);
  EXPECT_TRUE(pseudoinverse(a1).isApprox(a1, 1e-14));
}

TEST(LsSystems, PseudoinverseOfRankDeficientMatrix) {
  const Matrix m = rows_of({{1, 2}, {2, 4}, {0, 0}});
  const auto p = pseudoinverse_svd(m);
  EXPECT_EQ(p.rank, 1);
  EXPECT_LT(penrose_errors(m, p.pinv).max(), 1e-12);
}

TEST(LsSystems, PenroseConditions) {
  for (int b = 1; b <= 5; ++b) {
    const auto a = build_data_system(b);
    const auto s = build_prior_system(b);
    EXPECT_LT(penrose_errors(a.A, a.A_pinv).max(), 1e-10) << b;
    EXPECT_LT(penrose_errors(s.S, s.S_pinv, 7).max(), 1e-10) << b;
  }
}

TEST(LsSystems, RankTable) {
  const auto rows = rank_table(6);
  const int a_rank[] = {2, 4, 7, 11, 16, 22};
  ASSERT_EQ(rows.size(), 12u);
  for (int b = 1; b <= 6; ++b) {
    const auto& a = rows[2 * (b - 1)];
    const auto& s = rows[2 * (b - 1) + 1];
    EXPECT_EQ(a.matrix, "A");
    EXPECT_EQ(a.equations, 1 << b);
    EXPECT_EQ(a.unknowns, 2 * b + b * (b - 1) / 2);
    EXPECT_EQ(a.rank, a_rank[b - 1]);
    EXPECT_EQ(s.matrix, "S");
    EXPECT_EQ(s.equations, 1 << (2 * b));
    EXPECT_EQ(s.unknowns, b * b);
    EXPECT_EQ(s.rank, b * b);
  }
  std::ostringstream csv;
  write_rank_table_csv(csv, rank_table(2));
  EXPECT_EQ(csv.str(), "b,matrix,equations,unknowns,rank\n1,A,2,2,2\n1,S,4,1,1\n2,A,4,5,4\n2,S,16,4,4\n");
}

TEST(LsSystems, SolveDataWeightsExamples) {
  const auto s1 = build_data_system(1);
  const std::vector<double> b{2, 5};
  const Vector x = solve_data_weights(s1, b);
  EXPECT_NEAR(x(0), 5.0, 1e-12);
  EXPECT_NEAR(x(1), 2.0, 1e-12);
  EXPECT_TRUE(solve_data_weights(s1, std::vector<double>{0, 0}).isZero());
  EXPECT_THROW(solve_data_weights(s1, std::vector<double>{1, 2, 3}), InvalidArgument);

  const auto s2 = build_data_system(2);
  const Vector ones = Vector::Ones(4);
  const Vector expect = min_norm_row_rank(data_matrix(2), ones);
  EXPECT_LT((solve_data_weights(s2, to_std(ones)) - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LsSystems, SolvePriorWeightsExamples) {
  const auto p1 = build_prior_system(1);
  const Vector y = solve_prior_weights(p1, std::vector<double>{0, 3, 5, 0});
  ASSERT_EQ(y.size(), 1);
  EXPECT_NEAR(y(0), 4.0, 1e-12);
  EXPECT_TRUE(solve_prior_weights(p1, std::vector<double>(4, 0.0)).isZero());
  EXPECT_THROW(solve_prior_weights(p1, std::vector<double>(3, 0.0)), InvalidArgument);

  const auto p2 = build_prior_system(2);
  Vector potts = Vector::Ones(16);
  for (int m = 0; m < 4; ++m) potts(m * 4 + m) = 0.0;
  const Vector expect = normal_equations(prior_matrix(2), potts);
  EXPECT_LT((solve_prior_weights(p2, to_std(potts)) - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LsSystems, ResidualExamples) {
  const auto s1 = build_data_system(1);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) EXPECT_LT(residual_data(s1, std::vector<double>{u(rng), u(rng)}), 1e-14);

  const auto s2 = build_data_system(2);
  const Vector col = data_matrix(2) * Vector::Ones(5);
  EXPECT_LT(residual_data(s2, to_std(col)), 1e-12);

  const auto p2 = build_prior_system(2);
  const Vector v = Vector::Unit(16, 1);
  const Vector proj = gram_schmidt_project(prior_matrix(2), v);
  EXPECT_NEAR(residual_prior(p2, to_std(v)), (v - proj).norm(), 1e-12);

  const auto s3 = build_data_system(3);
  const Vector w = Vector::Unit(8, 3);
  EXPECT_NEAR(residual_data(s3, to_std(w)), (w - gram_schmidt_project(data_matrix(3), w)).norm(), 1e-12);

  EXPECT_THROW(residual_data(s2, std::vector<double>(4, 0.0)), InvalidArgument);
  EXPECT_THROW(residual_prior(p2, std::vector<double>(16, 0.0)), InvalidArgument);
}

TEST(LsSystems, ResidualB2UnitVectorIsZero) {
  // A_2 has full row rank, so every right-hand side is fitted exactly.
  const auto s2 = build_data_system(2);
  const Vector v = Vector::Unit(4, 0);
  EXPECT_NEAR((v - gram_schmidt_project(data_matrix(2), v)).norm(), 0.0, 1e-12);
  EXPECT_LT(residual_data(s2, to_std(v)), 1e-12);
}

TEST(LsSystems, ScaleInvarianceAndBounds) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int b = 1; b <= 4; ++b) {
    const auto a = build_data_system(b);
    const auto s = build_prior_system(b);
    for (int t = 0; t < 10; ++t) {
      std::vector<double> v(a.A.rows()), w(s.S.rows());
      for (auto& x : v) x = u(rng);
      for (auto& x : w) x = u(rng);
      const double c = 3.7;
      std::vector<double> cv(v), cw(w);
      for (auto& x : cv) x *= c;
      for (auto& x : cw) x *= c;
      EXPECT_NEAR(residual_data(a, cv), residual_data(a, v), 1e-12);
      EXPECT_NEAR(residual_prior(s, cw), residual_prior(s, w), 1e-12);
      EXPECT_LT((solve_data_weights(a, cv) - c * solve_data_weights(a, v)).cwiseAbs().maxCoeff(), 1e-11);
      EXPECT_LT((solve_prior_weights(s, cw) - c * solve_prior_weights(s, w)).cwiseAbs().maxCoeff(), 1e-11);
      const double ed = residual_data(a, v), ep = residual_prior(s, w);
      EXPECT_GE(ed, 0.0);
      EXPECT_LE(ed, 1.0);
      EXPECT_GE(ep, 0.0);
      EXPECT_LE(ep, 1.0);
    }
  }
}

TEST(LsSystems, RelativeResidualsBatchMatchesSingle) {
  const auto s = build_prior_system(3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix rhs(s.S.rows(), 5);
  for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs.data()[i] = u(rng);
  const Vector e = relative_residuals(s.S, s.S_pinv, rhs);
  for (Eigen::Index c = 0; c < 5; ++c) EXPECT_NEAR(e(c), residual_prior(s, to_std(rhs.col(c))), 1e-14);
}

TEST(LsSystems, CacheFileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "lscut_cache_test";
  std::filesystem::remove_all(dir);
  {
    SystemCache cache(dir);
    EXPECT_EQ(cache.data(3).rank, 7);
    EXPECT_EQ(cache.prior(2).rank, 4);
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "A_pinv_b3.bin"));
  EXPECT_TRUE(std::filesystem::exists(dir / "S_pinv_b2.bin"));
  SystemCache reloaded(dir);
  const auto fresh = build_data_system(3);
  EXPECT_EQ(reloaded.data(3).A_pinv, fresh.A_pinv);
  EXPECT_EQ(reloaded.data(3).rank, 7);
  EXPECT_EQ(reloaded.prior(2).rank, 4);
  EXPECT_THROW(read_pinv_cache(dir / "A_pinv_b3.bin", 'S', 3, fresh.A_pinv.rows(), fresh.A_pinv.cols()), IoError);
  EXPECT_THROW(read_pinv_cache(dir / "A_pinv_b3.bin", 'A', 4, fresh.A_pinv.rows(), fresh.A_pinv.cols()), IoError);
  std::filesystem::remove_all(dir);
}
