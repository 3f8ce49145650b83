#pragma once

// Least-squares systems that map multi-label penalties onto binary cut
// weights.
//
// Data system (one per vertex), A_b of shape 2^b x (2b + C(b,2)). Row n
// (code n, MSB first) holds
//   (n_1, !n_1, n_2, !n_2, ..., n_b, !n_b, n_1^n_2, n_1^n_3, ..., n_{b-1}^n_b)
// and the unknowns are ordered the same way:
//   (w_{1,s}, w_{1,t}, ..., w_{b,s}, w_{b,t}, w_{1,2}, w_{1,3}, ..., w_{b-1,b}).
//
// Prior system (one per edge), S_b of shape 2^(2b) x b^2. Row m*2^b + n
// holds m_p ^ n_q in p-major, q-minor order, matching the unknowns
// (w_{i1,j1}, w_{i1,j2}, ..., w_{ib,jb}).
//
// Both are solved with the Moore-Penrose pseudoinverse (minimum-norm least
// squares), computed once per b.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lscut/errors.hpp"
#include "lscut/label_codec.hpp"

namespace lscut {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline int num_data_unknowns(int b) { return 2 * b + b * (b - 1) / 2; }
inline int num_prior_unknowns(int b) { return b * b; }

inline void check_bits(int b) {
  if (b < 1 || b > kMaxBits) throw RangeError("bit width " + std::to_string(b) + " outside [1, " + std::to_string(kMaxBits) + "]");
}

inline double default_rel_tol(const Matrix& m) {
  return static_cast<double>(std::max(m.rows(), m.cols())) * std::numeric_limits<double>::epsilon();
}

struct Pseudoinverse {
  Matrix pinv;
  Vector singular_values;
  int rank = 0;
};

/// SVD pseudoinverse. Singular values below rel_tol * sigma_max count as zero;
/// rel_tol < 0 selects max(rows, cols) * machine epsilon.
inline Pseudoinverse pseudoinverse_svd(const Matrix& m, double rel_tol = -1.0) {
  if (!m.allFinite()) throw NumericalError("pseudoinverse: matrix has non-finite entries");
  Pseudoinverse out;
  if (m.size() == 0) {
    out.pinv = Matrix::Zero(m.cols(), m.rows());
    return out;
  }
  if (rel_tol < 0.0) rel_tol = default_rel_tol(m);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("pseudoinverse: SVD did not converge");
  out.singular_values = svd.singularValues();
  const double cutoff = rel_tol * (out.singular_values.size() ? out.singular_values(0) : 0.0);
  Vector inv = Vector::Zero(out.singular_values.size());
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
    if (out.singular_values(i) > cutoff && out.singular_values(i) > 0.0) {
      inv(i) = 1.0 / out.singular_values(i);
      ++out.rank;
    }
  }
  out.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  return out;
}

inline Matrix pseudoinverse(const Matrix& m, double rel_tol = -1.0) { return pseudoinverse_svd(m, rel_tol).pinv; }

inline Matrix data_matrix(int b) {
  check_bits(b);
  const int rows = 1 << b;
  Matrix a = Matrix::Zero(rows, num_data_unknowns(b));
  for (int n = 0; n < rows; ++n) {
    const auto code = static_cast<std::uint32_t>(n);
    for (int p = 0; p < b; ++p) {
      const int bit = code_bit(code, p, b);
      a(n, 2 * p) = bit;
      a(n, 2 * p + 1) = 1 - bit;
    }
    int col = 2 * b;
    for (int m = 0; m < b; ++m)
      for (int q = m + 1; q < b; ++q) a(n, col++) = code_bit(code, m, b) ^ code_bit(code, q, b);
  }
  return a;
}

inline Matrix prior_matrix(int b) {
  check_bits(b);
  const int codes = 1 << b;
  Matrix s(static_cast<Eigen::Index>(codes) * codes, num_prior_unknowns(b));
  for (int m = 0; m < codes; ++m)
    for (int n = 0; n < codes; ++n) {
      const Eigen::Index row = static_cast<Eigen::Index>(m) * codes + n;
      for (int p = 0; p < b; ++p)
        for (int q = 0; q < b; ++q)
          s(row, p * b + q) = code_bit(static_cast<std::uint32_t>(m), p, b) ^ code_bit(static_cast<std::uint32_t>(n), q, b);
    }
  return s;
}

struct DataSystem {
  int b = 0;
  Matrix A;
  Matrix A_pinv;
  int rank = 0;
};

struct PriorSystem {
  int b = 0;
  Matrix S;
  Matrix S_pinv;
  int rank = 0;
};

inline DataSystem build_data_system(int b) {
  DataSystem sys;
  sys.b = b;
  sys.A = data_matrix(b);
  auto p = pseudoinverse_svd(sys.A);
  sys.A_pinv = std::move(p.pinv);
  sys.rank = p.rank;
  return sys;
}

inline PriorSystem build_prior_system(int b) {
  PriorSystem sys;
  sys.b = b;
  sys.S = prior_matrix(b);
  auto p = pseudoinverse_svd(sys.S);
  sys.S_pinv = std::move(p.pinv);
  sys.rank = p.rank;
  return sys;
}

namespace detail {

inline Eigen::Map<const Vector> as_vector(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

inline double relative_residual(const Matrix& m, const Matrix& pinv, std::span<const double> rhs) {
  if (static_cast<Eigen::Index>(rhs.size()) != m.rows()) throw InvalidArgument("residual: dimension mismatch");
  const auto v = as_vector(rhs);
  const double norm = v.norm();
  if (!(norm > 0.0)) throw InvalidArgument("residual undefined for a zero right-hand side");
  const Vector fitted = m * (pinv * v);
  return (v - fitted).norm() / norm;
}

}  // namespace detail

inline Vector solve_data_weights(const DataSystem& sys, std::span<const double> rhs) {
  if (static_cast<Eigen::Index>(rhs.size()) != sys.A.rows())
    throw InvalidArgument("data weights: expected " + std::to_string(sys.A.rows()) + " penalties, got " + std::to_string(rhs.size()));
  return sys.A_pinv * detail::as_vector(rhs);
}

inline Vector solve_prior_weights(const PriorSystem& sys, std::span<const double> rhs) {
  if (static_cast<Eigen::Index>(rhs.size()) != sys.S.rows())
    throw InvalidArgument("prior weights: expected " + std::to_string(sys.S.rows()) + " penalties, got " + std::to_string(rhs.size()));
  return sys.S_pinv * detail::as_vector(rhs);
}

/// |(I - A A+) B| / |B|
inline double residual_data(const DataSystem& sys, std::span<const double> rhs) {
  return detail::relative_residual(sys.A, sys.A_pinv, rhs);
}

/// |(I - S S+) T| / |T|
inline double residual_prior(const PriorSystem& sys, std::span<const double> rhs) {
  return detail::relative_residual(sys.S, sys.S_pinv, rhs);
}

/// Relative residual of every column of `rhs` (one right-hand side per column).
inline Vector relative_residuals(const Matrix& m, const Matrix& pinv, const Matrix& rhs) {
  if (rhs.rows() != m.rows()) throw InvalidArgument("residuals: dimension mismatch");
  const Matrix fitted = m * (pinv * rhs);
  Vector out(rhs.cols());
  for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
    const double norm = rhs.col(c).norm();
    if (!(norm > 0.0)) throw InvalidArgument("residual undefined for a zero right-hand side");
    out(c) = (rhs.col(c) - fitted.col(c)).norm() / norm;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Penrose conditions

struct PenroseErrors {
  double m_pinv_m = 0.0;      // max |M M+ M - M|
  double pinv_m_pinv = 0.0;   // max |M+ M M+ - M+|
  double m_pinv_sym = 0.0;    // max |(M M+) - (M M+)^T|
  double pinv_m_sym = 0.0;    // max |(M+ M) - (M+ M)^T|

  double max() const { return std::max({m_pinv_m, pinv_m_pinv, m_pinv_sym, pinv_m_sym}); }
};

/// Maximum entrywise violation of the four Penrose conditions. M M+ can be
/// 65536 x 65536 for S_8, so its symmetry is checked tile by tile.
inline PenroseErrors penrose_errors(const Matrix& m, const Matrix& pinv, Eigen::Index tile = 4096) {
  PenroseErrors e;
  const Matrix pm = pinv * m;  // cols x cols
  e.m_pinv_m = (m * pm - m).cwiseAbs().maxCoeff();
  e.pinv_m_pinv = (pm * pinv - pinv).cwiseAbs().maxCoeff();
  e.pinv_m_sym = (pm - pm.transpose()).cwiseAbs().maxCoeff();
  const Eigen::Index n = m.rows();
  double worst = 0.0;
  for (Eigen::Index r0 = 0; r0 < n; r0 += tile) {
    const Eigen::Index rn = std::min(tile, n - r0);
    for (Eigen::Index c0 = r0; c0 < n; c0 += tile) {
      const Eigen::Index cn = std::min(tile, n - c0);
      const Matrix upper = m.middleRows(r0, rn) * pinv.middleCols(c0, cn);
      const Matrix lower = m.middleRows(c0, cn) * pinv.middleCols(r0, rn);
      worst = std::max(worst, (upper - lower.transpose()).cwiseAbs().maxCoeff());
    }
  }
  e.m_pinv_sym = worst;
  return e;
}

// ---------------------------------------------------------------------------
// Rank table

struct RankRow {
  int b;
  std::string matrix;  // "A" or "S"
  int equations;
  int unknowns;
  int rank;
};

inline std::vector<RankRow> rank_table(int b_max) {
  check_bits(b_max);
  std::vector<RankRow> rows;
  for (int b = 1; b <= b_max; ++b) {
    const Matrix a = data_matrix(b);
    rows.push_back({b, "A", static_cast<int>(a.rows()), static_cast<int>(a.cols()), pseudoinverse_svd(a).rank});
  }
  for (int b = 1; b <= b_max; ++b) {
    const Matrix s = prior_matrix(b);
    rows.push_back({b, "S", static_cast<int>(s.rows()), static_cast<int>(s.cols()), pseudoinverse_svd(s).rank});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const RankRow& x, const RankRow& y) { return x.b < y.b; });
  return rows;
}

inline void write_rank_table_csv(std::ostream& out, const std::vector<RankRow>& rows) {
  out << "b,matrix,equations,unknowns,rank\n";
  for (const auto& r : rows) out << r.b << ',' << r.matrix << ',' << r.equations << ',' << r.unknowns << ',' << r.rank << '\n';
}

// ---------------------------------------------------------------------------
// Pseudoinverse cache files: 4-byte magic ("LSPA" for A+, "LSPS" for S+),
// int32 b, uint64 rows, uint64 cols, then rows*cols little-endian float64
// in row-major order.

namespace detail {

inline void write_pod(std::ostream& out, const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); }

inline void read_pod(std::istream& in, auto& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw IoError("pseudoinverse cache: truncated header");
}

}  // namespace detail

inline void write_pinv_cache(const std::filesystem::path& path, char kind, int b, const Matrix& pinv) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write cache file '" + path.string() + "'");
  const std::array<char, 4> magic{'L', 'S', 'P', kind};
  out.write(magic.data(), magic.size());
  detail::write_pod(out, static_cast<std::int32_t>(b));
  detail::write_pod(out, static_cast<std::uint64_t>(pinv.rows()));
  detail::write_pod(out, static_cast<std::uint64_t>(pinv.cols()));
  std::vector<double> row(static_cast<std::size_t>(pinv.cols()));
  for (Eigen::Index r = 0; r < pinv.rows(); ++r) {
    for (Eigen::Index c = 0; c < pinv.cols(); ++c) row[static_cast<std::size_t>(c)] = pinv(r, c);
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!out) throw IoError("failed writing cache file '" + path.string() + "'");
}

inline Matrix read_pinv_cache(const std::filesystem::path& path, char kind, int b, Eigen::Index rows, Eigen::Index cols) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open cache file '" + path.string() + "'");
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != std::array<char, 4>{'L', 'S', 'P', kind}) throw IoError("bad magic in '" + path.string() + "'");
  std::int32_t fb = 0;
  std::uint64_t fr = 0, fc = 0;
  detail::read_pod(in, fb);
  detail::read_pod(in, fr);
  detail::read_pod(in, fc);
  if (fb != b || fr != static_cast<std::uint64_t>(rows) || fc != static_cast<std::uint64_t>(cols))
    throw IoError("cache file '" + path.string() + "' does not match the requested system");
  Matrix m(rows, cols);
  std::vector<double> row(static_cast<std::size_t>(cols));
  for (Eigen::Index r = 0; r < rows; ++r) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!in) throw IoError("cache file '" + path.string() + "' is truncated");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

/// Lazily built systems, one per bit width, shared by every solve. With a
/// cache directory, pseudoinverses are loaded from / stored to disk.
class SystemCache {
 public:
  SystemCache() = default;
  explicit SystemCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const DataSystem& data(int b) {
    check_bits(b);
    std::lock_guard lock(mu_);
    auto& slot = data_[b];
    if (!slot) slot = std::make_unique<DataSystem>(load_or_build_data(b));
    return *slot;
  }

  const PriorSystem& prior(int b) {
    check_bits(b);
    std::lock_guard lock(mu_);
    auto& slot = prior_[b];
    if (!slot) slot = std::make_unique<PriorSystem>(load_or_build_prior(b));
    return *slot;
  }

  static SystemCache& global() {
    static SystemCache cache;
    return cache;
  }

 private:
  // trace(M+ M) is the rank of the row-space projector.
  static int rank_from_projector(const Matrix& pinv, const Matrix& m) {
    return static_cast<int>(std::llround((pinv * m).trace()));
  }

  std::filesystem::path file(char kind, int b) const {
    return dir_ / (std::string(kind == 'A' ? "A" : "S") + "_pinv_b" + std::to_string(b) + ".bin");
  }

  DataSystem load_or_build_data(int b) {
    if (dir_.empty()) return build_data_system(b);
    DataSystem sys;
    sys.b = b;
    sys.A = data_matrix(b);
    const auto path = file('A', b);
    if (std::filesystem::exists(path)) {
      sys.A_pinv = read_pinv_cache(path, 'A', b, sys.A.cols(), sys.A.rows());
      sys.rank = rank_from_projector(sys.A_pinv, sys.A);
      return sys;
    }
    sys = build_data_system(b);
    std::filesystem::create_directories(dir_);
    write_pinv_cache(path, 'A', b, sys.A_pinv);
    return sys;
  }

  PriorSystem load_or_build_prior(int b) {
    if (dir_.empty()) return build_prior_system(b);
    PriorSystem sys;
    sys.b = b;
    sys.S = prior_matrix(b);
    const auto path = file('S', b);
    if (std::filesystem::exists(path)) {
      sys.S_pinv = read_pinv_cache(path, 'S', b, sys.S.cols(), sys.S.rows());
      sys.rank = rank_from_projector(sys.S_pinv, sys.S);
      return sys;
    }
    sys = build_prior_system(b);
    std::filesystem::create_directories(dir_);
    write_pinv_cache(path, 'S', b, sys.S_pinv);
    return sys;
  }

  std::filesystem::path dir_;
  std::mutex mu_;
  std::array<std::unique_ptr<DataSystem>, kMaxBits + 1> data_{};
  std::array<std::unique_ptr<PriorSystem>, kMaxBits + 1> prior_{};
};

}  // namespace lscut
