#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace dgml {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using ColSparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Raised when an iterative method detects an indefinite operator, stalls,
/// diverges, or a factorization fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Square sparse matrix in compressed row storage plus a symmetry tag.
struct SparseOperator {
  SparseMatrix matrix;
  bool symmetric = false;

  Index rows() const { return matrix.rows(); }
  Index cols() const { return matrix.cols(); }
};

inline double max_abs(const SparseMatrix& m) {
  double out = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      out = std::max(out, std::abs(it.value()));
  return out;
}

/// Drops stored entries below `rel * max|entry|`.
inline void drop_small(SparseMatrix& m, double rel = 1e-14) {
  const double cut = rel * max_abs(m);
  m.prune([cut](Index, Index, double v) { return std::abs(v) > cut; });
}

inline SparseOperator symmetric_part(const SparseOperator& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("symmetric_part: operator is not square");
  SparseMatrix at = a.matrix.transpose();
  SparseOperator out{0.5 * (a.matrix + at), true};
  return out;
}

inline SparseOperator skew_part(const SparseOperator& a) {
  SparseMatrix at = a.matrix.transpose();
  return SparseOperator{0.5 * (a.matrix - at), false};
}

/// Uniform(-1, 1) vector from a seeded 64-bit Mersenne twister.
inline Vector random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

}  // namespace dgml
