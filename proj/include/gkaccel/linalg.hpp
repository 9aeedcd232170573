#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace gkaccel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative singular-value cutoff used for every rank decision.
inline constexpr double kDefaultRankCutoff = 1e-10;

namespace linalg {

/// Every SVD in the library. Eigen 3.4.0's BDCSVD returns wrong factors for
/// some small stacked constraint matrices.
using Svd = Eigen::JacobiSVD<Matrix>;

inline Eigen::Index numerical_rank(const Vector& singular_values, double rel_cutoff) {
  if (singular_values.size() == 0) return 0;
  const double smax = singular_values.maxCoeff();
  if (!(smax > 0.0)) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i)
    if (singular_values[i] > rel_cutoff * smax) ++r;
  return r;
}

/// Orthonormal basis (columns) of the column space of `m`.
inline Matrix orth(const Matrix& m, double rel_cutoff = kDefaultRankCutoff) {
  if (m.cols() == 0 || m.rows() == 0) return Matrix(m.rows(), 0);
  Svd svd(m, Eigen::ComputeThinU);
  const auto r = numerical_rank(svd.singularValues(), rel_cutoff);
  return svd.matrixU().leftCols(r);
}

/// Orthonormal basis (columns) of {x : a x = 0}, where `a` has `dim` columns.
inline Matrix null_space(const Matrix& a, Eigen::Index dim,
                         double rel_cutoff = kDefaultRankCutoff) {
  if (a.rows() == 0) return Matrix::Identity(dim, dim);
  Svd svd(a, Eigen::ComputeFullV);
  const auto r = numerical_rank(svd.singularValues(), rel_cutoff);
  return svd.matrixV().rightCols(dim - r);
}

/// Orthonormal basis of the orthogonal complement of span(basis).
inline Matrix complement(const Matrix& basis, Eigen::Index dim) {
  if (basis.cols() == 0) return Matrix::Identity(dim, dim);
  Eigen::HouseholderQR<Matrix> qr(basis);
  Matrix q = qr.householderQ();
  return q.rightCols(dim - basis.cols());
}

/// max |B^T B - I|
inline double orthonormality_drift(const Matrix& basis) {
  if (basis.cols() == 0) return 0.0;
  return (basis.transpose() * basis - Matrix::Identity(basis.cols(), basis.cols()))
      .cwiseAbs()
      .maxCoeff();
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace linalg
}  // namespace gkaccel
