#ifndef HGR_NUMERICS_HPP
#define HGR_NUMERICS_HPP

// Dense SVD, pseudoinverse and null-space helpers. Templated on the Eigen
// expression type; the scalar follows the argument.

#include <cmath>

#include <Eigen/Dense>

#include "hgr/error.hpp"

namespace hgr {

/// Relative cut-off: singular values <= rank_tol * sigma_max count as zero.
inline constexpr double kRankTol = 1e-10;

template <typename Scalar>
struct SvdResult {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector singular_values;  // descending
  Matrix u;                // rows x min(rows, cols)
  Matrix v;                // cols x min(rows, cols)
};

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& a) {
  if (!a.allFinite()) throw Error(Errc::NonFinite, "matrix has non-finite entries");
}

/// Thin SVD, A = U diag(s) V^T.
template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  using Matrix = typename SvdResult<Scalar>::Matrix;
  require_finite(a);
  Eigen::JacobiSVD<Matrix> solver(a.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {solver.singularValues(), solver.matrixU(), solver.matrixV()};
}

template <typename Scalar>
Eigen::Index numerical_rank(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& singular_values,
                            double rank_tol = kRankTol) {
  if (singular_values.size() == 0 || singular_values(0) == Scalar(0)) return 0;
  const Scalar cut = Scalar(rank_tol) * singular_values(0);
  Eigen::Index r = 0;
  while (r < singular_values.size() && singular_values(r) > cut) ++r;
  return r;
}

template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& a, double rank_tol = kRankTol) {
  return numerical_rank(svd(a).singular_values, rank_tol);
}

/// Moore-Penrose pseudoinverse with a relative rank cut-off.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
pseudoinverse(const Eigen::MatrixBase<Derived>& a, double rank_tol = kRankTol) {
  if (!(rank_tol > 0)) throw Error(Errc::InvalidArgument, "rank_tol must be positive");
  const auto dec = svd(a);
  const Eigen::Index r = numerical_rank(dec.singular_values, rank_tol);
  const auto inv = dec.singular_values.head(r).cwiseInverse();
  return dec.v.leftCols(r) * inv.asDiagonal() * dec.u.leftCols(r).transpose();
}

/// Orthonormal basis (as columns) of the null space of a symmetric PSD matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
nullspace_basis(const Eigen::MatrixBase<Derived>& a, double rank_tol = kRankTol) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  require_finite(a);
  if (a.rows() != a.cols()) throw Error(Errc::NotSymmetric, "matrix is not square");
  const Matrix m = a.eval();
  const Scalar scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * std::max(scale, Scalar(1)))
    throw Error(Errc::NotSymmetric, "matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const auto& lambda = eig.eigenvalues();
  const Scalar top = lambda.cwiseAbs().maxCoeff();
  Eigen::Index count = 0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    if (std::abs(lambda(k)) <= Scalar(rank_tol) * top) ++count;
  Matrix basis(m.rows(), count);
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    if (std::abs(lambda(k)) <= Scalar(rank_tol) * top) basis.col(col++) = eig.eigenvectors().col(k);
  return basis;
}

}  // namespace hgr

#endif  // HGR_NUMERICS_HPP
