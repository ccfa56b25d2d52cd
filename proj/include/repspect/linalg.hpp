#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace repspect {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest absolute entry; zero for empty matrices.
inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// ‖m mᵀ − I‖_∞ (entrywise).
inline double orthogonality_defect(const Matrix& m) {
  return max_abs(m * m.transpose() - Matrix::Identity(m.rows(), m.rows()));
}

/// Column-major vectorization of a square matrix.
inline Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unvec(const Vector& v, Eigen::Index n) {
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

/// Orthonormal basis (as columns) of the column span of `a`, discarding
/// directions whose singular value is at most `abs_tol`.
inline Matrix orthonormal_span(const Matrix& a, double abs_tol) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > abs_tol) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Cosines of the principal angles between two subspaces given by
/// orthonormal columns. Sorted descending; length min(p, q).
inline Vector principal_cosines(const Matrix& q1, const Matrix& q2) {
  if (q1.cols() == 0 || q2.cols() == 0) return Vector(0);
  Eigen::JacobiSVD<Matrix> svd(q1.transpose() * q2);
  return svd.singularValues().cwiseMin(1.0);
}

/// Largest principal angle (radians) between subspaces of equal dimension
/// given by orthonormal columns. Computed from the sines, which stay
/// accurate for nearly coincident subspaces.
inline double max_principal_angle(const Matrix& q1, const Matrix& q2) {
  if (q2.cols() == 0) return 0.0;
  Matrix residual = q2 - q1 * (q1.transpose() * q2);
  Eigen::JacobiSVD<Matrix> svd(residual);
  return std::asin(std::min(1.0, svd.singularValues()(0)));
}

}  // namespace repspect
