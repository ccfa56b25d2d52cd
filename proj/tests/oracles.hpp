#pragma once

// Test-only reference computations. Each one reaches its answer by a route
// independent of the library code it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Commutant of a set of matrices by applying A -> gA − Ag to every matrix
/// unit E_ab and diagonalizing the resulting normal matrix.
inline Matrix commutant_span(const std::vector<Matrix>& mats, int n, double rel_tol = 1e-10) {
  const int n2 = n * n;
  Matrix normal = Matrix::Zero(n2, n2);
  std::vector<Matrix> images(n2);
  for (const auto& g : mats) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Matrix e = Matrix::Zero(n, n);
        e(a, b) = 1.0;
        images[a * n + b] = g * e - e * g;
      }
    for (int p = 0; p < n2; ++p)
      for (int q = 0; q < n2; ++q) normal(p, q) += (images[p].array() * images[q].array()).sum();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(normal);
  const double top = std::max(1.0, eig.eigenvalues().maxCoeff());
  std::vector<int> keep;
  for (int i = 0; i < n2; ++i)
    if (eig.eigenvalues()(i) < rel_tol * top) keep.push_back(i);
  // Columns are vec(A) in row-major unit order; convert to column-major vec.
  Matrix out(n2, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    Vector coeffs = eig.eigenvectors().col(keep[k]);
    Matrix a(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) a(r, c) = coeffs(r * n + c);
    out.col(static_cast<Eigen::Index>(k)) = Eigen::Map<Vector>(a.data(), n2);
  }
  return out;
}

/// Hamilton product on (a, b, c, d) = a + bi + cj + dk.
inline std::array<int, 4> quaternion_product(const std::array<int, 4>& p, const std::array<int, 4>& q) {
  return {p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
          p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
          p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
          p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0]};
}

/// Closure of {i, j} under the Hamilton product.
inline std::set<std::array<int, 4>> quaternion_group() {
  std::set<std::array<int, 4>> seen{{1, 0, 0, 0}};
  std::vector<std::array<int, 4>> frontier{{1, 0, 0, 0}};
  const std::array<std::array<int, 4>, 2> gens{{{0, 1, 0, 0}, {0, 0, 1, 0}}};
  while (!frontier.empty()) {
    auto x = frontier.back();
    frontier.pop_back();
    for (const auto& g : gens) {
      auto y = quaternion_product(g, x);
      if (seen.insert(y).second) frontier.push_back(y);
    }
  }
  return seen;
}

/// sum_{i,j} p_i p_j <x_i, x_j>^2 by enumerating all ordered pairs.
inline double pair_overlap(const std::vector<Vector>& pts, const std::vector<double>& probs) {
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double d = pts[i].dot(pts[j]);
      total += probs[i] * probs[j] * d * d;
    }
  return total;
}

/// All permutation matrices of degree n with the convention e_i -> e_{s(i)}.
inline std::vector<Matrix> all_permutation_matrices(int n) {
  std::vector<int> s(n);
  for (int i = 0; i < n; ++i) s[i] = i;
  std::vector<Matrix> out;
  do {
    Matrix m = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) m(s[i], i) = 1.0;
    out.push_back(m);
  } while (std::next_permutation(s.begin(), s.end()));
  return out;
}

/// Powers R^0..R^{n-1} of the rotation by 2 pi / n.
inline std::vector<Matrix> rotation_powers(int n) {
  std::vector<Matrix> out;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * M_PI * k / n;
    Matrix r(2, 2);
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    out.push_back(r);
  }
  return out;
}

}  // namespace oracle
