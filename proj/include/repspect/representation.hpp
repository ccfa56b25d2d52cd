#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "repspect/error.hpp"
#include "repspect/group_core.hpp"
#include "repspect/linalg.hpp"

namespace repspect {

/// A real orthogonal representation: group element -> dim x dim matrix.
struct Representation {
  int dim = 0;
  std::function<Matrix(const GroupElement&)> evaluator;
  std::string catalog_id;
  /// B^{1/2} when the evaluator was Gram-symmetrized; identity otherwise.
  std::optional<Matrix> basis_change;
  /// Isometric embedding (ambient x dim) of the representation space into a
  /// larger coordinate space, when the catalog entry has one (sn_sum_zero).
  std::optional<Matrix> embedding;

  Matrix operator()(const GroupElement& g) const {
    Matrix m = evaluator(g);
    if (m.rows() != dim || m.cols() != dim) {
      throw Error(ErrorKind::DimensionMismatch, catalog_id + " produced a " + std::to_string(m.rows()) + "x" +
                                                    std::to_string(m.cols()) + " matrix, expected " +
                                                    std::to_string(dim));
    }
    return m;
  }
};

struct RepParams {
  int n = 0;
  std::vector<Matrix> generator_images;
};

/// Orthonormal basis of {x in R^n : sum x_i = 0} as the columns of an
/// n x (n-1) matrix (Helmert vectors).
inline Matrix sum_zero_basis(int n) {
  Matrix u = Matrix::Zero(n, n - 1);
  for (int k = 1; k < n; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int i = 0; i < k; ++i) u(i, k - 1) = scale;
    u(k, k - 1) = -k * scale;
  }
  return u;
}

/// Frobenius-orthonormal basis of traceless symmetric 3x3 matrices.
inline std::vector<Matrix> traceless_symmetric_basis() {
  std::vector<Matrix> basis;
  const double r2 = 1.0 / std::sqrt(2.0);
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    Matrix e = Matrix::Zero(3, 3);
    e(i, j) = e(j, i) = r2;
    basis.push_back(e);
  }
  Matrix d1 = Matrix::Zero(3, 3);
  d1(0, 0) = r2;
  d1(1, 1) = -r2;
  basis.push_back(d1);
  Matrix d2 = Matrix::Zero(3, 3);
  d2(0, 0) = d2(1, 1) = 1.0 / std::sqrt(6.0);
  d2(2, 2) = -2.0 / std::sqrt(6.0);
  basis.push_back(d2);
  return basis;
}

namespace detail {

inline const Matrix& require_matrix(const GroupElement& g, int size, const std::string& who) {
  if (g.is_permutation() || g.matrix().rows() != size || g.matrix().cols() != size) {
    throw Error(ErrorKind::BadParams, who + " expects " + std::to_string(size) + "x" + std::to_string(size) +
                                          " matrix group elements");
  }
  return g.matrix();
}

inline const Permutation& require_permutation(const GroupElement& g, int degree, const std::string& who) {
  if (!g.is_permutation() || g.permutation().degree() != degree) {
    throw Error(ErrorKind::BadParams, who + " expects permutations of degree " + std::to_string(degree));
  }
  return g.permutation();
}

}  // namespace detail

inline const std::vector<std::string>& catalog_representation_names() {
  static const std::vector<std::string> names = {
      "sn_permutation", "sn_sum_zero",          "cyclic_rotation", "q8_left", "so3_traceless_symmetric",
      "defining_orthogonal", "explicit"};
  return names;
}

/// Evaluates products of generator images along an element's word.
inline Representation explicit_rep(std::vector<Matrix> generator_images) {
  if (generator_images.empty()) throw Error(ErrorKind::BadParams, "explicit representation needs generator_images");
  const auto dim = generator_images.front().rows();
  for (const auto& m : generator_images)
    if (m.rows() != dim || m.cols() != dim || !m.allFinite())
      throw Error(ErrorKind::BadParams, "generator images must be finite square matrices of one size");
  Representation rep;
  rep.dim = static_cast<int>(dim);
  rep.catalog_id = "explicit(" + std::to_string(dim) + ")";
  rep.evaluator = [images = std::move(generator_images), dim](const GroupElement& g) {
    Matrix out = Matrix::Identity(dim, dim);
    if (g.word.empty()) {
      const bool identity = g.is_permutation() ? g.permutation().is_identity()
                                               : max_abs(g.matrix() - Matrix::Identity(g.matrix().rows(), g.matrix().cols())) < kMatrixDedupTolerance;
      if (!identity) throw Error(ErrorKind::BadParams, "explicit representation needs elements with a generator word");
      return out;
    }
    for (int letter : g.word) {
      if (letter < 0 || static_cast<std::size_t>(letter) >= images.size())
        throw Error(ErrorKind::BadParams, "word refers to generator " + std::to_string(letter) + " without an image");
      out = out * images[letter];
    }
    return out;
  };
  return rep;
}

inline Representation build_named_rep(const std::string& name, const RepParams& params) {
  const int n = params.n;
  Representation rep;
  auto require_n = [&](int min) {
    if (n < min) throw Error(ErrorKind::BadParams, name + " requires n >= " + std::to_string(min));
  };
  if (name == "sn_permutation") {
    require_n(1);
    rep.dim = n;
    rep.catalog_id = name + "(" + std::to_string(n) + ")";
    rep.evaluator = [n, id = rep.catalog_id](const GroupElement& g) {
      return detail::require_permutation(g, n, id).matrix();
    };
  } else if (name == "sn_sum_zero") {
    require_n(2);
    rep.dim = n - 1;
    rep.catalog_id = name + "(" + std::to_string(n) + ")";
    Matrix u = sum_zero_basis(n);
    rep.embedding = u;
    rep.evaluator = [n, u, id = rep.catalog_id](const GroupElement& g) {
      return Matrix(u.transpose() * detail::require_permutation(g, n, id).matrix() * u);
    };
  } else if (name == "cyclic_rotation") {
    require_n(1);
    rep.dim = 2;
    rep.catalog_id = name + "(" + std::to_string(n) + ")";
    rep.evaluator = [id = rep.catalog_id](const GroupElement& g) { return detail::require_matrix(g, 2, id); };
  } else if (name == "q8_left") {
    rep.dim = 4;
    rep.catalog_id = name;
    rep.evaluator = [id = rep.catalog_id](const GroupElement& g) { return detail::require_matrix(g, 4, id); };
  } else if (name == "so3_traceless_symmetric") {
    rep.dim = 5;
    rep.catalog_id = name;
    rep.evaluator = [basis = traceless_symmetric_basis(), id = rep.catalog_id](const GroupElement& g) {
      const Matrix& r = detail::require_matrix(g, 3, id);
      Matrix out(5, 5);
      for (int l = 0; l < 5; ++l) {
        Matrix image = r * basis[l] * r.transpose();
        for (int k = 0; k < 5; ++k) out(k, l) = (basis[k].array() * image.array()).sum();
      }
      return out;
    };
  } else if (name == "defining_orthogonal") {
    require_n(1);
    rep.dim = n;
    rep.catalog_id = name + "(" + std::to_string(n) + ")";
    rep.evaluator = [n, id = rep.catalog_id](const GroupElement& g) { return detail::require_matrix(g, n, id); };
  } else if (name == "explicit") {
    return explicit_rep(params.generator_images);
  } else {
    throw Error(ErrorKind::UnknownName, "unknown representation '" + name + "'");
  }
  return rep;
}

/// Block-diagonal sum of two representations of the same group.
inline Representation direct_sum(const Representation& a, const Representation& b) {
  Representation rep;
  rep.dim = a.dim + b.dim;
  rep.catalog_id = a.catalog_id + "+" + b.catalog_id;
  rep.evaluator = [a, b](const GroupElement& g) {
    Matrix out = Matrix::Zero(a.dim + b.dim, a.dim + b.dim);
    out.topLeftCorner(a.dim, a.dim) = a(g);
    out.bottomRightCorner(b.dim, b.dim) = b(g);
    return out;
  };
  return rep;
}

/// Every element acts as the identity on R^dim.
inline Representation trivial_rep(int dim) {
  Representation rep;
  rep.dim = dim;
  rep.catalog_id = "trivial(" + std::to_string(dim) + ")";
  rep.evaluator = [dim](const GroupElement&) { return Matrix(Matrix::Identity(dim, dim)); };
  return rep;
}

/// Conjugates a representation by a fixed invertible matrix: g -> c rho(g) c^{-1}.
inline Representation conjugated(const Representation& rep, const Matrix& c) {
  Representation out = rep;
  Matrix c_inv = c.inverse();
  out.catalog_id = rep.catalog_id + "^c";
  out.evaluator = [rep, c, c_inv](const GroupElement& g) { return Matrix(c * rep(g) * c_inv); };
  return out;
}

inline std::vector<Matrix> images(const Representation& rep, const std::vector<GroupElement>& elements) {
  std::vector<Matrix> out;
  out.reserve(elements.size());
  for (const auto& g : elements) out.push_back(rep(g));
  return out;
}

/// Largest ‖rho(s g) − rho(s) rho(g)‖_∞ over all table elements g and
/// generators s, i.e. over every edge of the Cayley graph.
inline double homomorphism_defect(const Representation& rep, const FiniteGroupTable& table) {
  double worst = 0.0;
  std::vector<Matrix> imgs = images(rep, table.elements());
  for (const auto& s : table.generators()) {
    Matrix rs = rep(s);
    for (std::size_t i = 0; i < table.order(); ++i) {
      auto target = table.index_of(s * table[i]);
      if (!target) continue;  // truncated table
      worst = std::max(worst, max_abs(imgs[*target] - rs * imgs[i]));
    }
  }
  return worst;
}

inline double max_orthogonality_defect(const Representation& rep, const std::vector<GroupElement>& elements) {
  double worst = 0.0;
  for (const auto& g : elements) worst = std::max(worst, orthogonality_defect(rep(g)));
  return worst;
}

inline constexpr double kGramEigenFloor = 1e-12;

/// Replaces the scalar product by the group-averaged one: with
/// B = mean rho(g)^T rho(g), returns g -> B^{1/2} rho(g) B^{-1/2}, which is
/// orthogonal for every element of the table.
inline Representation gram_symmetrize(const Representation& raw, const FiniteGroupTable& table) {
  if (!table.complete()) throw Error(ErrorKind::IncompleteTable, "Gram symmetrization needs a complete table");
  const int n = raw.dim;
  Matrix gram = Matrix::Zero(n, n);
  for (const auto& g : table.elements()) {
    Matrix r = raw(g);
    gram.noalias() += r.transpose() * r;
  }
  gram /= static_cast<double>(table.order());
  gram = 0.5 * (gram + gram.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector& lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > kGramEigenFloor * std::max(1.0, lambda.maxCoeff()))) {
    throw Error(ErrorKind::SingularGram, "averaged Gram matrix is not positive definite (smallest eigenvalue " +
                                             std::to_string(lambda.minCoeff()) + ")");
  }
  const Matrix& v = eig.eigenvectors();
  Matrix root = v * lambda.cwiseSqrt().asDiagonal() * v.transpose();
  Matrix root_inv = v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();

  Representation out;
  out.dim = n;
  out.catalog_id = raw.catalog_id;
  out.basis_change = root;
  out.evaluator = [raw, root, root_inv](const GroupElement& g) { return Matrix(root * raw(g) * root_inv); };

  const double defect = max_orthogonality_defect(out, table.elements());
  if (defect > 1e-8) {
    throw Error(ErrorKind::BadParams, "generator images do not define a homomorphism on this group "
                                      "(orthogonality defect " + std::to_string(defect) + " after symmetrization)");
  }
  return out;
}

/// rho(g) a rho(g)^{-1}, using rho(g)^{-1} = rho(g)^T.
inline Matrix conjugation_action(const GroupElement& g, const Matrix& a, const Representation& rep) {
  if (a.rows() != rep.dim || a.cols() != rep.dim)
    throw Error(ErrorKind::DimensionMismatch, "matrix does not match representation dimension");
  Matrix r = rep(g);
  return r * a * r.transpose();
}

/// x x^T for a unit vector x.
inline Matrix diag_map(const Vector& x) {
  if (std::abs(x.norm() - 1.0) > 1e-10) throw Error(ErrorKind::NotUnitVector, "diag_map needs a unit vector");
  return x * x.transpose();
}

/// Tr(a b^T).
inline double frobenius_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::DimensionMismatch, "trace inner product of differently shaped matrices");
  return (a.array() * b.array()).sum();
}

/// Orthogonal projection of b onto the line spanned by a.
inline Matrix project_matrix(const Matrix& b, const Matrix& a) {
  const double aa = frobenius_inner(a, a);
  if (aa == 0.0) throw Error(ErrorKind::ZeroDirection, "cannot project onto the zero matrix");
  return (frobenius_inner(a, b) / aa) * a;
}

}  // namespace repspect
