#pragma once

// Fixed points of the conjugation action a -> rho(g) a rho(g)^T: the
// invariant projector on V, the commutant algebra as a numerical nullspace,
// its symmetric/skew split, the irreducibility decision with R/C/H type, and
// extraction of an invariant subspace when the representation is reducible.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "repspect/error.hpp"
#include "repspect/group_core.hpp"
#include "repspect/linalg.hpp"
#include "repspect/random.hpp"
#include "repspect/representation.hpp"

namespace repspect {

inline constexpr double kNullspaceRelTol = 1e-8;
inline constexpr double kAmbiguityFactor = 10.0;
inline constexpr std::size_t kMaxAllElementsOrder = 10'000;

// ---------------------------------------------------------------------------
// Invariant projector

/// Exact group average (1/|G|) sum_g rho(g) v.
inline Vector reynolds_project(const Representation& rep, const FiniteGroupTable& table, const Vector& v) {
  if (!table.complete()) throw Error(ErrorKind::IncompleteTable, "exact averaging needs a complete table");
  if (v.size() != rep.dim) throw Error(ErrorKind::DimensionMismatch, "vector does not match representation");
  Vector acc = Vector::Zero(rep.dim);
  for (const auto& g : table.elements()) acc.noalias() += rep(g) * v;
  return acc / static_cast<double>(table.order());
}

struct ReynoldsEstimate {
  Vector mean;
  Vector std_error;
  std::size_t n_samples = 0;
};

/// Monte Carlo average of rho(g) v over `n_samples` Haar draws.
inline ReynoldsEstimate reynolds_project(const Representation& rep, const GroupSampler& sampler, const Vector& v,
                                         std::size_t n_samples, Rng& rng) {
  if (v.size() != rep.dim) throw Error(ErrorKind::DimensionMismatch, "vector does not match representation");
  if (n_samples < 2) throw Error(ErrorKind::BadParams, "need at least two samples");
  Vector sum = Vector::Zero(rep.dim), sum_sq = Vector::Zero(rep.dim);
  for (std::size_t i = 0; i < n_samples; ++i) {
    Vector x = rep(sampler.draw(rng)) * v;
    sum += x;
    sum_sq += x.cwiseAbs2();
  }
  const double count = static_cast<double>(n_samples);
  ReynoldsEstimate out;
  out.n_samples = n_samples;
  out.mean = sum / count;
  Vector var = ((sum_sq - count * out.mean.cwiseAbs2()) / (count - 1.0)).cwiseMax(0.0);
  out.std_error = (var / count).cwiseSqrt();
  return out;
}

/// (1/|G|) sum_g rho(g), the matrix of the invariant projector.
inline Matrix reynolds_matrix(const Representation& rep, const FiniteGroupTable& table) {
  if (!table.complete()) throw Error(ErrorKind::IncompleteTable, "exact averaging needs a complete table");
  Matrix acc = Matrix::Zero(rep.dim, rep.dim);
  for (const auto& g : table.elements()) acc += rep(g);
  return acc / static_cast<double>(table.order());
}

// ---------------------------------------------------------------------------
// Nullspace machinery

struct NullspaceResult {
  Matrix basis;  // orthonormal columns
  Vector singular_values;
  double threshold = 0.0;
  bool ambiguous = false;
};

/// Right nullspace of `system` with singular values below
/// rel_tol * max(s_max, 1) treated as zero. The floor of 1 keeps a system that
/// vanishes up to rounding (e.g. constraints that are all ±I) from reporting
/// its rounding noise as rank. A singular value within kAmbiguityFactor of the cutoff
/// marks the result ambiguous.
inline NullspaceResult numerical_nullspace(const Matrix& system, double rel_tol) {
  const Eigen::Index cols = system.cols();
  Matrix reduced;
  if (system.rows() > cols) {
    Eigen::HouseholderQR<Matrix> qr(system);
    reduced = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  } else {
    reduced = system;
  }
  NullspaceResult out;
  if (reduced.rows() == 0) {
    out.basis = Matrix::Identity(cols, cols);
    out.singular_values = Vector(0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(reduced, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values.size() ? out.singular_values(0) : 0.0;
  out.threshold = rel_tol * std::max(smax, 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
    const double s = out.singular_values(i);
    if (s > out.threshold) ++rank;
    if (s > 0.0 && s >= out.threshold / kAmbiguityFactor && s <= out.threshold * kAmbiguityFactor) out.ambiguous = true;
  }
  out.basis = svd.matrixV().rightCols(cols - rank);
  return out;
}

/// Orthogonal projector onto the common fixed space of the given matrices.
inline Matrix fixed_space_projector(const std::vector<Matrix>& constraints, int n,
                                    double rel_tol = kNullspaceRelTol) {
  Matrix system(static_cast<Eigen::Index>(constraints.size()) * n, n);
  for (std::size_t k = 0; k < constraints.size(); ++k)
    system.middleRows(static_cast<Eigen::Index>(k) * n, n) = constraints[k] - Matrix::Identity(n, n);
  Matrix q = numerical_nullspace(system, rel_tol).basis;
  return q * q.transpose();
}

// ---------------------------------------------------------------------------
// Commutant

struct CommutantBasis {
  /// Orthonormal under the trace inner product. After split_symmetric_skew
  /// the first sym_dim entries are symmetric (starting with I/sqrt(n)) and
  /// the remaining skew_dim entries are skew-symmetric.
  std::vector<Matrix> basis;
  int n = 0;
  int dim = 0;
  int sym_dim = 0;
  int skew_dim = 0;
  bool split = false;
  double residual = 0.0;
  double threshold = 0.0;
  bool ambiguous = false;
  Vector singular_values;
  /// rho(g) for every g that contributed a constraint.
  std::vector<Matrix> constraints;

  std::vector<Matrix> symmetric_part() const {
    return {basis.begin(), basis.begin() + sym_dim};
  }
  std::vector<Matrix> skew_part() const {
    return {basis.begin() + sym_dim, basis.end()};
  }
};

/// Largest ‖c B − B c‖_∞ over constraints c and basis elements B.
inline double commutation_defect(const std::vector<Matrix>& basis, const std::vector<Matrix>& constraints) {
  double worst = 0.0;
  for (const auto& b : basis)
    for (const auto& c : constraints) worst = std::max(worst, max_abs(c * b - b * c));
  return worst;
}

/// Solves rho(g) A − A rho(g) = 0 jointly for all constraint matrices.
inline CommutantBasis commutant_from_constraints(std::vector<Matrix> constraints, int n,
                                                 double rel_tol = kNullspaceRelTol) {
  const Eigen::Index n2 = static_cast<Eigen::Index>(n) * n;
  Matrix system(static_cast<Eigen::Index>(constraints.size()) * n2, n2);
  const Matrix eye = Matrix::Identity(n, n);
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    const Matrix& r = constraints[k];
    if (r.rows() != n || r.cols() != n) throw Error(ErrorKind::DimensionMismatch, "constraint size mismatch");
    // vec(R A) = (I ⊗ R) vec A, vec(A R) = (R^T ⊗ I) vec A.
    Matrix block = Matrix::Zero(n2, n2);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        block.block(static_cast<Eigen::Index>(j) * n, static_cast<Eigen::Index>(i) * n, n, n) -= r(i, j) * eye;
        if (i == j) block.block(static_cast<Eigen::Index>(j) * n, static_cast<Eigen::Index>(i) * n, n, n) += r;
      }
    system.middleRows(static_cast<Eigen::Index>(k) * n2, n2) = block;
  }
  NullspaceResult ns = numerical_nullspace(system, rel_tol);
  CommutantBasis cb;
  cb.n = n;
  cb.dim = static_cast<int>(ns.basis.cols());
  for (Eigen::Index c = 0; c < ns.basis.cols(); ++c) cb.basis.push_back(unvec(ns.basis.col(c), n));
  cb.threshold = ns.threshold;
  cb.ambiguous = ns.ambiguous;
  cb.singular_values = std::move(ns.singular_values);
  cb.constraints = std::move(constraints);
  cb.residual = commutation_defect(cb.basis, cb.constraints);
  return cb;
}

enum class ConstraintMode { AllElements, Generators };

inline CommutantBasis commutant_basis(const Representation& rep, const FiniteGroupTable& table,
                                      ConstraintMode mode = ConstraintMode::Generators,
                                      double rel_tol = kNullspaceRelTol) {
  if (mode == ConstraintMode::AllElements) {
    if (!table.complete()) throw Error(ErrorKind::IncompleteTable, "all-elements constraints need a complete table");
    if (table.order() > kMaxAllElementsOrder)
      throw Error(ErrorKind::TooLarge, "all-elements constraints limited to order " +
                                           std::to_string(kMaxAllElementsOrder));
    return commutant_from_constraints(images(rep, table.elements()), rep.dim, rel_tol);
  }
  return commutant_from_constraints(images(rep, table.generators()), rep.dim, rel_tol);
}

struct SampledCommutantOptions {
  std::size_t initial_samples = 8;
  std::size_t max_samples = 64;
  double rel_tol = kNullspaceRelTol;
};

/// Commutant from Haar constraint samples, doubling the sample count until
/// the nullspace dimension agrees across two consecutive rounds.
inline CommutantBasis commutant_basis(const Representation& rep, const GroupSampler& sampler, Rng& rng,
                                      const SampledCommutantOptions& opts = {}) {
  std::vector<Matrix> constraints;
  auto extend_to = [&](std::size_t k) {
    while (constraints.size() < k) constraints.push_back(rep(sampler.draw(rng)));
  };
  extend_to(opts.initial_samples);
  CommutantBasis previous = commutant_from_constraints(constraints, rep.dim, opts.rel_tol);
  for (std::size_t k = opts.initial_samples * 2; k <= opts.max_samples; k *= 2) {
    extend_to(k);
    CommutantBasis current = commutant_from_constraints(constraints, rep.dim, opts.rel_tol);
    if (current.dim == previous.dim) return current;
    previous = std::move(current);
  }
  throw Error(ErrorKind::NonStabilizedDimension,
              "commutant dimension did not stabilize by " + std::to_string(opts.max_samples) + " samples");
}

/// Distance (Frobenius) from `a` to the span of an orthonormal matrix basis.
inline double span_residual(const std::vector<Matrix>& basis, const Matrix& a) {
  Matrix rest = a;
  for (const auto& b : basis) rest -= frobenius_inner(a, b) * b;
  return rest.norm();
}

/// Norm of the orthogonal projection of `a` onto the span of an orthonormal
/// matrix basis.
inline double projection_norm(const std::vector<Matrix>& basis, const Matrix& a) {
  double sq = 0.0;
  for (const auto& b : basis) {
    const double c = frobenius_inner(a, b);
    sq += c * c;
  }
  return std::sqrt(sq);
}

/// Re-bases the commutant into symmetric and skew-symmetric elements. The
/// symmetric block starts with I/sqrt(n).
inline CommutantBasis split_symmetric_skew(const CommutantBasis& cb) {
  const int n = cb.n;
  const double tol = 1e-8;
  const Matrix unit_identity = Matrix::Identity(n, n) / std::sqrt(static_cast<double>(n));

  Matrix sym(static_cast<Eigen::Index>(n) * n, cb.dim);
  Matrix skew(static_cast<Eigen::Index>(n) * n, cb.dim);
  for (int k = 0; k < cb.dim; ++k) {
    const Matrix& b = cb.basis[k];
    Matrix s = 0.5 * (b + b.transpose());
    s -= frobenius_inner(s, unit_identity) * unit_identity;
    sym.col(k) = vec(s);
    skew.col(k) = vec(Matrix(0.5 * (b - b.transpose())));
  }
  Matrix sym_q = orthonormal_span(sym, tol);
  Matrix skew_q = orthonormal_span(skew, tol);

  CommutantBasis out = cb;
  out.basis.clear();
  out.basis.push_back(unit_identity);
  for (Eigen::Index c = 0; c < sym_q.cols(); ++c) out.basis.push_back(unvec(sym_q.col(c), n));
  for (Eigen::Index c = 0; c < skew_q.cols(); ++c) out.basis.push_back(unvec(skew_q.col(c), n));
  out.sym_dim = 1 + static_cast<int>(sym_q.cols());
  out.skew_dim = static_cast<int>(skew_q.cols());
  out.split = true;
  if (out.sym_dim + out.skew_dim != cb.dim) {
    throw Error(ErrorKind::InconsistentDimensions,
                "symmetric/skew split gives " + std::to_string(out.sym_dim) + "+" + std::to_string(out.skew_dim) +
                    " but the commutant has dimension " + std::to_string(cb.dim));
  }
  out.residual = commutation_defect(out.basis, out.constraints);
  return out;
}

enum class FieldType { R, C, H, NotApplicable };

inline const char* to_string(FieldType t) {
  switch (t) {
    case FieldType::R: return "R";
    case FieldType::C: return "C";
    case FieldType::H: return "H";
    case FieldType::NotApplicable: return "not-applicable";
  }
  return "?";
}

struct TypeVerdict {
  bool irreducible = false;
  FieldType type = FieldType::NotApplicable;
  int commutant_dim = 0;
  int sym_dim = 0;
};

/// Irreducible iff the only symmetric commuting matrices are scalars; the
/// type then follows from the commutant dimension (1, 2, 4 -> R, C, H).
inline TypeVerdict classify_and_decide(const CommutantBasis& cb) {
  if (!cb.split) throw Error(ErrorKind::BadParams, "classify_and_decide needs a split commutant basis");
  TypeVerdict v;
  v.commutant_dim = cb.dim;
  v.sym_dim = cb.sym_dim;
  v.irreducible = cb.sym_dim == 1;
  if (!v.irreducible) return v;
  switch (cb.dim) {
    case 1: v.type = FieldType::R; break;
    case 2: v.type = FieldType::C; break;
    case 4: v.type = FieldType::H; break;
    default:
      throw Error(ErrorKind::InconsistentDimensions,
                  "irreducible verdict with commutant dimension " + std::to_string(cb.dim));
  }
  return v;
}

struct WitnessSubspace {
  Matrix basis;  // n x m, orthonormal columns
  int m = 0;
  double eigenvalue = 0.0;
  double residual = 0.0;
};

/// Largest ‖(I − W W^T) rho W‖_∞ over the constraint matrices.
inline double invariance_residual(const Matrix& w, const std::vector<Matrix>& constraints) {
  const Eigen::Index n = w.rows();
  const Matrix complement = Matrix::Identity(n, n) - w * w.transpose();
  double worst = 0.0;
  for (const auto& c : constraints) worst = std::max(worst, max_abs(complement * c * w));
  return worst;
}

inline constexpr double kEigenGapTol = 1e-8;

/// An eigenspace of a symmetric non-scalar commutant element. Among the
/// distinct eigenvalues the one furthest from the mean is chosen; ties go to
/// the smaller eigenspace, then to the lower eigenvalue.
inline WitnessSubspace witness_invariant_subspace(const CommutantBasis& cb) {
  if (!cb.split) throw Error(ErrorKind::BadParams, "witness extraction needs a split commutant basis");
  if (cb.sym_dim < 2) throw Error(ErrorKind::NotReducible, "symmetric commutant is scalar; no invariant subspace");
  const Matrix& s = cb.basis[1];  // symmetric, orthogonal to I
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
  const Vector& lambda = eig.eigenvalues();  // ascending
  const double mean = lambda.mean();

  struct Cluster {
    Eigen::Index start, size;
    double value;
  };
  std::vector<Cluster> clusters;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (clusters.empty() || lambda(i) - lambda(i - 1) >= kEigenGapTol) {
      clusters.push_back({i, 1, lambda(i)});
    } else {
      Cluster& c = clusters.back();
      c.value = (c.value * static_cast<double>(c.size) + lambda(i)) / static_cast<double>(c.size + 1);
      ++c.size;
    }
  }
  if (clusters.size() < 2) {
    throw Error(ErrorKind::DegenerateSpectrum, "non-scalar commutant element has a single eigenvalue cluster");
  }
  const Cluster* best = &clusters.front();
  for (const auto& c : clusters) {
    const double d = std::abs(c.value - mean), db = std::abs(best->value - mean);
    if (d > db + kEigenGapTol) {
      best = &c;
    } else if (std::abs(d - db) <= kEigenGapTol) {
      if (c.size < best->size || (c.size == best->size && c.value < best->value)) best = &c;
    }
  }
  WitnessSubspace w;
  w.basis = eig.eigenvectors().middleCols(best->start, best->size);
  w.m = static_cast<int>(best->size);
  w.eigenvalue = best->value;
  w.residual = invariance_residual(w.basis, cb.constraints);
  return w;
}

}  // namespace repspect
