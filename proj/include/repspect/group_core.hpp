#pragma once

// Concrete compact groups: permutation and matrix generators, the named
// catalog families, breadth-first closure of finite groups and Haar
// sampling for both finite tables and the continuous orthogonal families.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "repspect/error.hpp"
#include "repspect/linalg.hpp"
#include "repspect/random.hpp"

namespace repspect {

/// Bijection of {0, ..., d-1}. Composition follows function composition:
/// (p * q)(i) = p(q(i)).
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<int> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (int v : images_) {
      if (v < 0 || static_cast<std::size_t>(v) >= images_.size() || seen[v]) {
        throw Error(ErrorKind::BadParams, "permutation images are not a bijection on {1.." +
                                              std::to_string(images_.size()) + "}");
      }
      seen[v] = true;
    }
  }

  static Permutation identity(int degree) {
    std::vector<int> images(degree);
    for (int i = 0; i < degree; ++i) images[i] = i;
    return Permutation(std::move(images));
  }

  /// Builds from 1-based images as written in configs.
  static Permutation from_one_based(const std::vector<int>& images) {
    std::vector<int> zero(images.size());
    std::transform(images.begin(), images.end(), zero.begin(), [](int v) { return v - 1; });
    return Permutation(std::move(zero));
  }

  int degree() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[i]; }
  const std::vector<int>& images() const { return images_; }

  Permutation operator*(const Permutation& rhs) const {
    if (rhs.degree() != degree()) {
      throw Error(ErrorKind::DimensionMismatch, "composing permutations of different degree");
    }
    std::vector<int> out(images_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = images_[rhs.images_[i]];
    return Permutation(std::move(out));
  }

  Permutation inverse() const {
    std::vector<int> out(images_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[images_[i]] = static_cast<int>(i);
    return Permutation(std::move(out));
  }

  /// Matrix sending e_i to e_{p(i)}, so that matrix(p * q) = matrix(p) matrix(q).
  Matrix matrix() const {
    Matrix m = Matrix::Zero(degree(), degree());
    for (int i = 0; i < degree(); ++i) m(images_[i], i) = 1.0;
    return m;
  }

  bool is_identity() const {
    for (std::size_t i = 0; i < images_.size(); ++i)
      if (images_[i] != static_cast<int>(i)) return false;
    return true;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> images_;
};

/// A concrete group element. `word` records generator indices such that the
/// element equals gen[word[0]] * gen[word[1]] * ...; it is empty for the
/// identity and for elements that did not come from a closure (e.g. Haar
/// samples of a continuous family).
struct GroupElement {
  std::variant<Permutation, Matrix> payload;
  std::vector<int> word;

  bool is_permutation() const { return std::holds_alternative<Permutation>(payload); }
  const Permutation& permutation() const { return std::get<Permutation>(payload); }
  const Matrix& matrix() const { return std::get<Matrix>(payload); }

  /// Linear operator of the payload: permutation matrix or the matrix itself.
  Matrix as_matrix() const { return is_permutation() ? permutation().matrix() : matrix(); }
};

inline GroupElement operator*(const GroupElement& a, const GroupElement& b) {
  GroupElement out;
  if (a.is_permutation() && b.is_permutation()) {
    out.payload = a.permutation() * b.permutation();
  } else if (!a.is_permutation() && !b.is_permutation()) {
    if (a.matrix().cols() != b.matrix().rows()) {
      throw Error(ErrorKind::DimensionMismatch, "composing matrices of different size");
    }
    out.payload = Matrix(a.matrix() * b.matrix());
  } else {
    throw Error(ErrorKind::BadParams, "cannot compose a permutation with a matrix");
  }
  out.word = a.word;
  out.word.insert(out.word.end(), b.word.begin(), b.word.end());
  return out;
}

enum class GroupKind { PermutationGenerators, MatrixGenerators, Named };

enum class Family { Symmetric, Cyclic, Dihedral, Quaternion8, Orthogonal, SpecialOrthogonal };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::Symmetric: return "symmetric";
    case Family::Cyclic: return "cyclic";
    case Family::Dihedral: return "dihedral";
    case Family::Quaternion8: return "quaternion8";
    case Family::Orthogonal: return "orthogonal";
    case Family::SpecialOrthogonal: return "special_orthogonal";
  }
  return "?";
}

inline Matrix rotation2(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

/// Left multiplication by the quaternion units i and j on R^4 = span{1, i, j, k}.
inline Matrix quaternion_left_i() {
  Matrix m(4, 4);
  m << 0, -1, 0, 0,
       1, 0, 0, 0,
       0, 0, 0, -1,
       0, 0, 1, 0;
  return m;
}

inline Matrix quaternion_left_j() {
  Matrix m(4, 4);
  m << 0, 0, -1, 0,
       0, 0, 0, 1,
       1, 0, 0, 0,
       0, -1, 0, 0;
  return m;
}

/// Description of a compact group.
struct GroupSpec {
  GroupKind kind = GroupKind::Named;
  Family family = Family::Symmetric;
  int n = 1;
  std::vector<Permutation> permutation_generators;
  std::vector<Matrix> matrix_generators;

  static GroupSpec named(Family f, int n) {
    if (n < 1) throw Error(ErrorKind::BadParams, family_name(f) + " requires n >= 1");
    GroupSpec s;
    s.kind = GroupKind::Named;
    s.family = f;
    s.n = f == Family::Quaternion8 ? 4 : n;
    return s;
  }
  static GroupSpec symmetric(int n) { return named(Family::Symmetric, n); }
  static GroupSpec cyclic(int n) { return named(Family::Cyclic, n); }
  static GroupSpec dihedral(int n) { return named(Family::Dihedral, n); }
  static GroupSpec quaternion8() { return named(Family::Quaternion8, 4); }
  static GroupSpec orthogonal(int n) { return named(Family::Orthogonal, n); }
  static GroupSpec special_orthogonal(int n) { return named(Family::SpecialOrthogonal, n); }

  static GroupSpec from_permutations(std::vector<Permutation> gens) {
    if (gens.empty()) throw Error(ErrorKind::BadParams, "permutation group needs at least one generator");
    GroupSpec s;
    s.kind = GroupKind::PermutationGenerators;
    s.n = gens.front().degree();
    for (const auto& g : gens)
      if (g.degree() != s.n) throw Error(ErrorKind::BadParams, "permutation generators differ in degree");
    s.permutation_generators = std::move(gens);
    return s;
  }

  static GroupSpec from_matrices(std::vector<Matrix> gens) {
    if (gens.empty()) throw Error(ErrorKind::BadParams, "matrix group needs at least one generator");
    GroupSpec s;
    s.kind = GroupKind::MatrixGenerators;
    s.n = static_cast<int>(gens.front().rows());
    for (const auto& g : gens) {
      if (g.rows() != s.n || g.cols() != s.n)
        throw Error(ErrorKind::BadParams, "matrix generators must all be square of the same size");
      if (!g.allFinite()) throw Error(ErrorKind::BadParams, "matrix generator has non-finite entries");
    }
    s.matrix_generators = std::move(gens);
    return s;
  }

  bool is_continuous() const {
    return kind == GroupKind::Named &&
           (family == Family::Orthogonal || family == Family::SpecialOrthogonal);
  }
  bool is_finite() const { return !is_continuous(); }

  /// Generators as group elements, each with the one-letter word {i}.
  std::vector<GroupElement> generators() const {
    std::vector<GroupElement> out;
    auto push = [&](auto payload) {
      GroupElement e;
      e.payload = std::move(payload);
      e.word = {static_cast<int>(out.size())};
      out.push_back(std::move(e));
    };
    switch (kind) {
      case GroupKind::PermutationGenerators:
        for (const auto& p : permutation_generators) push(p);
        break;
      case GroupKind::MatrixGenerators:
        for (const auto& m : matrix_generators) push(m);
        break;
      case GroupKind::Named:
        switch (family) {
          case Family::Symmetric: {
            if (n == 1) {
              push(Permutation::identity(1));
              break;
            }
            std::vector<int> swap(n), cycle(n);
            for (int i = 0; i < n; ++i) {
              swap[i] = i;
              cycle[i] = (i + 1) % n;
            }
            std::swap(swap[0], swap[1]);
            push(Permutation(swap));
            push(Permutation(cycle));
            break;
          }
          case Family::Cyclic:
            push(rotation2(2.0 * std::numbers::pi / n));
            break;
          case Family::Dihedral: {
            push(rotation2(2.0 * std::numbers::pi / n));
            Matrix reflect(2, 2);
            reflect << 1, 0, 0, -1;
            push(reflect);
            break;
          }
          case Family::Quaternion8:
            push(quaternion_left_i());
            push(quaternion_left_j());
            break;
          case Family::Orthogonal:
          case Family::SpecialOrthogonal:
            throw Error(ErrorKind::BadParams,
                        family_name(family) + "(" + std::to_string(n) + ") is continuous; it has no finite generating set");
        }
        break;
    }
    return out;
  }

  /// The identity element in the payload type of this group.
  GroupElement identity() const {
    GroupElement e;
    const bool perm = kind == GroupKind::PermutationGenerators ||
                      (kind == GroupKind::Named && family == Family::Symmetric);
    if (perm) {
      e.payload = Permutation::identity(n);
    } else {
      const int dim = (kind == GroupKind::Named && (family == Family::Cyclic || family == Family::Dihedral)) ? 2 : n;
      e.payload = Matrix(Matrix::Identity(dim, dim));
    }
    return e;
  }

  std::string describe() const {
    switch (kind) {
      case GroupKind::PermutationGenerators:
        return "permutation_generators(degree " + std::to_string(n) + ", " +
               std::to_string(permutation_generators.size()) + " generators)";
      case GroupKind::MatrixGenerators:
        return "matrix_generators(" + std::to_string(n) + "x" + std::to_string(n) + ", " +
               std::to_string(matrix_generators.size()) + " generators)";
      case GroupKind::Named:
        if (family == Family::Quaternion8) return "quaternion8";
        return family_name(family) + "(" + std::to_string(n) + ")";
    }
    return "?";
  }
};

inline constexpr double kMatrixDedupTolerance = 1e-8;
inline constexpr std::size_t kDefaultClosureCap = 1'000'000;

/// Deduplicated element list of a finite group. elements[0] is the identity.
class FiniteGroupTable {
 public:
  FiniteGroupTable() = default;

  std::size_t order() const { return elements_.size(); }
  bool complete() const { return complete_; }
  const std::vector<GroupElement>& elements() const { return elements_; }
  const GroupElement& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<GroupElement>& generators() const { return generators_; }

  /// Index of an element equal to `g` (exactly for permutations, entrywise
  /// within the dedup tolerance for matrices).
  std::optional<std::size_t> index_of(const GroupElement& g) const {
    if (g.is_permutation()) {
      auto it = perm_index_.find(g.permutation().images());
      if (it == perm_index_.end()) return std::nullopt;
      return it->second;
    }
    const Matrix& m = g.matrix();
    const double key = matrix_key(m);
    const double slack = static_cast<double>(m.size()) * kMatrixDedupTolerance;
    for (auto it = matrix_index_.lower_bound(key - slack);
         it != matrix_index_.end() && it->first <= key + slack; ++it) {
      const Matrix& other = elements_[it->second].matrix();
      if (other.rows() == m.rows() && other.cols() == m.cols() &&
          max_abs(other - m) < kMatrixDedupTolerance)
        return it->second;
    }
    return std::nullopt;
  }

  friend FiniteGroupTable enumerate_closure(const GroupSpec& spec, std::size_t cap, bool throw_on_overflow);

 private:
  // Fixed linear functional used to index matrices; equal elements have
  // nearby keys so a range query plus an entrywise check finds them.
  static double matrix_key(const Matrix& m) {
    double key = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) key += std::sin(1.0 + 0.7548776662 * static_cast<double>(i)) * m.data()[i];
    return key;
  }

  void insert(GroupElement g) {
    if (g.is_permutation()) {
      perm_index_.emplace(g.permutation().images(), elements_.size());
    } else {
      matrix_index_.emplace(matrix_key(g.matrix()), elements_.size());
    }
    elements_.push_back(std::move(g));
  }

  std::vector<GroupElement> elements_;
  std::vector<GroupElement> generators_;
  bool complete_ = false;
  std::map<std::vector<int>, std::size_t> perm_index_;
  std::multimap<double, std::size_t> matrix_index_;
};

/// Breadth-first closure of a finite group under left multiplication by its
/// generators. Exceeding `cap` distinct elements throws ClosureOverflow
/// unless `throw_on_overflow` is false, in which case the truncated table is
/// returned with complete() == false.
inline FiniteGroupTable enumerate_closure(const GroupSpec& spec, std::size_t cap = kDefaultClosureCap,
                                          bool throw_on_overflow = true) {
  if (cap < 1) throw Error(ErrorKind::BadParams, "closure cap must be >= 1");
  if (!spec.is_finite()) {
    throw Error(ErrorKind::BadParams, spec.describe() + " is not a finite group");
  }
  FiniteGroupTable table;
  table.generators_ = spec.generators();
  for (const auto& g : table.generators_) {
    if (!g.is_permutation()) {
      const Matrix& m = g.matrix();
      if (std::abs(m.determinant()) < 1e-12 || m.fullPivLu().rank() < m.rows())
        throw Error(ErrorKind::NonInvertibleGenerator, "generator " + std::to_string(g.word.front()) + " is singular");
    }
  }

  table.insert(spec.identity());
  for (std::size_t head = 0; head < table.elements_.size(); ++head) {
    for (const auto& s : table.generators_) {
      GroupElement candidate = s * table.elements_[head];
      if (table.index_of(candidate)) continue;
      if (table.elements_.size() >= cap) {
        if (throw_on_overflow) {
          throw Error(ErrorKind::ClosureOverflow,
                      spec.describe() + " has more than " + std::to_string(cap) + " elements");
        }
        table.complete_ = false;
        return table;
      }
      table.insert(std::move(candidate));
    }
  }
  table.complete_ = true;
  return table;
}

/// Uniform index into a complete table.
inline std::size_t haar_index(const FiniteGroupTable& table, Rng& rng) {
  if (!table.complete()) throw Error(ErrorKind::IncompleteTable, "Haar sampling needs a complete group table");
  std::uniform_int_distribution<std::size_t> pick(0, table.order() - 1);
  return pick(rng);
}

inline const GroupElement& haar_sample_finite(const FiniteGroupTable& table, Rng& rng) {
  return table[haar_index(table, rng)];
}

/// Haar-distributed element of O(n) or SO(n): QR of a standard Gaussian
/// matrix with the column signs fixed by the diagonal of R.
inline GroupElement haar_sample_continuous(Family family, int n, Rng& rng) {
  if (family != Family::Orthogonal && family != Family::SpecialOrthogonal)
    throw Error(ErrorKind::BadParams, "continuous Haar sampling supports orthogonal and special_orthogonal only");
  if (n < 1) throw Error(ErrorKind::BadParams, "dimension must be >= 1");
  std::normal_distribution<double> normal;
  Matrix q;
  for (;;) {
    Matrix gauss(n, n);
    for (Eigen::Index j = 0; j < gauss.cols(); ++j)
      for (Eigen::Index i = 0; i < gauss.rows(); ++i) gauss(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(gauss);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    if (r.diagonal().cwiseAbs().minCoeff() < 1e-12) continue;
    q = qr.householderQ() * Matrix::Identity(n, n);
    for (int j = 0; j < n; ++j)
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    break;
  }
  if (family == Family::SpecialOrthogonal && q.determinant() < 0) q.col(0) = -q.col(0);
  GroupElement e;
  e.payload = std::move(q);
  return e;
}

/// Haar measure on either a finite table or a continuous family.
class GroupSampler {
 public:
  explicit GroupSampler(std::shared_ptr<const FiniteGroupTable> table) : table_(std::move(table)) {
    if (!table_ || !table_->complete())
      throw Error(ErrorKind::IncompleteTable, "Haar sampling needs a complete group table");
  }
  GroupSampler(Family family, int n) : family_(family), n_(n) {
    if (family != Family::Orthogonal && family != Family::SpecialOrthogonal)
      throw Error(ErrorKind::BadParams, "continuous sampler requires orthogonal or special_orthogonal");
  }

  static GroupSampler for_spec(const GroupSpec& spec, std::size_t cap = kDefaultClosureCap) {
    if (spec.is_continuous()) return GroupSampler(spec.family, spec.n);
    return GroupSampler(std::make_shared<const FiniteGroupTable>(enumerate_closure(spec, cap)));
  }

  bool finite() const { return static_cast<bool>(table_); }
  const std::shared_ptr<const FiniteGroupTable>& table() const { return table_; }
  Family family() const { return family_; }
  int n() const { return n_; }

  GroupElement draw(Rng& rng) const {
    if (table_) return haar_sample_finite(*table_, rng);
    return haar_sample_continuous(family_, n_, rng);
  }

 private:
  std::shared_ptr<const FiniteGroupTable> table_;
  Family family_ = Family::Orthogonal;
  int n_ = 0;
};

}  // namespace repspect
