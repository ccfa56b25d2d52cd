#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "repspect/representation.hpp"

namespace repspect {
namespace {

Vector random_unit(int n, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v.normalized();
}

Matrix random_matrix(int n, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix m(n, n);
  for (int i = 0; i < n * n; ++i) m.data()[i] = normal(rng);
  return m;
}

struct Case {
  GroupSpec group;
  std::string name;
  int n;
};

std::vector<Case> finite_catalog() {
  return {{GroupSpec::symmetric(4), "sn_permutation", 4}, {GroupSpec::symmetric(5), "sn_sum_zero", 5},
          {GroupSpec::cyclic(6), "cyclic_rotation", 6},   {GroupSpec::quaternion8(), "q8_left", 4},
          {GroupSpec::dihedral(5), "defining_orthogonal", 2}};
}

TEST(BuildNamedRepTest, SumZeroTranspositionIsReflection) {
  Representation rep = build_named_rep("sn_sum_zero", {3, {}});
  EXPECT_EQ(rep.dim, 2);
  GroupElement swap{Permutation({1, 0, 2}), {}};
  Matrix r = rep(swap);
  EXPECT_LE(orthogonality_defect(r), 1e-12);
  EXPECT_NEAR(r.determinant(), -1.0, 1e-12);
  EXPECT_LE(max_abs(r - r.transpose()), 1e-12);
  EXPECT_LE(max_abs(r * r - Matrix::Identity(2, 2)), 1e-12);
}

TEST(BuildNamedRepTest, SumZeroBasisIsOrthonormalAndSumFree) {
  for (int n = 2; n <= 7; ++n) {
    Matrix u = sum_zero_basis(n);
    EXPECT_LE(max_abs(u.transpose() * u - Matrix::Identity(n - 1, n - 1)), 1e-12);
    EXPECT_LE(u.colwise().sum().cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(BuildNamedRepTest, CyclicRotationGenerator) {
  Representation rep = build_named_rep("cyclic_rotation", {4, {}});
  Matrix expected(2, 2);
  expected << 0, -1, 1, 0;
  EXPECT_LE(max_abs(rep(GroupSpec::cyclic(4).generators()[0]) - expected), 1e-15);
}

TEST(BuildNamedRepTest, TracelessSymmetricAtIdentity) {
  Representation rep = build_named_rep("so3_traceless_symmetric", {});
  GroupElement id{Matrix(Matrix::Identity(3, 3)), {}};
  EXPECT_LE(max_abs(rep(id) - Matrix::Identity(5, 5)), 1e-15);
}

TEST(BuildNamedRepTest, Errors) {
  try {
    build_named_rep("spin_half", {2, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownName);
  }
  try {
    build_named_rep("sn_sum_zero", {1, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadParams);
  }
  Representation perm = build_named_rep("sn_permutation", {3, {}});
  GroupElement wrong{Matrix(Matrix::Identity(3, 3)), {}};
  EXPECT_THROW(perm(wrong), Error);
  EXPECT_THROW(build_named_rep("explicit", {}), Error);
}

TEST(RepresentationPropertyTest, FiniteCatalogHomomorphismAndOrthogonality) {
  Rng rng = make_stream(21);
  for (const auto& c : finite_catalog()) {
    FiniteGroupTable t = enumerate_closure(c.group);
    Representation rep = build_named_rep(c.name, {c.n, {}});
    EXPECT_LE(homomorphism_defect(rep, t), 1e-8) << rep.catalog_id;
    EXPECT_LE(max_orthogonality_defect(rep, t.elements()), 1e-8) << rep.catalog_id;
    for (int k = 0; k < 100; ++k) {
      const auto& g = haar_sample_finite(t, rng);
      const auto& h = haar_sample_finite(t, rng);
      EXPECT_LE(max_abs(rep(g * h) - rep(g) * rep(h)), 1e-8) << rep.catalog_id;
    }
  }
}

TEST(RepresentationPropertyTest, ContinuousCatalogHomomorphism) {
  Rng rng = make_stream(22);
  Representation so3 = build_named_rep("so3_traceless_symmetric", {});
  Representation o4 = build_named_rep("defining_orthogonal", {4, {}});
  for (int k = 0; k < 100; ++k) {
    GroupElement g = haar_sample_continuous(Family::SpecialOrthogonal, 3, rng);
    GroupElement h = haar_sample_continuous(Family::SpecialOrthogonal, 3, rng);
    EXPECT_LE(max_abs(so3(g * h) - so3(g) * so3(h)), 1e-8);
    EXPECT_LE(orthogonality_defect(so3(g)), 1e-8);
    GroupElement a = haar_sample_continuous(Family::Orthogonal, 4, rng);
    GroupElement b = haar_sample_continuous(Family::Orthogonal, 4, rng);
    EXPECT_LE(max_abs(o4(a * b) - o4(a) * o4(b)), 1e-8);
  }
}

TEST(RepresentationPropertyTest, InvariantScalarProduct) {
  Rng rng = make_stream(23);
  Representation rep = build_named_rep("so3_traceless_symmetric", {});
  for (int k = 0; k < 50; ++k) {
    Matrix r = rep(haar_sample_continuous(Family::SpecialOrthogonal, 3, rng));
    Vector u = random_unit(5, rng), v = random_unit(5, rng);
    EXPECT_NEAR((r * u).dot(r * v), u.dot(v), 1e-12);
  }
}

TEST(GramSymmetrizeTest, OrthogonalInputUnchanged) {
  FiniteGroupTable t = enumerate_closure(GroupSpec::symmetric(4));
  Representation sym = gram_symmetrize(build_named_rep("sn_permutation", {4, {}}), t);
  ASSERT_TRUE(sym.basis_change.has_value());
  EXPECT_LE(max_abs(*sym.basis_change - Matrix::Identity(4, 4)), 1e-10);
}

TEST(GramSymmetrizeTest, SignRepresentationUnchanged) {
  FiniteGroupTable t = enumerate_closure(GroupSpec::cyclic(2));
  Matrix minus_one(1, 1);
  minus_one << -1.0;
  Representation raw = explicit_rep({minus_one});
  Representation sym = gram_symmetrize(raw, t);
  for (const auto& g : t.elements()) EXPECT_DOUBLE_EQ(sym(g)(0, 0), raw(g)(0, 0));
}

TEST(GramSymmetrizeTest, ConjugatedPermutationBecomesOrthogonal) {
  FiniteGroupTable t = enumerate_closure(GroupSpec::symmetric(3));
  Representation base = build_named_rep("sn_permutation", {3, {}});
  Matrix d = Vector(Eigen::Vector3d(1, 2, 3)).asDiagonal();
  Representation skewed = conjugated(base, d);
  EXPECT_GT(max_orthogonality_defect(skewed, t.elements()), 0.1);
  Representation sym = gram_symmetrize(skewed, t);
  for (const auto& g : t.elements()) {
    Matrix r = sym(g);
    EXPECT_LE(orthogonality_defect(r), 1e-10);
    // Similar to the original: same character and same spectrum.
    EXPECT_NEAR(r.trace(), base(g).trace(), 1e-10);
  }
  // The recorded basis change intertwines: S * skewed(g) = sym(g) * S.
  for (const auto& g : t.elements())
    EXPECT_LE(max_abs(*sym.basis_change * skewed(g) - sym(g) * *sym.basis_change), 1e-10);
}

TEST(GramSymmetrizeTest, ExplicitMatrixGroupRoute) {
  // S_3 given by non-orthogonal generator matrices, images = the matrices.
  Matrix d = Vector(Eigen::Vector3d(1, 2, 3)).asDiagonal();
  std::vector<Matrix> gens;
  for (const auto& g : GroupSpec::symmetric(3).generators()) gens.push_back(d * g.permutation().matrix() * d.inverse());
  GroupSpec spec = GroupSpec::from_matrices(gens);
  FiniteGroupTable t = enumerate_closure(spec);
  ASSERT_EQ(t.order(), 6u);
  Representation raw = explicit_rep(gens);
  EXPECT_LE(homomorphism_defect(raw, t), 1e-10);
  Representation sym = gram_symmetrize(raw, t);
  EXPECT_LE(max_orthogonality_defect(sym, t.elements()), 1e-10);
}

TEST(GramSymmetrizeTest, SingularGram) {
  FiniteGroupTable t = enumerate_closure(GroupSpec::cyclic(3));
  Representation zero;
  zero.dim = 2;
  zero.catalog_id = "zero";
  zero.evaluator = [](const GroupElement&) { return Matrix(Matrix::Zero(2, 2)); };
  try {
    gram_symmetrize(zero, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularGram);
  }
}

TEST(GramSymmetrizeTest, ImagesViolatingRelationsRejected) {
  // C_3 generator sent to a rotation of order 4: not a homomorphism.
  FiniteGroupTable t = enumerate_closure(GroupSpec::cyclic(3));
  Representation bad = explicit_rep({rotation2(std::numbers::pi / 2)});
  EXPECT_GT(homomorphism_defect(bad, t), 0.1);
}

TEST(ConjugationActionTest, Basics) {
  Rng rng = make_stream(31);
  Representation rep = build_named_rep("so3_traceless_symmetric", {});
  GroupElement id{Matrix(Matrix::Identity(3, 3)), {}};
  for (int k = 0; k < 20; ++k) {
    GroupElement g = haar_sample_continuous(Family::SpecialOrthogonal, 3, rng);
    Matrix a = random_matrix(5, rng);
    EXPECT_LE(max_abs(conjugation_action(g, Matrix::Identity(5, 5), rep) - Matrix::Identity(5, 5)), 1e-12);
    EXPECT_LE(max_abs(conjugation_action(id, a, rep) - a), 1e-12);
    EXPECT_NEAR(conjugation_action(g, a, rep).norm(), a.norm(), 1e-10);
  }
  try {
    conjugation_action(id, Matrix::Identity(3, 3), rep);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(DiagMapTest, Basics) {
  Matrix e = diag_map(Vector::Unit(3, 0));
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = 1.0;
  EXPECT_EQ(e, expected);
  EXPECT_THROW(diag_map(Vector::Constant(3, 1.0)), Error);
}

TEST(DiagMapTest, RankOneTraceOneAndEquivariant) {
  Rng rng = make_stream(32);
  Representation rep = build_named_rep("so3_traceless_symmetric", {});
  for (int k = 0; k < 50; ++k) {
    Vector x = random_unit(5, rng);
    Matrix p = diag_map(x);
    EXPECT_NEAR(p.trace(), 1.0, 1e-12);
    EXPECT_LE(max_abs(p - p.transpose()), 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
    EXPECT_NEAR(eig.eigenvalues().maxCoeff(), 1.0, 1e-12);
    EXPECT_NEAR(frobenius_inner(p, p), 1.0, 1e-12);
    GroupElement g = haar_sample_continuous(Family::SpecialOrthogonal, 3, rng);
    EXPECT_LE(max_abs(diag_map(rep(g) * x) - conjugation_action(g, p, rep)), 1e-12);
  }
}

TEST(FrobeniusInnerTest, Basics) {
  Rng rng = make_stream(33);
  EXPECT_DOUBLE_EQ(frobenius_inner(Matrix::Identity(3, 3), Matrix::Identity(3, 3)), 3.0);
  Representation rep = build_named_rep("defining_orthogonal", {4, {}});
  for (int k = 0; k < 50; ++k) {
    Vector x = random_unit(4, rng), y = random_unit(4, rng);
    const double d = x.dot(y);
    EXPECT_NEAR(frobenius_inner(diag_map(x), diag_map(y)), d * d, 1e-12);
    GroupElement g = haar_sample_continuous(Family::Orthogonal, 4, rng);
    Matrix a = random_matrix(4, rng), b = random_matrix(4, rng);
    EXPECT_NEAR(frobenius_inner(conjugation_action(g, a, rep), conjugation_action(g, b, rep)), frobenius_inner(a, b),
                1e-10);
  }
  try {
    frobenius_inner(Matrix::Identity(2, 2), Matrix::Identity(3, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(ProjectMatrixTest, Basics) {
  Rng rng = make_stream(34);
  const Matrix i3 = Matrix::Identity(3, 3), i4 = Matrix::Identity(4, 4);
  EXPECT_LE(max_abs(project_matrix(i3, i3) - i3), 1e-15);
  for (int k = 0; k < 20; ++k) {
    Matrix b = random_matrix(4, rng);
    Matrix p = project_matrix(b, i4);
    EXPECT_LE(max_abs(p - (b.trace() / 4.0) * i4), 1e-12);
    EXPECT_LE(max_abs(project_matrix(p, i4) - p), 1e-12);
    Matrix a = random_matrix(4, rng);
    Matrix q = project_matrix(b, a);
    EXPECT_LE(max_abs(project_matrix(q, a) - q), 1e-12);
  }
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a(0, 1) = 1;
  b(1, 0) = 1;
  EXPECT_LE(max_abs(project_matrix(b, a)), 0.0);
  try {
    project_matrix(b, Matrix::Zero(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroDirection);
  }
}

}  // namespace
}  // namespace repspect
