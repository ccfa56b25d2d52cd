#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "repspect/commutant.hpp"

namespace repspect {
namespace {

Matrix vec_columns(const std::vector<Matrix>& basis) {
  Matrix out(basis.front().size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = vec(basis[k]);
  return out;
}

Vector random_unit(int n, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v.normalized();
}

CommutantBasis split_commutant(const Representation& rep, const FiniteGroupTable& t) {
  return split_symmetric_skew(commutant_basis(rep, t));
}

struct Case {
  GroupSpec group;
  std::string name;
  int n;
  int dim, sym_dim, skew_dim;
};

std::vector<Case> finite_cases() {
  return {{GroupSpec::symmetric(3), "sn_permutation", 3, 2, 2, 0},
          {GroupSpec::symmetric(4), "sn_permutation", 4, 2, 2, 0},
          {GroupSpec::symmetric(4), "sn_sum_zero", 4, 1, 1, 0},
          {GroupSpec::symmetric(5), "sn_sum_zero", 5, 1, 1, 0},
          {GroupSpec::cyclic(5), "cyclic_rotation", 5, 2, 1, 1},
          {GroupSpec::cyclic(2), "cyclic_rotation", 2, 4, 3, 1},
          {GroupSpec::quaternion8(), "q8_left", 4, 4, 1, 3},
          {GroupSpec::dihedral(5), "defining_orthogonal", 2, 1, 1, 0}};
}

TEST(ReynoldsTest, ExactAverages) {
  FiniteGroupTable s3 = enumerate_closure(GroupSpec::symmetric(3));
  Representation perm = build_named_rep("sn_permutation", {3, {}});
  Vector v = reynolds_project(perm, s3, Eigen::Vector3d(1, 2, 3));
  EXPECT_LE(max_abs(v - Vector::Constant(3, 2.0)), 1e-12);
  EXPECT_LE(max_abs(reynolds_project(perm, s3, Eigen::Vector3d(1, -2, 1))), 1e-12);

  FiniteGroupTable c4 = enumerate_closure(GroupSpec::cyclic(4));
  Representation rot = build_named_rep("cyclic_rotation", {4, {}});
  EXPECT_LE(max_abs(reynolds_project(rot, c4, Vector::Unit(2, 0))), 1e-12);
}

TEST(ReynoldsTest, ProjectorIsIdempotentAndFixesInvariants) {
  FiniteGroupTable s4 = enumerate_closure(GroupSpec::symmetric(4));
  Representation perm = build_named_rep("sn_permutation", {4, {}});
  Matrix p = reynolds_matrix(perm, s4);
  EXPECT_LE(max_abs(p * p - p), 1e-12);
  EXPECT_LE(max_abs(p - Matrix::Constant(4, 4, 0.25)), 1e-12);
  Vector ones = Vector::Constant(4, 0.5);
  EXPECT_LE(max_abs(reynolds_project(perm, s4, ones) - ones), 1e-12);
  // The fixed-space projector from generators agrees with the group average.
  EXPECT_LE(max_abs(fixed_space_projector(images(perm, s4.generators()), 4) - p), 1e-10);
}

TEST(ReynoldsTest, SampledAverageOnSphere) {
  Rng rng = make_stream(41);
  GroupSampler so3(Family::SpecialOrthogonal, 3);
  Representation rep = build_named_rep("defining_orthogonal", {3, {}});
  ReynoldsEstimate est = reynolds_project(rep, so3, Vector::Unit(3, 0), 20000, rng);
  for (int i = 0; i < 3; ++i) EXPECT_LE(std::abs(est.mean(i)), 4 * est.std_error(i));
}

TEST(NullspaceTest, RankAndAmbiguity) {
  Matrix clear = Matrix::Zero(3, 3);
  clear(0, 0) = 1.0;
  clear(1, 1) = 1e-3;
  NullspaceResult a = numerical_nullspace(clear, 1e-8);
  EXPECT_EQ(a.basis.cols(), 1);
  EXPECT_FALSE(a.ambiguous);
  EXPECT_LE(max_abs(a.basis.cwiseAbs() - Vector::Unit(3, 2)), 1e-15);

  Matrix near = Matrix::Zero(2, 2);
  near(0, 0) = 1.0;
  near(1, 1) = 5e-8;
  NullspaceResult b = numerical_nullspace(near, 1e-8);
  EXPECT_TRUE(b.ambiguous);
  EXPECT_DOUBLE_EQ(b.threshold, 1e-8);
}

TEST(CommutantTest, TrivialGroupGivesFullMatrixAlgebra) {
  FiniteGroupTable t = enumerate_closure(GroupSpec::symmetric(1));
  CommutantBasis cb = split_commutant(trivial_rep(3), t);
  EXPECT_EQ(cb.dim, 9);
  EXPECT_EQ(cb.sym_dim, 6);
  EXPECT_EQ(cb.skew_dim, 3);
}

TEST(CommutantTest, CatalogDimensions) {
  for (const auto& c : finite_cases()) {
    FiniteGroupTable t = enumerate_closure(c.group);
    Representation rep = build_named_rep(c.name, {c.n, {}});
    CommutantBasis cb = split_commutant(rep, t);
    const std::string label = rep.catalog_id + " on " + c.group.describe();
    EXPECT_EQ(cb.dim, c.dim) << label;
    EXPECT_EQ(cb.sym_dim, c.sym_dim) << label;
    EXPECT_EQ(cb.skew_dim, c.skew_dim) << label;
    EXPECT_FALSE(cb.ambiguous) << label;
    EXPECT_LE(cb.residual, 1e-10) << label;
    // Generators suffice: every element commutes with the basis.
    EXPECT_LE(commutation_defect(cb.basis, images(rep, t.elements())), 1e-10) << label;
  }
}

TEST(CommutantTest, MatchesIndependentOracle) {
  for (const auto& c : finite_cases()) {
    FiniteGroupTable t = enumerate_closure(c.group);
    Representation rep = build_named_rep(c.name, {c.n, {}});
    CommutantBasis cb = commutant_basis(rep, t);
    Matrix expected = oracle::commutant_span(images(rep, t.elements()), rep.dim);
    ASSERT_EQ(expected.cols(), cb.dim) << rep.catalog_id;
    EXPECT_LE(max_principal_angle(vec_columns(cb.basis), expected), 1e-7) << rep.catalog_id;
  }
}

TEST(CommutantTest, AllElementsAgreesWithGenerators) {
  FiniteGroupTable t = enumerate_closure(GroupSpec::quaternion8());
  Representation rep = build_named_rep("q8_left", {});
  CommutantBasis gen = commutant_basis(rep, t, ConstraintMode::Generators);
  CommutantBasis all = commutant_basis(rep, t, ConstraintMode::AllElements);
  EXPECT_EQ(all.constraints.size(), 8u);
  ASSERT_EQ(gen.dim, all.dim);
  EXPECT_LE(max_principal_angle(vec_columns(gen.basis), vec_columns(all.basis)), 1e-8);
}

TEST(CommutantTest, AllElementsRefusesLargeGroups) {
  FiniteGroupTable t = enumerate_closure(GroupSpec::symmetric(8));
  try {
    commutant_basis(build_named_rep("sn_permutation", {8, {}}), t, ConstraintMode::AllElements);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
  }
}

TEST(CommutantTest, SplitBasisShape) {
  FiniteGroupTable t = enumerate_closure(GroupSpec::quaternion8());
  CommutantBasis cb = split_commutant(build_named_rep("q8_left", {}), t);
  EXPECT_LE(max_abs(cb.basis[0] - Matrix::Identity(4, 4) / 2.0), 1e-15);
  EXPECT_LE(max_abs(vec_columns(cb.basis).transpose() * vec_columns(cb.basis) - Matrix::Identity(4, 4)), 1e-10);
  for (const auto& s : cb.symmetric_part()) EXPECT_LE(max_abs(s - s.transpose()), 1e-12);
  for (const auto& k : cb.skew_part()) {
    EXPECT_LE(max_abs(k + k.transpose()), 1e-12);
    // Right multiplication by a unit imaginary quaternion, scaled to unit norm.
    EXPECT_LE(orthogonality_defect(2.0 * k), 1e-10);
  }
  const auto skew = cb.skew_part();
  for (std::size_t a = 0; a < skew.size(); ++a)
    for (std::size_t b = a + 1; b < skew.size(); ++b)
      EXPECT_LE(max_abs(skew[a] * skew[b] + skew[b] * skew[a]), 1e-10);
}

TEST(CommutantTest, IdentityAlwaysInSpanAndRankOneProjectionsHaveNoSkewPart) {
  Rng rng = make_stream(42);
  for (const auto& c : finite_cases()) {
    FiniteGroupTable t = enumerate_closure(c.group);
    Representation rep = build_named_rep(c.name, {c.n, {}});
    CommutantBasis cb = split_commutant(rep, t);
    EXPECT_LE(span_residual(cb.basis, Matrix::Identity(rep.dim, rep.dim)), 1e-10);
    for (int k = 0; k < 10; ++k) {
      Vector x = random_unit(rep.dim, rng);
      EXPECT_LE(projection_norm(cb.skew_part(), diag_map(x)), 1e-10);
    }
  }
}

TEST(VerdictTest, Types) {
  auto verdict = [](const GroupSpec& g, const std::string& name, int n) {
    FiniteGroupTable t = enumerate_closure(g);
    return classify_and_decide(split_commutant(build_named_rep(name, {n, {}}), t));
  };
  TypeVerdict r = verdict(GroupSpec::symmetric(5), "sn_sum_zero", 5);
  EXPECT_TRUE(r.irreducible);
  EXPECT_EQ(r.type, FieldType::R);
  TypeVerdict c = verdict(GroupSpec::cyclic(7), "cyclic_rotation", 7);
  EXPECT_TRUE(c.irreducible);
  EXPECT_EQ(c.type, FieldType::C);
  TypeVerdict h = verdict(GroupSpec::quaternion8(), "q8_left", 4);
  EXPECT_TRUE(h.irreducible);
  EXPECT_EQ(h.type, FieldType::H);
  TypeVerdict p = verdict(GroupSpec::symmetric(3), "sn_permutation", 3);
  EXPECT_FALSE(p.irreducible);
  EXPECT_EQ(p.type, FieldType::NotApplicable);
  EXPECT_EQ(p.sym_dim, 2);
}

TEST(VerdictTest, RequiresSplitBasis) {
  FiniteGroupTable t = enumerate_closure(GroupSpec::cyclic(3));
  CommutantBasis raw = commutant_basis(build_named_rep("cyclic_rotation", {3, {}}), t);
  EXPECT_THROW(classify_and_decide(raw), Error);
  EXPECT_THROW(witness_invariant_subspace(raw), Error);
}

TEST(SampledCommutantTest, ContinuousCatalog) {
  Rng rng = make_stream(43);
  struct C {
    Family family;
    int group_n;
    Representation rep;
    int dim, sym_dim;
  };
  std::vector<C> cases = {{Family::SpecialOrthogonal, 3, build_named_rep("so3_traceless_symmetric", {}), 1, 1},
                          {Family::Orthogonal, 4, build_named_rep("defining_orthogonal", {4, {}}), 1, 1},
                          {Family::SpecialOrthogonal, 2, build_named_rep("defining_orthogonal", {2, {}}), 2, 1}};
  for (const auto& c : cases) {
    GroupSampler sampler(c.family, c.group_n);
    CommutantBasis cb = split_symmetric_skew(commutant_basis(c.rep, sampler, rng));
    EXPECT_EQ(cb.dim, c.dim) << c.rep.catalog_id;
    EXPECT_EQ(cb.sym_dim, c.sym_dim) << c.rep.catalog_id;
    std::vector<Matrix> fresh;
    for (int k = 0; k < 50; ++k) fresh.push_back(c.rep(sampler.draw(rng)));
    EXPECT_LE(commutation_defect(cb.basis, fresh), 1e-8) << c.rep.catalog_id;
  }
}

TEST(SampledCommutantTest, NonStabilizedDimension) {
  Rng rng = make_stream(44);
  GroupSampler sampler(Family::SpecialOrthogonal, 3);
  try {
    commutant_basis(build_named_rep("so3_traceless_symmetric", {}), sampler, rng, {8, 8, kNullspaceRelTol});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonStabilizedDimension);
  }
}

TEST(WitnessTest, PermutationRepresentationSplitsOffDiagonal) {
  FiniteGroupTable t = enumerate_closure(GroupSpec::symmetric(3));
  Representation perm = build_named_rep("sn_permutation", {3, {}});
  WitnessSubspace w = witness_invariant_subspace(split_commutant(perm, t));
  Matrix diagonal = Vector::Constant(3, 1.0 / std::sqrt(3.0));
  ASSERT_EQ(w.m, 1);
  EXPECT_LE(max_principal_angle(w.basis, diagonal), 1e-8);
  EXPECT_LE(w.residual, 1e-10);
  EXPECT_LE(invariance_residual(w.basis, images(perm, t.elements())), 1e-10);
}

TEST(WitnessTest, RotationPlusTrivialFindsTrivialLine) {
  FiniteGroupTable t = enumerate_closure(GroupSpec::cyclic(3));
  Representation rep = direct_sum(build_named_rep("cyclic_rotation", {3, {}}), trivial_rep(1));
  CommutantBasis cb = split_commutant(rep, t);
  EXPECT_EQ(cb.dim, 3);
  WitnessSubspace w = witness_invariant_subspace(cb);
  ASSERT_EQ(w.m, 1);
  EXPECT_LE(max_principal_angle(w.basis, Matrix(Vector::Unit(3, 2))), 1e-8);
}

TEST(WitnessTest, DoubledDefiningRepresentationOfO2) {
  Rng rng = make_stream(45);
  Representation o2 = build_named_rep("defining_orthogonal", {2, {}});
  Representation doubled = direct_sum(o2, o2);
  GroupSampler sampler(Family::Orthogonal, 2);
  CommutantBasis cb = split_symmetric_skew(commutant_basis(doubled, sampler, rng));
  EXPECT_EQ(cb.dim, 4);
  EXPECT_EQ(cb.sym_dim, 3);
  EXPECT_FALSE(classify_and_decide(cb).irreducible);
  WitnessSubspace w = witness_invariant_subspace(cb);
  EXPECT_EQ(w.m, 2);
  EXPECT_LE(w.residual, 1e-8);
  std::vector<Matrix> fresh;
  for (int k = 0; k < 50; ++k) fresh.push_back(doubled(sampler.draw(rng)));
  EXPECT_LE(invariance_residual(w.basis, fresh), 1e-8);
}

TEST(WitnessTest, IrreducibleHasNoWitness) {
  FiniteGroupTable t = enumerate_closure(GroupSpec::symmetric(4));
  try {
    witness_invariant_subspace(split_commutant(build_named_rep("sn_sum_zero", {4, {}}), t));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotReducible);
  }
}

}  // namespace
}  // namespace repspect
