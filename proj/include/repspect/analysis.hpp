#pragma once

// End-to-end analysis: group -> representation -> commutant verdict ->
// witness -> exact identities -> Monte Carlo moment estimates, with the
// moment statistic cross-checked against the commutant verdict.

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "repspect/commutant.hpp"
#include "repspect/config.hpp"
#include "repspect/error.hpp"
#include "repspect/group_core.hpp"
#include "repspect/moments.hpp"
#include "repspect/representation.hpp"

#ifndef REPSPECT_VERSION
#define REPSPECT_VERSION "0.1.0"
#endif

namespace repspect {

inline constexpr double kCommutantResidualBand = 1e-7;
inline constexpr double kWitnessResidualBand = 1e-6;
inline constexpr double kRepresentationDefectBand = 1e-8;
inline constexpr std::uint64_t kTagCommutant = 6;

struct IdentityCheck {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double residual = 0.0;
  double band = 0.0;
  bool pass = false;
  bool exact = false;
};

struct MeasureResult {
  MeasureKind kind = MeasureKind::UniformSphere;
  MomentEstimate estimate;
  double reference = 0.0;    // expected value: 1/n, or 1/m on an m-dim subsphere
  double lower_bound = 0.0;  // 1/n
  double band = 0.0;
  bool pass = false;
  std::optional<bool> invariant;  // empty when it cannot be checked
};

struct CommutantSummary {
  int dim = 0;
  int sym_dim = 0;
  int skew_dim = 0;
  double residual = 0.0;
  double threshold = 0.0;
  bool ambiguous = false;
  std::string constraint_source;
  std::size_t n_constraints = 0;
};

struct TracePoint {
  std::size_t n_samples = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double reference = 0.0;
};

struct Report {
  std::string group;
  std::string representation;
  int dim = 0;
  std::optional<std::size_t> group_order;
  TypeVerdict verdict;
  CommutantSummary commutant;
  std::optional<WitnessSubspace> witness;
  std::vector<MeasureResult> measures;
  std::vector<IdentityCheck> identities;
  std::vector<std::string> warnings;
  std::vector<TracePoint> trace;
  // provenance
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  int workers = 1;
  Tolerances tolerances;
  std::string version = REPSPECT_VERSION;
};

namespace detail {

inline IdentityCheck equality_check(std::string name, double value, double reference, double band, bool exact) {
  IdentityCheck c;
  c.name = std::move(name);
  c.value = value;
  c.reference = reference;
  c.residual = std::abs(value - reference);
  c.band = band;
  c.pass = c.residual <= band;
  c.exact = exact;
  return c;
}

inline Vector resolve_vector(const Vector& v, const Representation& rep, const std::string& what) {
  if (v.size() == rep.dim) return v;
  if (rep.embedding && v.size() == rep.embedding->rows()) {
    Vector local = rep.embedding->transpose() * v;
    if (std::abs(local.norm() - 1.0) > 1e-10)
      throw Error(ErrorKind::BadMeasureSpec, what + " does not lie in the representation subspace");
    return local / local.norm();
  }
  throw Error(ErrorKind::BadMeasureSpec, what + " has the wrong length");
}

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace detail

/// Builds the (orthogonal) representation a config describes; explicit
/// images are Gram-symmetrized over the finite group.
inline Representation build_representation(const AnalysisConfig& cfg, const FiniteGroupTable* table) {
  Representation rep = build_named_rep(cfg.representation.name,
                                       {cfg.representation.n, cfg.representation.generator_images});
  if (table) {
    const double hom = homomorphism_defect(rep, *table);
    if (hom > kRepresentationDefectBand)
      throw Error(ErrorKind::BadParams, rep.catalog_id + " is not a homomorphism on this group (defect " +
                                            std::to_string(hom) + ")");
    if (cfg.representation.name == "explicit") return gram_symmetrize(rep, *table);
    const double orth = max_orthogonality_defect(rep, table->generators());
    if (orth > kRepresentationDefectBand)
      throw Error(ErrorKind::BadParams, rep.catalog_id + " images are not orthogonal (defect " +
                                            std::to_string(orth) + "); use the explicit representation");
  } else {
    // Smoke-check the evaluator against the group's payload type.
    Rng probe = make_stream(cfg.seed, 0, kTagCommutant + 1);
    const double orth = orthogonality_defect(rep(haar_sample_continuous(cfg.group.family, cfg.group.n, probe)));
    if (orth > kRepresentationDefectBand)
      throw Error(ErrorKind::BadParams, rep.catalog_id + " images are not orthogonal");
  }
  return rep;
}

inline Report run_analysis(const AnalysisConfig& cfg) {
  Report report;
  report.group = cfg.group.describe();
  report.seed = cfg.seed;
  report.samples = cfg.samples;
  report.workers = cfg.workers;
  report.tolerances = cfg.tolerances;
  const Tolerances& tol = cfg.tolerances;

  std::shared_ptr<const FiniteGroupTable> table;
  std::optional<GroupSampler> group;
  if (cfg.group.is_finite()) {
    table = std::make_shared<const FiniteGroupTable>(enumerate_closure(cfg.group));
    report.group_order = table->order();
    group.emplace(table);
  } else {
    group.emplace(cfg.group.family, cfg.group.n);
  }

  const Representation rep = build_representation(cfg, table.get());
  const int n = rep.dim;
  report.representation = rep.catalog_id;
  report.dim = n;

  // Commutant and verdict.
  CommutantBasis raw;
  if (table) {
    raw = commutant_basis(rep, *table, ConstraintMode::Generators, tol.nullspace_rel);
    report.commutant.constraint_source = "generators";
  } else {
    Rng rng = make_stream(cfg.seed, 0, kTagCommutant);
    raw = commutant_basis(rep, *group, rng, {8, 64, tol.nullspace_rel});
    report.commutant.constraint_source = "haar_samples";
  }
  if (raw.ambiguous) {
    if (tol.escalate_ambiguity)
      throw Error(ErrorKind::ThresholdAmbiguity, "a singular value lies within a factor of 10 of the nullspace cutoff");
    report.warnings.push_back("ThresholdAmbiguity: a singular value lies within a factor of 10 of the nullspace cutoff");
  }
  const CommutantBasis cb = split_symmetric_skew(raw);
  report.commutant.dim = cb.dim;
  report.commutant.sym_dim = cb.sym_dim;
  report.commutant.skew_dim = cb.skew_dim;
  report.commutant.residual = cb.residual;
  report.commutant.threshold = cb.threshold;
  report.commutant.ambiguous = cb.ambiguous;
  report.commutant.n_constraints = cb.constraints.size();
  report.verdict = classify_and_decide(cb);
  if (!report.verdict.irreducible) report.witness = witness_invariant_subspace(cb);
  const bool irreducible = report.verdict.irreducible;
  const double inv_n = 1.0 / n;

  // Measures, resolved to representation coordinates.
  std::vector<MeasureSpec> specs;
  for (const auto& mc : cfg.measures) {
    switch (mc.kind) {
      case MeasureKind::Orbit:
        specs.push_back(MeasureSpec::orbit(detail::resolve_vector(mc.base, rep, "orbit base")));
        break;
      case MeasureKind::UniformSphere:
        specs.push_back(MeasureSpec::uniform_sphere());
        break;
      case MeasureKind::UniformSubsphere:
        if (mc.witness_subspace) {
          if (!report.witness)
            throw Error(ErrorKind::BadMeasureSpec, "representation is irreducible; there is no witness subspace");
          specs.push_back(MeasureSpec::uniform_subsphere(report.witness->basis));
        } else {
          Matrix w(n, static_cast<Eigen::Index>(mc.vectors.size()));
          for (std::size_t k = 0; k < mc.vectors.size(); ++k) w.col(static_cast<Eigen::Index>(k)) = mc.vectors[k];
          specs.push_back(MeasureSpec::uniform_subsphere(w));
        }
        break;
      case MeasureKind::Discrete: {
        std::vector<Vector> pts;
        for (const auto& p : mc.points) pts.push_back(detail::resolve_vector(p, rep, "discrete point"));
        specs.push_back(MeasureSpec::discrete(std::move(pts), mc.probs));
        break;
      }
    }
    specs.back().validate(n);
  }

  Vector anchor = Vector::Unit(n, 0);
  for (const auto& s : specs)
    if (s.kind == MeasureKind::Orbit) {
      anchor = s.base;
      break;
    }

  // Exact or Monte Carlo identities for the orbit of the anchor vector.
  const McOptions mc_opts{cfg.samples, cfg.seed, cfg.workers};
  if (table) {
    const Matrix projector = reynolds_matrix(rep, *table);
    const MeasureSpec orbit = orbit_as_discrete(rep, *table, anchor);
    const ExpectationCheck ec = expectation_identity_check(orbit, projector);
    report.identities.push_back(detail::equality_check("expectation_projection", ec.residual, 0.0, tol.exact, true));
    if (max_abs(projector) <= tol.exact)
      report.identities.push_back(detail::equality_check("zero_mean", ec.mean_norm, 0.0, tol.exact, true));

    const OrbitMoments om = exact_finite_orbit_moments(rep, *table, anchor);
    if (om.double_sum)
      report.identities.push_back(
          detail::equality_check("double_sum_equals_single_sum", *om.double_sum, om.single_sum, tol.exact, true));
    const DiscreteOverlap overlap = exact_discrete_overlap(orbit);
    const LowerBound lb = lower_bound_check(overlap.second_moment);
    IdentityCheck bound;
    bound.name = "overlap_lower_bound";
    bound.value = lb.value;
    bound.reference = lb.bound;
    bound.residual = lb.gap;
    bound.band = 1e-12;
    bound.pass = lb.gap >= -1e-12 && std::abs(lb.value - (lb.bound + lb.gap)) <= tol.exact;
    bound.exact = true;
    report.identities.push_back(bound);
    if (irreducible) {
      const double order = static_cast<double>(table->order());
      report.identities.push_back(detail::equality_check("orbit_single_sum", om.single_sum, inv_n, tol.exact, true));
      report.identities.push_back(
          detail::equality_check("orbit_group_sum", om.group_sum, order / n, tol.exact_sum, true));
      const Matrix dev = overlap.second_moment.entries - Matrix::Identity(n, n) * inv_n;
      report.identities.push_back(detail::equality_check("isotropic_second_moment", max_abs(dev), 0.0, tol.exact, true));
    }
    if (rep.embedding && cfg.group.kind == GroupKind::Named && cfg.group.family == Family::Symmetric &&
        cfg.group.n <= kMaxCosineIdentityDegree) {
      const Vector x = *rep.embedding * anchor;
      const int deg = cfg.group.n;
      report.identities.push_back(detail::equality_check("sn_cosine_sum", sn_cosine_identity(x),
                                                         detail::factorial(deg) / (deg - 1), tol.exact_sum, true));
    }
  } else {
    const Matrix projector = fixed_space_projector(cb.constraints, n, tol.nullspace_rel);
    const VectorSampler orbit = make_sampler(MeasureSpec::orbit(anchor), rep, &*group);
    const ExpectationCheck ec = expectation_identity_check(orbit, projector, mc_opts);
    IdentityCheck projection = detail::equality_check("expectation_projection", ec.residual, 0.0,
                                                 tol.sigma_band / kSigmaBand * ec.residual_band, false);
    projection.pass = ec.residual <= projection.band;
    report.identities.push_back(projection);
    if (max_abs(projector) <= tol.exact) {
      IdentityCheck zero = detail::equality_check("zero_mean", ec.mean_norm, 0.0,
                                                  tol.sigma_band / kSigmaBand * ec.mean_norm_band, false);
      zero.pass = ec.mean_norm <= zero.band;
      report.identities.push_back(zero);
    }
    if (irreducible) {
      const MomentEstimate single = estimate_anchored_overlap(orbit, anchor, mc_opts);
      report.identities.push_back(detail::equality_check("orbit_single_sum", single.value, inv_n,
                                                         tol.sigma_band * single.std_error, false));
      const SecondMomentMatrix m = coordinate_second_moments(orbit, mc_opts);
      // Worst entry in units of its own standard error.
      double worst = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double dev = std::abs(m.entries(i, j) - (i == j ? inv_n : 0.0));
          const double se = m.std_error(i, j);
          worst = std::max(worst, se > 0.0 ? dev / se : (dev > tol.exact ? INFINITY : 0.0));
        }
      report.identities.push_back(detail::equality_check("isotropic_second_moment_sigma", worst, 0.0,
                                                         tol.sigma_band, false));
    }
  }

  // Moment statistic per measure, cross-checked against the verdict.
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const MeasureSpec& spec = specs[i];
    MeasureResult res;
    res.kind = spec.kind;
    res.lower_bound = inv_n;
    res.reference = spec.kind == MeasureKind::UniformSubsphere ? 1.0 / static_cast<double>(spec.subspace.cols()) : inv_n;

    switch (spec.kind) {
      case MeasureKind::Orbit:
      case MeasureKind::UniformSphere:
        res.invariant = true;
        break;
      case MeasureKind::UniformSubsphere:
        res.invariant = invariance_residual(spec.subspace, cb.constraints) <= kWitnessResidualBand;
        break;
      case MeasureKind::Discrete:
        if (table) res.invariant = check_discrete_invariance(spec, rep, *table).invariant;
        break;
    }

    if (spec.kind == MeasureKind::Discrete) {
      res.estimate = exact_discrete_overlap(spec).estimate;
    } else if (spec.kind == MeasureKind::Orbit && table) {
      res.estimate = exact_discrete_overlap(orbit_as_discrete(rep, *table, spec.base)).estimate;
    } else {
      McOptions opts = mc_opts;
      opts.seed = cfg.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1));
      res.estimate = estimate_squared_overlap(make_sampler(spec, rep, &*group), opts);
    }
    // Sampled bands never drop below the exact tolerance: a degenerate
    // measure has zero sample variance but still carries rounding error.
    res.band = res.estimate.exact ? tol.exact : std::max(tol.sigma_band * res.estimate.std_error, tol.exact);

    const double value = res.estimate.value;
    if (spec.kind == MeasureKind::UniformSubsphere) {
      res.pass = std::abs(value - res.reference) <= res.band;
    } else if (irreducible && res.invariant.value_or(true)) {
      res.pass = std::abs(value - inv_n) <= res.band;
    } else {
      res.pass = value >= inv_n - res.band;
    }

    if (irreducible && res.invariant.value_or(true)) {
      const double conflict =
          res.estimate.exact ? tol.exact : std::max(tol.conflict_band * res.estimate.std_error, tol.exact);
      if (value - inv_n > conflict) {
        throw Error(ErrorKind::VerdictConflict,
                    "commutant says irreducible but measure " + std::to_string(i) + " (" + to_string(spec.kind) +
                        ") has E<x,y>^2 = " + std::to_string(value) + " > 1/n = " + std::to_string(inv_n));
      }
    }
    report.measures.push_back(res);
  }

  // Convergence trace of the first measure (uniform sphere when none given).
  if (!cfg.outputs.trace_path.empty()) {
    const MeasureSpec traced = specs.empty() ? MeasureSpec::uniform_sphere() : specs.front();
    const double reference = traced.kind == MeasureKind::UniformSubsphere
                                 ? 1.0 / static_cast<double>(traced.subspace.cols())
                                 : inv_n;
    const VectorSampler sampler = make_sampler(traced, rep, &*group);
    std::vector<std::size_t> checkpoints;
    for (std::size_t k = 2; k <= cfg.samples; k *= 2) checkpoints.push_back(k);
    if (checkpoints.empty() || checkpoints.back() != cfg.samples) checkpoints.push_back(cfg.samples);
    for (std::size_t k : checkpoints) {
      McOptions opts = mc_opts;
      opts.n_samples = k;
      const MomentEstimate e = estimate_squared_overlap(sampler, opts);
      report.trace.push_back({k, e.value, e.std_error, reference});
    }
  }
  return report;
}

}  // namespace repspect
