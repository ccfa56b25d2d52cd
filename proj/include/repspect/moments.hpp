#pragma once

// Invariant probability measures on the unit sphere of a representation,
// Monte Carlo estimators for E<x,y>^2 and E[x x^T], and the exact
// finite-group moment identities.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "repspect/commutant.hpp"
#include "repspect/error.hpp"
#include "repspect/group_core.hpp"
#include "repspect/linalg.hpp"
#include "repspect/random.hpp"
#include "repspect/representation.hpp"

namespace repspect {

inline constexpr double kUnitTol = 1e-10;
inline constexpr double kProbabilitySumTol = 1e-12;
inline constexpr double kPointMatchTol = 1e-8;
inline constexpr double kSigmaBand = 4.0;

enum class MeasureKind { Orbit, UniformSphere, UniformSubsphere, Discrete };

inline const char* to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::Orbit: return "orbit";
    case MeasureKind::UniformSphere: return "uniform_sphere";
    case MeasureKind::UniformSubsphere: return "uniform_subsphere";
    case MeasureKind::Discrete: return "discrete";
  }
  return "?";
}

struct MeasureSpec {
  MeasureKind kind = MeasureKind::UniformSphere;
  Vector base;                 // orbit
  Matrix subspace;             // uniform_subsphere: orthonormal columns
  std::vector<Vector> points;  // discrete
  std::vector<double> probs;   // discrete

  static MeasureSpec orbit(Vector base) {
    MeasureSpec s;
    s.kind = MeasureKind::Orbit;
    s.base = std::move(base);
    return s;
  }
  static MeasureSpec uniform_sphere() { return MeasureSpec{}; }
  static MeasureSpec uniform_subsphere(Matrix basis) {
    MeasureSpec s;
    s.kind = MeasureKind::UniformSubsphere;
    s.subspace = std::move(basis);
    return s;
  }
  static MeasureSpec discrete(std::vector<Vector> points, std::vector<double> probs) {
    MeasureSpec s;
    s.kind = MeasureKind::Discrete;
    s.points = std::move(points);
    s.probs = std::move(probs);
    return s;
  }

  /// Throws BadMeasureSpec when the spec is inconsistent with dimension `dim`.
  void validate(int dim) const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::BadMeasureSpec, what); };
    switch (kind) {
      case MeasureKind::Orbit:
        if (base.size() != dim) fail("orbit base has length " + std::to_string(base.size()) + ", expected " + std::to_string(dim));
        if (std::abs(base.norm() - 1.0) > kUnitTol) fail("orbit base is not a unit vector");
        break;
      case MeasureKind::UniformSphere:
        if (dim < 1) fail("sphere dimension must be positive");
        break;
      case MeasureKind::UniformSubsphere:
        if (subspace.rows() != dim || subspace.cols() < 1 || subspace.cols() > dim)
          fail("subspace basis must be " + std::to_string(dim) + " x m with 1 <= m <= " + std::to_string(dim));
        if (max_abs(subspace.transpose() * subspace - Matrix::Identity(subspace.cols(), subspace.cols())) > kUnitTol)
          fail("subspace basis columns are not orthonormal");
        break;
      case MeasureKind::Discrete: {
        if (points.empty() || points.size() != probs.size()) fail("discrete measure needs matching points and probs");
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
          if (points[i].size() != dim) fail("discrete point " + std::to_string(i) + " has wrong length");
          if (std::abs(points[i].norm() - 1.0) > kUnitTol) fail("discrete point " + std::to_string(i) + " is not a unit vector");
          if (!(probs[i] >= 0.0)) fail("probability " + std::to_string(i) + " is negative");
          total += probs[i];
        }
        if (std::abs(total - 1.0) > kProbabilitySumTol) fail("probabilities sum to " + std::to_string(total) + ", not 1");
        break;
      }
    }
  }
};

/// The orbital measure of a finite group as an explicit weighted point set
/// (one point per group element, weight 1/|G|).
inline MeasureSpec orbit_as_discrete(const Representation& rep, const FiniteGroupTable& table, const Vector& v) {
  if (!table.complete()) throw Error(ErrorKind::IncompleteTable, "orbit enumeration needs a complete table");
  std::vector<Vector> pts;
  pts.reserve(table.order());
  for (const auto& g : table.elements()) pts.push_back(rep(g) * v);
  return MeasureSpec::discrete(std::move(pts), std::vector<double>(table.order(), 1.0 / static_cast<double>(table.order())));
}

inline Vector uniform_sphere_point(int dim, Rng& rng) {
  std::normal_distribution<double> normal;
  for (;;) {
    Vector g(dim);
    for (int i = 0; i < dim; ++i) g(i) = normal(rng);
    const double norm = g.norm();
    if (norm > 1e-300) return g / norm;
  }
}

/// Draws unit vectors from an invariant measure. Const and reentrant: all
/// randomness comes from the caller's stream.
class VectorSampler {
 public:
  VectorSampler(int dim, std::function<Vector(Rng&)> draw) : dim_(dim), draw_(std::move(draw)) {}
  int dim() const { return dim_; }
  Vector draw(Rng& rng) const { return draw_(rng); }

 private:
  int dim_;
  std::function<Vector(Rng&)> draw_;
};

/// `group` is required for orbit measures and ignored otherwise.
inline VectorSampler make_sampler(const MeasureSpec& spec, const Representation& rep, const GroupSampler* group) {
  spec.validate(rep.dim);
  switch (spec.kind) {
    case MeasureKind::Orbit:
      if (!group) throw Error(ErrorKind::BadMeasureSpec, "orbit measure needs a group sampler");
      return VectorSampler(rep.dim, [rep, g = *group, v = spec.base](Rng& rng) { return Vector(rep(g.draw(rng)) * v); });
    case MeasureKind::UniformSphere:
      return VectorSampler(rep.dim, [dim = rep.dim](Rng& rng) { return uniform_sphere_point(dim, rng); });
    case MeasureKind::UniformSubsphere:
      return VectorSampler(rep.dim, [w = spec.subspace](Rng& rng) {
        return Vector(w * uniform_sphere_point(static_cast<int>(w.cols()), rng));
      });
    case MeasureKind::Discrete: {
      std::vector<double> cumulative(spec.probs.size());
      std::partial_sum(spec.probs.begin(), spec.probs.end(), cumulative.begin());
      return VectorSampler(rep.dim, [cumulative, pts = spec.points](Rng& rng) {
        std::uniform_real_distribution<double> unit(0.0, cumulative.back());
        const double u = unit(rng);
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        auto idx = static_cast<std::size_t>(std::distance(cumulative.begin(), it));
        return pts[std::min(idx, pts.size() - 1)];
      });
    }
  }
  throw Error(ErrorKind::BadMeasureSpec, "unknown measure kind");
}

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  bool exact = false;
};

struct SecondMomentMatrix {
  Matrix entries;
  Matrix std_error;  // zero when exact
  std::size_t n_samples = 0;
  bool exact = false;
};

struct McOptions {
  std::size_t n_samples = 100'000;
  std::uint64_t seed = 1;
  int workers = 1;
};

// Stream tags keep the estimators' random streams disjoint for one seed.
inline constexpr std::uint64_t kTagOverlapX = 1;
inline constexpr std::uint64_t kTagOverlapY = 2;
inline constexpr std::uint64_t kTagCoordinates = 3;
inline constexpr std::uint64_t kTagExpectation = 4;
inline constexpr std::uint64_t kTagAnchored = 5;

namespace detail {

/// Running mean and M2 (Welford) for an array of statistics, combinable in a
/// fixed order across workers.
struct RunningStats {
  std::size_t count = 0;
  Vector mean;
  Vector m2;

  explicit RunningStats(Eigen::Index size = 0) : mean(Vector::Zero(size)), m2(Vector::Zero(size)) {}

  void add(const Vector& x) {
    ++count;
    Vector delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta.cwiseProduct(x - mean);
  }

  void merge(const RunningStats& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count), nb = static_cast<double>(other.count);
    const double total = na + nb;
    Vector delta = other.mean - mean;
    mean += delta * (nb / total);
    m2 += other.m2 + delta.cwiseAbs2() * (na * nb / total);
    count += other.count;
  }

  Vector std_error() const {
    if (count < 2) return Vector::Zero(mean.size());
    const double n = static_cast<double>(count);
    return (m2.cwiseMax(0.0) / (n - 1.0) / n).cwiseSqrt();
  }
};

/// Splits `opts.n_samples` draws into contiguous per-worker chunks; each
/// worker calls `body(worker_index, count, stats)`. Results are merged in
/// worker order, so the outcome depends only on (seed, workers, N).
template <typename Body>
RunningStats run_partitioned(const McOptions& opts, Eigen::Index stat_size, Body body) {
  if (opts.workers < 1) throw Error(ErrorKind::BadParams, "workers must be >= 1");
  const auto workers = static_cast<std::size_t>(opts.workers);
  std::vector<RunningStats> partial(workers, RunningStats(stat_size));
  auto chunk = [&](std::size_t w) { return opts.n_samples / workers + (w < opts.n_samples % workers ? 1 : 0); };
  if (workers == 1) {
    body(std::size_t{0}, chunk(0), partial[0]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back([&, w] { body(w, chunk(w), partial[w]); });
    for (auto& t : pool) t.join();
  }
  RunningStats total(stat_size);
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace detail

/// Estimates E<x,y>^2 for independent x, y drawn from `sampler`; x and y use
/// separate sub-streams.
inline MomentEstimate estimate_squared_overlap(const VectorSampler& sampler, const McOptions& opts) {
  if (opts.n_samples < 2) throw Error(ErrorKind::BadParams, "need at least two sample pairs");
  auto stats = detail::run_partitioned(opts, 1, [&](std::size_t w, std::size_t count, detail::RunningStats& acc) {
    Rng rx = make_stream(opts.seed, w, kTagOverlapX);
    Rng ry = make_stream(opts.seed, w, kTagOverlapY);
    Vector sq(1);
    for (std::size_t i = 0; i < count; ++i) {
      const double dot = sampler.draw(rx).dot(sampler.draw(ry));
      sq(0) = dot * dot;
      acc.add(sq);
    }
  });
  MomentEstimate est;
  est.value = stats.mean(0);
  est.std_error = stats.std_error()(0);
  est.n_samples = stats.count;
  return est;
}

/// Estimates E<x,v>^2 for a fixed unit vector v.
inline MomentEstimate estimate_anchored_overlap(const VectorSampler& sampler, const Vector& v, const McOptions& opts) {
  if (opts.n_samples < 2) throw Error(ErrorKind::BadParams, "need at least two samples");
  if (v.size() != sampler.dim()) throw Error(ErrorKind::DimensionMismatch, "anchor does not match sampler");
  auto stats = detail::run_partitioned(opts, 1, [&](std::size_t w, std::size_t count, detail::RunningStats& acc) {
    Rng rng = make_stream(opts.seed, w, kTagAnchored);
    Vector sq(1);
    for (std::size_t i = 0; i < count; ++i) {
      const double dot = sampler.draw(rng).dot(v);
      sq(0) = dot * dot;
      acc.add(sq);
    }
  });
  MomentEstimate est;
  est.value = stats.mean(0);
  est.std_error = stats.std_error()(0);
  est.n_samples = stats.count;
  return est;
}

/// Monte Carlo E[x x^T] with per-entry standard errors.
inline SecondMomentMatrix coordinate_second_moments(const VectorSampler& sampler, const McOptions& opts) {
  if (opts.n_samples < 2) throw Error(ErrorKind::BadParams, "need at least two samples");
  const int n = sampler.dim();
  auto stats = detail::run_partitioned(opts, static_cast<Eigen::Index>(n) * n,
                                       [&](std::size_t w, std::size_t count, detail::RunningStats& acc) {
                                         Rng rng = make_stream(opts.seed, w, kTagCoordinates);
                                         for (std::size_t i = 0; i < count; ++i) {
                                           Vector x = sampler.draw(rng);
                                           acc.add(vec(x * x.transpose()));
                                         }
                                       });
  SecondMomentMatrix m;
  m.entries = unvec(stats.mean, n);
  m.std_error = unvec(stats.std_error(), n);
  m.n_samples = stats.count;
  return m;
}

struct DiscreteOverlap {
  MomentEstimate estimate;
  SecondMomentMatrix second_moment;
};

/// Exact E<x,y>^2 of a discrete measure through M = sum_i p_i x_i x_i^T:
/// the value is ‖M‖_F^2.
inline DiscreteOverlap exact_discrete_overlap(const MeasureSpec& spec) {
  if (spec.kind != MeasureKind::Discrete) throw Error(ErrorKind::NotDiscrete, "exact overlap needs a discrete measure");
  if (spec.points.empty()) throw Error(ErrorKind::BadMeasureSpec, "discrete measure has no points");
  const auto n = spec.points.front().size();
  spec.validate(static_cast<int>(n));
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < spec.points.size(); ++i)
    m.noalias() += spec.probs[i] * spec.points[i] * spec.points[i].transpose();
  DiscreteOverlap out;
  out.second_moment.entries = m;
  out.second_moment.std_error = Matrix::Zero(n, n);
  out.second_moment.exact = true;
  out.estimate.value = m.squaredNorm();
  out.estimate.exact = true;
  return out;
}

struct LowerBound {
  double value = 0.0;  // ‖M‖_F^2
  double bound = 0.0;  // 1/n
  double gap = 0.0;    // ‖M − I/n‖_F^2
};

/// Splits M = I/n + z with z traceless; ‖M‖^2 = 1/n + ‖z‖^2 >= 1/n.
inline LowerBound lower_bound_check(const SecondMomentMatrix& m, double trace_tol = kUnitTol) {
  const auto n = m.entries.rows();
  if (n == 0 || m.entries.cols() != n) throw Error(ErrorKind::DimensionMismatch, "second moment must be square");
  const double trace = m.entries.trace();
  if (std::abs(trace - 1.0) > trace_tol)
    throw Error(ErrorKind::TraceNotOne, "second-moment trace is " + std::to_string(trace));
  LowerBound lb;
  lb.bound = 1.0 / static_cast<double>(n);
  lb.value = m.entries.squaredNorm();
  Matrix z = m.entries - Matrix::Identity(n, n) * lb.bound;
  lb.gap = z.squaredNorm();
  if (lb.gap < -1e-12) throw Error(ErrorKind::InconsistentDimensions, "negative gap");
  return lb;
}

struct OrbitMoments {
  double single_sum = 0.0;                // (1/|G|) sum_g <g v, v>^2
  std::optional<double> double_sum;       // (1/|G|^2) sum_{g,h} <g v, h v>^2
  double group_sum = 0.0;                 // |G| * single_sum
};

inline constexpr double kMaxDoubleSumPairs = 1e8;

inline OrbitMoments exact_finite_orbit_moments(const Representation& rep, const FiniteGroupTable& table, const Vector& v) {
  if (!table.complete()) throw Error(ErrorKind::IncompleteTable, "exact orbit sums need a complete table");
  if (v.size() != rep.dim) throw Error(ErrorKind::DimensionMismatch, "vector does not match representation");
  if (std::abs(v.norm() - 1.0) > kUnitTol) throw Error(ErrorKind::NotUnitVector, "base vector is not a unit vector");
  const std::size_t order = table.order();
  std::vector<Vector> orbit;
  orbit.reserve(order);
  for (const auto& g : table.elements()) orbit.push_back(rep(g) * v);

  OrbitMoments out;
  double single = 0.0;
  for (const auto& x : orbit) {
    const double d = x.dot(v);
    single += d * d;
  }
  out.group_sum = single;
  out.single_sum = single / static_cast<double>(order);
  const double pairs = static_cast<double>(order) * static_cast<double>(order);
  if (pairs <= kMaxDoubleSumPairs) {
    double total = 0.0;
    for (std::size_t i = 0; i < order; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < order; ++j) {
        const double d = orbit[i].dot(orbit[j]);
        row += d * d;
      }
      total += row;
    }
    out.double_sum = total / pairs;
  }
  return out;
}

inline constexpr int kMaxCosineIdentityDegree = 8;

/// sum over sigma in S_n of <x, sigma x>^2 / ‖x‖^4, with (sigma x)_i = x_{sigma(i)}.
inline double sn_cosine_identity(const Vector& x) {
  const auto n = x.size();
  if (n < 2) throw Error(ErrorKind::BadParams, "need n >= 2");
  if (n > kMaxCosineIdentityDegree) throw Error(ErrorKind::TooLarge, "enumeration limited to n <= 8");
  if (std::abs(x.sum()) > 1e-10) throw Error(ErrorKind::NotSumZero, "coordinates do not sum to zero");
  const double norm_sq = x.squaredNorm();
  if (norm_sq == 0.0) throw Error(ErrorKind::BadParams, "x must be nonzero");
  std::vector<int> sigma(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) sigma[i] = i;
  double total = 0.0;
  do {
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += x(i) * x(sigma[i]);
    total += dot * dot;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return total / (norm_sq * norm_sq);
}

struct ExpectationCheck {
  Vector mean_x;
  Vector mean_projected;
  double residual = 0.0;        // ‖E(x) − E(P x)‖
  double residual_band = 0.0;   // 4 x norm of per-coordinate standard errors of x − P x
  double mean_norm = 0.0;       // ‖E(x)‖
  double mean_norm_band = 0.0;  // 4 x norm of per-coordinate standard errors of x
  std::size_t n_samples = 0;
  bool exact = false;
};

/// Exact check for a discrete measure and the invariant projector `p`.
inline ExpectationCheck expectation_identity_check(const MeasureSpec& discrete, const Matrix& projector) {
  if (discrete.kind != MeasureKind::Discrete) throw Error(ErrorKind::NotDiscrete, "exact check needs a discrete measure");
  const auto n = projector.rows();
  ExpectationCheck out;
  out.exact = true;
  out.mean_x = Vector::Zero(n);
  out.mean_projected = Vector::Zero(n);
  for (std::size_t i = 0; i < discrete.points.size(); ++i) {
    out.mean_x += discrete.probs[i] * discrete.points[i];
    out.mean_projected += discrete.probs[i] * (projector * discrete.points[i]);
  }
  out.residual = (out.mean_x - out.mean_projected).norm();
  out.mean_norm = out.mean_x.norm();
  return out;
}

/// Monte Carlo check: E(x) and E(P x) estimated on the same draws.
inline ExpectationCheck expectation_identity_check(const VectorSampler& sampler, const Matrix& projector,
                                                   const McOptions& opts) {
  if (opts.n_samples < 2) throw Error(ErrorKind::BadParams, "need at least two samples");
  const int n = sampler.dim();
  // Layout: x (n), P x (n), x − P x (n).
  auto stats = detail::run_partitioned(opts, 3 * n, [&](std::size_t w, std::size_t count, detail::RunningStats& acc) {
    Rng rng = make_stream(opts.seed, w, kTagExpectation);
    Vector row(3 * n);
    for (std::size_t i = 0; i < count; ++i) {
      Vector x = sampler.draw(rng);
      Vector px = projector * x;
      row << x, px, x - px;
      acc.add(row);
    }
  });
  Vector se = stats.std_error();
  ExpectationCheck out;
  out.n_samples = stats.count;
  out.mean_x = stats.mean.head(n);
  out.mean_projected = stats.mean.segment(n, n);
  out.residual = stats.mean.tail(n).norm();
  out.residual_band = kSigmaBand * se.tail(n).norm();
  out.mean_norm = out.mean_x.norm();
  out.mean_norm_band = kSigmaBand * se.head(n).norm();
  return out;
}

struct InvarianceResult {
  bool invariant = true;
  std::optional<std::size_t> first_violation;  // table index of the offending element
};

/// Whether every group element permutes the weighted point set of a discrete
/// measure (points matched within 1e-8, coincident weights summed).
inline InvarianceResult check_discrete_invariance(const MeasureSpec& spec, const Representation& rep,
                                                  const FiniteGroupTable& table) {
  if (spec.kind != MeasureKind::Discrete) throw Error(ErrorKind::NotDiscrete, "invariance check needs a discrete measure");
  if (!table.complete()) throw Error(ErrorKind::IncompleteTable, "invariance check needs a complete table");
  spec.validate(rep.dim);

  std::vector<Vector> reps;
  std::vector<double> weight;
  auto find = [&](const Vector& p) -> std::optional<std::size_t> {
    for (std::size_t j = 0; j < reps.size(); ++j)
      if ((reps[j] - p).cwiseAbs().maxCoeff() < kPointMatchTol) return j;
    return std::nullopt;
  };
  for (std::size_t i = 0; i < spec.points.size(); ++i) {
    if (auto j = find(spec.points[i])) {
      weight[*j] += spec.probs[i];
    } else {
      reps.push_back(spec.points[i]);
      weight.push_back(spec.probs[i]);
    }
  }

  for (std::size_t g = 0; g < table.order(); ++g) {
    Matrix r = rep(table[g]);
    std::vector<double> moved(reps.size(), 0.0);
    bool ok = true;
    for (std::size_t j = 0; j < reps.size() && ok; ++j) {
      auto target = find(r * reps[j]);
      if (!target) {
        ok = false;
      } else {
        moved[*target] += weight[j];
      }
    }
    for (std::size_t j = 0; j < reps.size() && ok; ++j)
      if (std::abs(moved[j] - weight[j]) > 1e-10) ok = false;
    if (!ok) return {false, g};
  }
  return {};
}

}  // namespace repspect
