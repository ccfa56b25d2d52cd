#pragma once

// JSON analysis configs: parsing with defaults, validation that names the
// offending field, and serialization back to JSON.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repspect/error.hpp"
#include "repspect/group_core.hpp"
#include "repspect/linalg.hpp"
#include "repspect/moments.hpp"
#include "repspect/representation.hpp"

namespace repspect {

using json = nlohmann::json;

inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr std::size_t kDefaultSamples = 100'000;

struct Tolerances {
  double sigma_band = kSigmaBand;  // Monte Carlo acceptance band, in standard errors
  double conflict_band = 6.0;      // verdict conflict threshold, in standard errors
  double exact = 1e-10;            // exact identities on normalized quantities
  double exact_sum = 1e-9;         // exact identities on unnormalized group sums
  double nullspace_rel = kNullspaceRelTol;
  bool escalate_ambiguity = false;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct RepresentationConfig {
  std::string name;
  int n = 0;
  std::vector<Matrix> generator_images;
};

struct MeasureConfig {
  MeasureKind kind = MeasureKind::UniformSphere;
  Vector base;                 // orbit; normalized, in representation or ambient coordinates
  std::vector<Vector> vectors;  // uniform_subsphere spanning vectors, normalized
  bool witness_subspace = false;
  std::vector<Vector> points;
  std::vector<double> probs;
};

struct OutputConfig {
  std::string report_path;  // empty: stdout
  std::string format = "json";
  std::string trace_path;  // empty: no trace
};

struct AnalysisConfig {
  GroupSpec group;
  RepresentationConfig representation;
  std::vector<MeasureConfig> measures;
  std::size_t samples = kDefaultSamples;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  Tolerances tolerances;
  OutputConfig outputs;
  /// Dimension of the representation space (derived during validation).
  int dim = 0;
  /// Dimension of the ambient coordinates when the representation is
  /// embedded (sn_sum_zero); equals dim otherwise.
  int ambient_dim = 0;
};

namespace detail {

[[noreturn]] inline void invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::ValidationError, field + ": " + what);
}

template <typename T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    invalid(field, "has the wrong type");
  }
}

inline Vector parse_vector(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) invalid(field, "must be a non-empty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) invalid(field + "[" + std::to_string(i) + "]", "must be a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  if (!v.allFinite()) invalid(field, "must be finite");
  return v;
}

inline Matrix parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) invalid(field, "must be a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) invalid(field, "rows must be non-empty arrays");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    Vector row = parse_vector(j[r], field + "[" + std::to_string(r) + "]");
    if (static_cast<std::size_t>(row.size()) != cols) invalid(field, "rows have different lengths");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

inline Vector normalized(const Vector& v, const std::string& field) {
  const double norm = v.norm();
  if (!(norm > 0.0)) invalid(field, "must be nonzero");
  return v / norm;
}

inline json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json matrix_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vector_json(m.row(r).transpose()));
  return a;
}

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline GroupSpec parse_group(const json& j) {
  if (!j.is_object()) invalid("group", "must be an object");
  if (!j.contains("kind")) invalid("group.kind", "is required");
  const auto kind = get_as<std::string>(j["kind"], "group.kind");
  auto need_n = [&]() {
    if (!j.contains("n")) invalid("group.n", "is required for kind '" + kind + "'");
    const auto n = get_as<int>(j["n"], "group.n");
    if (n < 1) invalid("group.n", "must be >= 1");
    return n;
  };
  if (kind == "symmetric") return GroupSpec::symmetric(need_n());
  if (kind == "cyclic") return GroupSpec::cyclic(need_n());
  if (kind == "dihedral") return GroupSpec::dihedral(need_n());
  if (kind == "quaternion8") return GroupSpec::quaternion8();
  if (kind == "orthogonal") return GroupSpec::orthogonal(need_n());
  if (kind == "special_orthogonal") return GroupSpec::special_orthogonal(need_n());
  if (kind == "permutation_generators") {
    if (!j.contains("generators") || !j["generators"].is_array() || j["generators"].empty())
      invalid("group.generators", "must be a non-empty array of 1-based permutations");
    std::vector<Permutation> gens;
    for (std::size_t i = 0; i < j["generators"].size(); ++i) {
      const std::string field = "group.generators[" + std::to_string(i) + "]";
      auto images = get_as<std::vector<int>>(j["generators"][i], field);
      try {
        gens.push_back(Permutation::from_one_based(images));
      } catch (const Error& e) {
        invalid(field, e.what());
      }
    }
    try {
      return GroupSpec::from_permutations(std::move(gens));
    } catch (const Error& e) {
      invalid("group.generators", e.what());
    }
  }
  if (kind == "matrix_generators") {
    if (!j.contains("matrices") || !j["matrices"].is_array() || j["matrices"].empty())
      invalid("group.matrices", "must be a non-empty array of matrices");
    std::vector<Matrix> gens;
    for (std::size_t i = 0; i < j["matrices"].size(); ++i)
      gens.push_back(parse_matrix(j["matrices"][i], "group.matrices[" + std::to_string(i) + "]"));
    try {
      return GroupSpec::from_matrices(std::move(gens));
    } catch (const Error& e) {
      invalid("group.matrices", e.what());
    }
  }
  invalid("group.kind", "unknown kind '" + kind + "'");
}

inline json group_json(const GroupSpec& g) {
  json j;
  switch (g.kind) {
    case GroupKind::Named:
      j["kind"] = family_name(g.family);
      if (g.family != Family::Quaternion8) j["n"] = g.n;
      break;
    case GroupKind::PermutationGenerators: {
      j["kind"] = "permutation_generators";
      json gens = json::array();
      for (const auto& p : g.permutation_generators) {
        json images = json::array();
        for (int v : p.images()) images.push_back(v + 1);
        gens.push_back(images);
      }
      j["generators"] = gens;
      break;
    }
    case GroupKind::MatrixGenerators: {
      j["kind"] = "matrix_generators";
      json mats = json::array();
      for (const auto& m : g.matrix_generators) mats.push_back(matrix_json(m));
      j["matrices"] = mats;
      break;
    }
  }
  return j;
}

inline MeasureConfig parse_measure(const json& j, const std::string& field) {
  if (!j.is_object()) invalid(field, "must be an object");
  if (!j.contains("kind")) invalid(field + ".kind", "is required");
  const auto kind = get_as<std::string>(j["kind"], field + ".kind");
  MeasureConfig m;
  if (kind == "orbit") {
    m.kind = MeasureKind::Orbit;
    if (!j.contains("base")) invalid(field + ".base", "is required for orbit measures");
    m.base = normalized(parse_vector(j["base"], field + ".base"), field + ".base");
  } else if (kind == "uniform_sphere") {
    m.kind = MeasureKind::UniformSphere;
  } else if (kind == "uniform_subsphere") {
    m.kind = MeasureKind::UniformSubsphere;
    if (j.contains("subspace")) {
      if (get_as<std::string>(j["subspace"], field + ".subspace") != "witness")
        invalid(field + ".subspace", "only \"witness\" is supported");
      m.witness_subspace = true;
    } else {
      if (!j.contains("vectors") || !j["vectors"].is_array() || j["vectors"].empty())
        invalid(field + ".vectors", "must list orthogonal spanning vectors (or set \"subspace\": \"witness\")");
      for (std::size_t i = 0; i < j["vectors"].size(); ++i) {
        const std::string f = field + ".vectors[" + std::to_string(i) + "]";
        m.vectors.push_back(normalized(parse_vector(j["vectors"][i], f), f));
      }
    }
  } else if (kind == "discrete") {
    m.kind = MeasureKind::Discrete;
    if (!j.contains("points") || !j["points"].is_array() || j["points"].empty())
      invalid(field + ".points", "must be a non-empty array of vectors");
    if (!j.contains("probs")) invalid(field + ".probs", "is required for discrete measures");
    for (std::size_t i = 0; i < j["points"].size(); ++i) {
      const std::string f = field + ".points[" + std::to_string(i) + "]";
      m.points.push_back(normalized(parse_vector(j["points"][i], f), f));
    }
    m.probs = get_as<std::vector<double>>(j["probs"], field + ".probs");
    if (m.probs.size() != m.points.size()) invalid(field + ".probs", "must have one entry per point");
    double total = 0.0;
    for (std::size_t i = 0; i < m.probs.size(); ++i) {
      if (!(m.probs[i] >= 0.0) || !std::isfinite(m.probs[i]))
        invalid(field + ".probs[" + std::to_string(i) + "]", "must be a finite nonnegative number");
      total += m.probs[i];
    }
    if (std::abs(total - 1.0) > kProbabilitySumTol)
      invalid(field + ".probs", "must sum to 1 (got " + std::to_string(total) + ")");
  } else {
    invalid(field + ".kind", "unknown measure kind '" + kind + "'");
  }
  return m;
}

inline json measure_json(const MeasureConfig& m) {
  json j;
  j["kind"] = to_string(m.kind);
  switch (m.kind) {
    case MeasureKind::Orbit:
      j["base"] = vector_json(m.base);
      break;
    case MeasureKind::UniformSphere:
      break;
    case MeasureKind::UniformSubsphere:
      if (m.witness_subspace) {
        j["subspace"] = "witness";
      } else {
        json vs = json::array();
        for (const auto& v : m.vectors) vs.push_back(vector_json(v));
        j["vectors"] = vs;
      }
      break;
    case MeasureKind::Discrete: {
      json pts = json::array();
      for (const auto& p : m.points) pts.push_back(vector_json(p));
      j["points"] = pts;
      j["probs"] = m.probs;
      break;
    }
  }
  return j;
}

}  // namespace detail

/// Validates and fills defaults for an already-parsed JSON document.
inline AnalysisConfig parse_config(const json& doc) {
  using detail::invalid;
  if (!doc.is_object()) invalid("<root>", "config must be a JSON object");
  AnalysisConfig cfg;
  if (!doc.contains("group")) invalid("group", "is required");
  cfg.group = detail::parse_group(doc["group"]);

  if (!doc.contains("representation") || !doc["representation"].is_object())
    invalid("representation", "is required and must be an object");
  const json& rj = doc["representation"];
  if (!rj.contains("name")) invalid("representation.name", "is required");
  cfg.representation.name = detail::get_as<std::string>(rj["name"], "representation.name");
  cfg.representation.n = rj.contains("n") ? detail::get_as<int>(rj["n"], "representation.n")
                                          : cfg.group.n;
  if (rj.contains("generator_images")) {
    const json& imgs = rj["generator_images"];
    if (!imgs.is_array() || imgs.empty()) invalid("representation.generator_images", "must be a non-empty array");
    for (std::size_t i = 0; i < imgs.size(); ++i)
      cfg.representation.generator_images.push_back(
          detail::parse_matrix(imgs[i], "representation.generator_images[" + std::to_string(i) + "]"));
  }
  try {
    Representation probe = build_named_rep(cfg.representation.name,
                                           {cfg.representation.n, cfg.representation.generator_images});
    cfg.dim = probe.dim;
    cfg.ambient_dim = probe.embedding ? static_cast<int>(probe.embedding->rows()) : probe.dim;
  } catch (const Error& e) {
    invalid("representation", e.what());
  }
  if (cfg.representation.name == "explicit") {
    if (cfg.group.is_continuous()) invalid("representation.name", "explicit images need a finite group");
    if (cfg.representation.generator_images.size() != cfg.group.generators().size())
      invalid("representation.generator_images", "must give one image per group generator");
  }

  if (doc.contains("measure")) cfg.measures.push_back(detail::parse_measure(doc["measure"], "measure"));
  if (doc.contains("measures")) {
    if (!doc["measures"].is_array()) invalid("measures", "must be an array");
    for (std::size_t i = 0; i < doc["measures"].size(); ++i)
      cfg.measures.push_back(detail::parse_measure(doc["measures"][i], "measures[" + std::to_string(i) + "]"));
  }
  for (std::size_t i = 0; i < cfg.measures.size(); ++i) {
    const auto& m = cfg.measures[i];
    const std::string field = "measures[" + std::to_string(i) + "]";
    auto check_len = [&](const Vector& v, const std::string& f) {
      if (v.size() != cfg.dim && v.size() != cfg.ambient_dim)
        invalid(f, "has length " + std::to_string(v.size()) + " but the representation has dimension " +
                       std::to_string(cfg.dim));
    };
    if (m.kind == MeasureKind::Orbit) check_len(m.base, field + ".base");
    for (std::size_t k = 0; k < m.vectors.size(); ++k) {
      if (m.vectors[k].size() != cfg.dim) invalid(field + ".vectors[" + std::to_string(k) + "]", "wrong length");
      for (std::size_t l = 0; l < k; ++l)
        if (std::abs(m.vectors[k].dot(m.vectors[l])) > kUnitTol)
          invalid(field + ".vectors", "spanning vectors must be mutually orthogonal");
    }
    if (m.vectors.size() > static_cast<std::size_t>(cfg.dim)) invalid(field + ".vectors", "too many vectors");
    for (std::size_t k = 0; k < m.points.size(); ++k)
      if (m.points[k].size() != cfg.dim) invalid(field + ".points[" + std::to_string(k) + "]", "wrong length");
  }

  if (doc.contains("samples")) {
    const auto s = detail::get_as<std::int64_t>(doc["samples"], "samples");
    if (s < 2) invalid("samples", "must be >= 2");
    cfg.samples = static_cast<std::size_t>(s);
  }
  if (doc.contains("seed")) {
    cfg.seed = detail::get_as<std::uint64_t>(doc["seed"], "seed");
  } else if (const char* env = std::getenv("REPSPECT_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') invalid("REPSPECT_SEED", "must be an unsigned integer");
    cfg.seed = v;
  }
  if (doc.contains("workers")) {
    cfg.workers = detail::get_as<int>(doc["workers"], "workers");
    if (cfg.workers < 1) invalid("workers", "must be >= 1");
  }
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) invalid("tolerances", "must be an object");
    auto positive = [&](const char* key, double& slot) {
      if (!t.contains(key)) return;
      slot = detail::get_as<double>(t[key], std::string("tolerances.") + key);
      if (!(slot > 0.0)) invalid(std::string("tolerances.") + key, "must be positive");
    };
    positive("sigma_band", cfg.tolerances.sigma_band);
    positive("conflict_band", cfg.tolerances.conflict_band);
    positive("exact", cfg.tolerances.exact);
    positive("exact_sum", cfg.tolerances.exact_sum);
    positive("nullspace_rel", cfg.tolerances.nullspace_rel);
    if (t.contains("escalate_ambiguity"))
      cfg.tolerances.escalate_ambiguity = detail::get_as<bool>(t["escalate_ambiguity"], "tolerances.escalate_ambiguity");
  }
  if (doc.contains("outputs")) {
    const json& o = doc["outputs"];
    if (!o.is_object()) invalid("outputs", "must be an object");
    if (o.contains("report")) cfg.outputs.report_path = detail::get_as<std::string>(o["report"], "outputs.report");
    if (o.contains("format")) cfg.outputs.format = detail::get_as<std::string>(o["format"], "outputs.format");
    if (o.contains("trace")) cfg.outputs.trace_path = detail::get_as<std::string>(o["trace"], "outputs.trace");
  }
  if (cfg.outputs.format != "json" && cfg.outputs.format != "text")
    invalid("outputs.format", "must be \"json\" or \"text\"");
  return cfg;
}

inline AnalysisConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                                           e.what());
  }
  return parse_config(doc);
}

inline AnalysisConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

/// Serializes a config with every default made explicit.
inline json config_to_json(const AnalysisConfig& cfg) {
  json j;
  j["group"] = detail::group_json(cfg.group);
  json rep;
  rep["name"] = cfg.representation.name;
  rep["n"] = cfg.representation.n;
  if (!cfg.representation.generator_images.empty()) {
    json imgs = json::array();
    for (const auto& m : cfg.representation.generator_images) imgs.push_back(detail::matrix_json(m));
    rep["generator_images"] = imgs;
  }
  j["representation"] = rep;
  json ms = json::array();
  for (const auto& m : cfg.measures) ms.push_back(detail::measure_json(m));
  j["measures"] = ms;
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["tolerances"] = {{"sigma_band", cfg.tolerances.sigma_band},
                     {"conflict_band", cfg.tolerances.conflict_band},
                     {"exact", cfg.tolerances.exact},
                     {"exact_sum", cfg.tolerances.exact_sum},
                     {"nullspace_rel", cfg.tolerances.nullspace_rel},
                     {"escalate_ambiguity", cfg.tolerances.escalate_ambiguity}};
  json out;
  out["format"] = cfg.outputs.format;
  if (!cfg.outputs.report_path.empty()) out["report"] = cfg.outputs.report_path;
  if (!cfg.outputs.trace_path.empty()) out["trace"] = cfg.outputs.trace_path;
  j["outputs"] = out;
  return j;
}

}  // namespace repspect
