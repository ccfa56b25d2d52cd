#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "repspect/analysis.hpp"
#include "repspect/config.hpp"
#include "repspect/error.hpp"

namespace repspect {

/// Rounds to 12 significant digits so the serialized form is the 12-digit
/// decimal. Non-finite values become null.
inline json number12(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline std::string format12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline json report_to_json(const Report& r) {
  json verdict;
  verdict["irreducible"] = r.verdict.irreducible;
  verdict["type"] = to_string(r.verdict.type);
  verdict["commutant_dim"] = r.verdict.commutant_dim;
  verdict["sym_dim"] = r.verdict.sym_dim;

  json commutant;
  commutant["dim"] = r.commutant.dim;
  commutant["sym_dim"] = r.commutant.sym_dim;
  commutant["skew_dim"] = r.commutant.skew_dim;
  commutant["residual"] = number12(r.commutant.residual);
  commutant["residual_band"] = number12(kCommutantResidualBand);
  commutant["residual_pass"] = r.commutant.residual <= kCommutantResidualBand;
  commutant["threshold"] = number12(r.commutant.threshold);
  commutant["ambiguous"] = r.commutant.ambiguous;
  commutant["constraint_source"] = r.commutant.constraint_source;
  commutant["n_constraints"] = r.commutant.n_constraints;
  if (r.witness) {
    json w;
    w["dim"] = r.witness->m;
    w["eigenvalue"] = number12(r.witness->eigenvalue);
    w["residual"] = number12(r.witness->residual);
    w["band"] = number12(kWitnessResidualBand);
    w["pass"] = r.witness->residual <= kWitnessResidualBand;
    json basis = json::array();
    for (Eigen::Index c = 0; c < r.witness->basis.cols(); ++c) {
      json col = json::array();
      for (Eigen::Index i = 0; i < r.witness->basis.rows(); ++i) col.push_back(number12(r.witness->basis(i, c)));
      basis.push_back(col);
    }
    w["basis"] = basis;
    commutant["witness"] = w;
  } else {
    commutant["witness"] = nullptr;
  }

  json measures = json::array();
  for (const auto& m : r.measures) {
    json j;
    j["kind"] = to_string(m.kind);
    j["estimate"] = number12(m.estimate.value);
    j["stderr"] = number12(m.estimate.std_error);
    j["exact"] = m.estimate.exact;
    j["n_samples"] = m.estimate.n_samples;
    j["reference"] = number12(m.reference);
    j["lower_bound"] = number12(m.lower_bound);
    j["band"] = number12(m.band);
    j["pass"] = m.pass;
    j["invariant"] = m.invariant ? json(*m.invariant) : json(nullptr);
    measures.push_back(j);
  }

  json identities = json::array();
  for (const auto& c : r.identities) {
    identities.push_back({{"name", c.name},
                          {"value", number12(c.value)},
                          {"reference", number12(c.reference)},
                          {"residual", number12(c.residual)},
                          {"band", number12(c.band)},
                          {"pass", c.pass},
                          {"exact", c.exact}});
  }

  json provenance;
  provenance["group"] = r.group;
  if (r.group_order) provenance["group_order"] = *r.group_order;
  provenance["representation"] = r.representation;
  provenance["dim"] = r.dim;
  provenance["seed"] = r.seed;
  provenance["samples"] = r.samples;
  provenance["workers"] = r.workers;
  provenance["tolerances"] = {{"sigma_band", number12(r.tolerances.sigma_band)},
                              {"conflict_band", number12(r.tolerances.conflict_band)},
                              {"exact", number12(r.tolerances.exact)},
                              {"exact_sum", number12(r.tolerances.exact_sum)},
                              {"nullspace_rel", number12(r.tolerances.nullspace_rel)},
                              {"escalate_ambiguity", r.tolerances.escalate_ambiguity}};
  provenance["version"] = r.version;
  provenance["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION);
  provenance["warnings"] = r.warnings;

  json out;
  out["verdict"] = verdict;
  out["commutant"] = commutant;
  out["measures"] = measures;
  out["identities"] = identities;
  out["provenance"] = provenance;
  return out;
}

inline std::string report_to_text(const Report& r) {
  std::ostringstream os;
  os << "group:          " << r.group;
  if (r.group_order) os << " (order " << *r.group_order << ")";
  os << "\nrepresentation: " << r.representation << " (dim " << r.dim << ")\n";
  os << "verdict:        " << (r.verdict.irreducible ? "irreducible" : "reducible");
  if (r.verdict.irreducible) os << ", type " << to_string(r.verdict.type);
  os << "\ncommutant:      dim " << r.commutant.dim << " = " << r.commutant.sym_dim << " symmetric + "
     << r.commutant.skew_dim << " skew, residual " << format12(r.commutant.residual) << " (band "
     << format12(kCommutantResidualBand) << ", " << r.commutant.n_constraints << " " << r.commutant.constraint_source
     << ")\n";
  if (r.witness) {
    os << "witness:        invariant subspace of dim " << r.witness->m << ", residual "
       << format12(r.witness->residual) << " (band " << format12(kWitnessResidualBand) << ")\n";
  }
  if (!r.measures.empty()) os << "measures:\n";
  for (std::size_t i = 0; i < r.measures.size(); ++i) {
    const auto& m = r.measures[i];
    os << "  [" << (m.pass ? "PASS" : "FAIL") << "] " << i << " " << to_string(m.kind) << ": E<x,y>^2 = "
       << format12(m.estimate.value);
    if (m.estimate.exact) {
      os << " (exact)";
    } else {
      os << " +/- " << format12(m.estimate.std_error) << " (N = " << m.estimate.n_samples << ")";
    }
    os << ", reference " << format12(m.reference) << ", band " << format12(m.band);
    if (m.invariant) os << (*m.invariant ? ", invariant" : ", NOT invariant");
    os << "\n";
  }
  if (!r.identities.empty()) os << "identities:\n";
  for (const auto& c : r.identities) {
    os << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": value " << format12(c.value) << ", reference "
       << format12(c.reference) << ", residual " << format12(c.residual) << ", band " << format12(c.band)
       << (c.exact ? " (exact)" : " (sampled)") << "\n";
  }
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  os << "seed " << r.seed << ", samples " << r.samples << ", workers " << r.workers << ", version " << r.version
     << "\n";
  return os.str();
}

inline std::string trace_to_csv(const Report& r) {
  std::ostringstream os;
  os << "n_samples,estimate,stderr,reference\n";
  for (const auto& p : r.trace)
    os << p.n_samples << "," << format12(p.estimate) << "," << format12(p.std_error) << "," << format12(p.reference)
       << "\n";
  return os.str();
}

inline std::string render_report(const Report& r, const std::string& format) {
  if (format == "text") return report_to_text(r);
  return report_to_json(r).dump(2) + "\n";
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path + "'");
}

/// Writes the report (to the configured path, or `fallback` when empty) and
/// the optional convergence trace.
inline void emit_outputs(const Report& r, const AnalysisConfig& cfg, std::ostream& fallback = std::cout) {
  const std::string body = render_report(r, cfg.outputs.format);
  if (cfg.outputs.report_path.empty()) {
    fallback << body;
  } else {
    write_file(cfg.outputs.report_path, body);
  }
  if (!cfg.outputs.trace_path.empty()) write_file(cfg.outputs.trace_path, trace_to_csv(r));
}

}  // namespace repspect
