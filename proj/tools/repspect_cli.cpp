// Command-line front end: `repspect analyze` and `repspect catalog`.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "repspect/repspect.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

void print_catalog(std::ostream& os) {
  os << "groups (config \"group\": {\"kind\": ...}):\n"
        "  symmetric           n      S_n, generated by (1 2) and the n-cycle\n"
        "  cyclic              n      C_n as 2x2 rotations by 2*pi/n\n"
        "  dihedral            n      D_n as 2x2 rotation and reflection\n"
        "  quaternion8                Q_8 as 4x4 left multiplications by i, j\n"
        "  orthogonal          n      O(n), Haar-sampled\n"
        "  special_orthogonal  n      SO(n), Haar-sampled\n"
        "  permutation_generators     \"generators\": 1-based permutations\n"
        "  matrix_generators          \"matrices\": row-major square matrices\n"
        "\n"
        "representations (config \"representation\": {\"name\": ...}):\n"
        "  sn_permutation           symmetric(n)            dim n\n"
        "  sn_sum_zero              symmetric(n)            dim n-1\n"
        "  cyclic_rotation          cyclic(n)               dim 2\n"
        "  q8_left                  quaternion8             dim 4\n"
        "  so3_traceless_symmetric  special_orthogonal(3)   dim 5\n"
        "  defining_orthogonal      any matrix group        dim n\n"
        "  explicit                 finite groups           \"generator_images\", Gram-symmetrized\n"
        "\n"
        "measures (config \"measures\": [{\"kind\": ...}]):\n"
        "  orbit              \"base\": vector (normalized on load)\n"
        "  uniform_sphere\n"
        "  uniform_subsphere  \"vectors\": orthogonal spanning vectors, or \"subspace\": \"witness\"\n"
        "  discrete           \"points\": vectors, \"probs\": probabilities summing to 1\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify irreducibility of real representations of compact groups"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "run the full analysis for a JSON config");
  std::string config_path;
  std::optional<std::int64_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> format;
  std::optional<std::string> trace;
  std::optional<std::string> output;
  analyze->add_option("--config", config_path, "path to the analysis config")->required();
  analyze->add_option("--samples", samples, "Monte Carlo sample count N");
  analyze->add_option("--seed", seed, "master seed");
  analyze->add_option("--workers", workers, "worker threads");
  analyze->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "text"}));
  analyze->add_option("--trace", trace, "convergence CSV path");
  analyze->add_option("--output", output, "report path (default: config outputs.report, else stdout)");

  app.add_subcommand("catalog", "list built-in groups, representations and measures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  if (app.got_subcommand("catalog")) {
    print_catalog(std::cout);
    return kExitOk;
  }

  using repspect::Error;
  repspect::AnalysisConfig cfg;
  try {
    cfg = repspect::parse_config_file(config_path);
    if (samples) {
      if (*samples < 2) throw Error(repspect::ErrorKind::ValidationError, "--samples must be >= 2");
      cfg.samples = static_cast<std::size_t>(*samples);
    }
    if (seed) cfg.seed = *seed;
    if (workers) {
      if (*workers < 1) throw Error(repspect::ErrorKind::ValidationError, "--workers must be >= 1");
      cfg.workers = *workers;
    }
    if (format) cfg.outputs.format = *format;
    if (trace) cfg.outputs.trace_path = *trace;
    if (output) cfg.outputs.report_path = *output;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const repspect::Report report = repspect::run_analysis(cfg);
    repspect::emit_outputs(report, cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return repspect::is_numerical_failure(e.kind()) ? kExitNumerical : kExitConfig;
  }
  return kExitOk;
}
