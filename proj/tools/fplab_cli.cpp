// fplab — command-line front end for the free-probability laboratory.
//
// Subcommands map one-to-one onto experiments::run(); every stochastic
// subcommand requires an explicit seed so that identical (config, seed)
// pairs produce byte-identical reports at any worker count.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "fplab/experiments.hpp"
#include "fplab/serialize.hpp"

namespace {

using fplab::experiments::ExperimentConfig;

// "1e5", "100000", "2.5e4" -> sample count
std::size_t parse_count(const std::string& text) {
  try {
    const double v = std::stod(text);
    if (!(v >= 1.0) || v > 9e15) throw std::invalid_argument("range");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--samples", "expected a positive count, got '" +
                                                text + "'");
  }
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string piece =
        text.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!piece.empty()) out.push_back(std::stoi(piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) {
    throw CLI::ValidationError("--k", "expected a comma-separated list");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fplab — numerical laboratory for entropy, polar geometry, free "
      "cumulants, random-matrix models and matricial microstate volumes"};
  app.require_subcommand(0, 1);

  ExperimentConfig config;
  std::string samples_text;
  std::string ks_text = "2";
  std::string params_text;
  std::string config_path;

  app.add_option("--config", config_path,
                 "load a full experiment config from a JSON file (other "
                 "flags are ignored)");

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", config.out_path,
                    "write the report here (plus <out>.manifest.json)");
    sub->add_option("--workers", config.workers,
                    "worker threads (never affects results)")
        ->check(CLI::Range(1, 256));
  };

  // entropy ------------------------------------------------------------
  CLI::App* entropy = app.add_subcommand(
      "entropy", "scalar entropy functionals of a spectral law");
  entropy->add_option("--law", config.law.name, "law name, e.g. quarter_circle")
      ->required();
  entropy->add_option("--params", params_text,
                      "comma-separated law parameters");
  entropy->add_option("--grid-nodes", config.law.grid_nodes,
                      "quadrature grid size");
  entropy
      ->add_option("--op", config.op,
                   "log_energy | chi_sa | chi_rdiag | identity_defect")
      ->required();
  add_common(entropy);

  // geometry -----------------------------------------------------------
  CLI::App* geometry = app.add_subcommand(
      "geometry", "polar-decomposition geometry checks");
  geometry->add_option("--check", config.check, "jacobian | volume | push")
      ->required();
  geometry->add_option("--k", config.k, "matrix size (volume: largest k)");
  std::string geo_samples;
  geometry->add_option("--samples", geo_samples, "sample count");
  bool geo_has_seed = false;
  geometry->add_option("--seed", config.seed, "RNG seed")
      ->each([&](const std::string&) { geo_has_seed = true; });
  add_common(geometry);

  // cumulants ----------------------------------------------------------
  CLI::App* cumulants = app.add_subcommand(
      "cumulants", "moment-table transforms and R-diagonality tests");
  cumulants->add_option("--input", config.input_path, "moment table CSV")
      ->required();
  cumulants
      ->add_option("--op", config.op,
                   "to-cumulants | rdiag-test | haar-multiply")
      ->required();
  add_common(cumulants);

  // models -------------------------------------------------------------
  CLI::App* models = app.add_subcommand(
      "models", "finite random-matrix models and their moments");
  models
      ->add_option("--model", config.model,
                   "haar_unitary | ginibre | rdiag | freeness")
      ->required();
  models->add_option("--k", config.k, "matrix size")->required();
  std::string models_samples;
  models->add_option("--samples", models_samples, "sample count")->required();
  models->add_option("--order", config.order, "moment order (<= 6)");
  models->add_option("--law", config.law.name,
                     "singular-value law for rdiag / freeness");
  models->add_option("--params", params_text, "comma-separated law parameters");
  models->add_option("--seed", config.seed, "RNG seed (required)")
      ->required()
      ->each([&](const std::string&) { config.has_seed = true; });
  models->add_option("--stream-id", config.stream_id, "RNG stream id");
  models->add_option("--dump", config.dump_path,
                     "write the first sampled matrices to this CSV");
  models->add_option("--dump-count", config.dump_count,
                     "how many matrices to dump");
  add_common(models);

  // microstates ---------------------------------------------------------
  CLI::App* microstates = app.add_subcommand(
      "microstates", "matricial microstate volume estimates");
  microstates->add_option("--spec", config.spec_path, "spec JSON file")
      ->required();
  microstates->add_option("--k", ks_text, "comma-separated matrix sizes");
  std::string ms_samples;
  microstates->add_option("--samples", ms_samples, "sample count per k");
  microstates->add_option("--method", config.method,
                          "plain | splitting | automatic");
  microstates->add_option("--seed", config.seed, "RNG seed (required)")
      ->required()
      ->each([&](const std::string&) { config.has_seed = true; });
  microstates->add_option("--stream-id", config.stream_id, "RNG stream id");
  add_common(microstates);

  // amplify ---------------------------------------------------------------
  CLI::App* amplify = app.add_subcommand(
      "amplify", "bookkeeping constant of d-fold matricial amplification");
  amplify->add_option("--d", config.d, "amplification factor")->required();
  amplify->add_option("--v", config.v, "variance parameter");
  add_common(amplify);

  // suite -------------------------------------------------------------
  CLI::App* suite = app.add_subcommand(
      "suite", "self-validating acceptance suites");
  suite
      ->add_option("id", config.suite_id,
                   "geometry | entropy | cumulants | models | microstates | "
                   "amplify")
      ->required();
  suite->add_flag("--quick", config.quick,
                  "smaller sizes, identical assertions");
  suite->add_option("--seed", config.seed, "override the pinned suite seed")
      ->each([&](const std::string&) { config.has_seed = true; });
  add_common(suite);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0 through CLI11's own path
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) {
      const int workers = config.workers;
      config = fplab::experiments::config_from_json(
          fplab::read_text_file(config_path));
      config.workers = workers;
    } else if (app.get_subcommands().empty()) {
      std::fputs("fplab: expected a subcommand (try --help)\n", stderr);
      return 2;
    } else {
      config.subcommand = app.get_subcommands().front()->get_name();
      if (!params_text.empty()) {
        for (const std::string& piece : {params_text}) {
          std::size_t start = 0;
          while (start <= piece.size()) {
            const std::size_t comma = piece.find(',', start);
            const std::string field = piece.substr(
                start, comma == std::string::npos ? comma : comma - start);
            if (!field.empty()) config.law.params.push_back(std::stod(field));
            if (comma == std::string::npos) break;
            start = comma + 1;
          }
        }
      }
      if (config.subcommand == "geometry") {
        config.has_seed = geo_has_seed;
        if (!geo_samples.empty()) config.samples = parse_count(geo_samples);
      } else if (config.subcommand == "models") {
        config.samples = parse_count(models_samples);
      } else if (config.subcommand == "microstates") {
        config.ks = parse_int_list(ks_text);
        if (!ms_samples.empty()) config.samples = parse_count(ms_samples);
      }
    }

    const fplab::experiments::RunResult result =
        fplab::experiments::run(config);
    std::fputs(result.report.c_str(), stdout);
    return result.exit_code;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "fplab: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fplab: %s\n", e.what());
    return 2;
  }
}
