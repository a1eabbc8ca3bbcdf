#pragma once

// Experiment runner: a serializable config for every CLI subcommand, JSON
// reports in which each numeric carries a provenance tag and an error
// estimate, per-module acceptance suites with pinned seeds, and a manifest
// (config hash, seed, versions) written next to each saved report.
//
// Reports are byte-deterministic: rerunning the same (config, seed) yields
// identical bytes for any worker count. Parallel sections always split work
// into a fixed job grid with one child RNG stream per job and merge results
// in job order; the worker count only decides how many threads serve the
// grid, so it is an execution knob, not an experiment parameter, and is
// excluded from the canonical config serialization and its hash.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fplab/spectral_measure.hpp"

namespace fplab::experiments {

// A grid law from the closed catalog, e.g. {"semicircle", {1.0}, 4096}.
struct LawRef {
  std::string name;
  std::vector<double> params;
  std::size_t grid_nodes = 4096;
};

// Closed catalog of microstate target distributions, so specs are replayable:
//   circular   — variance parameter
//   haar       — Haar unitary
//   rdiag_law  — u*b with b >= 0 distributed by `law` (its singular law)
//   table_csv  — explicit moment table loaded from `table_path`
struct TargetSpec {
  std::string kind = "circular";
  double variance = 1.0;
  LawRef law;
  std::string table_path;
};

struct ExperimentConfig {
  std::string subcommand;  // entropy|geometry|cumulants|models|microstates|amplify|suite

  // entropy (also the b-law for models/freeness)
  LawRef law;
  std::string op;  // entropy: log_energy|chi_sa|chi_rdiag|identity_defect
                   // cumulants: to-cumulants|rdiag-test|haar-multiply

  // geometry
  std::string check;  // jacobian|volume|push
  int k = 0;
  std::size_t samples = 0;

  // cumulants
  std::string input_path;

  // models
  std::string model;  // haar_unitary|ginibre|rdiag|freeness
  int order = 4;
  std::string dump_path;
  std::size_t dump_count = 0;

  // microstates
  std::string spec_path;
  std::vector<int> ks;
  std::string method = "automatic";  // plain|splitting|automatic

  // amplify
  int d = 0;
  double v = 1.0;

  // suite
  std::string suite_id;
  bool quick = false;

  // common
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::uint64_t stream_id = 0;
  std::string out_path;
  std::map<std::string, double> tolerances;  // thresholds and assertions

  // execution knob; never serialized, never hashed
  int workers = 1;
};

// Canonical JSON form. config_from_json rejects unknown keys and keys that
// do not belong to the config's subcommand; config_to_json emits exactly the
// keys that were meaningful, so values survive a round trip unchanged.
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

// FNV-1a hash of the canonical serialization, in hex.
std::string config_hash(const ExperimentConfig& config);

std::string version_string();

struct RunResult {
  int exit_code = 0;        // 0 pass, 1 assertion failure
  std::string report;       // JSON document (always produced)
  std::string manifest;     // JSON manifest (config hash, seed, versions)
};

// Executes one config: builds the report, and when out_path is set writes it
// there plus "<out_path>.manifest.json". Invalid configs throw
// std::invalid_argument / std::runtime_error (callers map these to exit 2);
// failed in-config assertions yield exit_code 1 with the report intact.
RunResult run(const ExperimentConfig& config);

// Per-module acceptance battery with a pinned default seed; `quick` shrinks
// sample counts and grid sizes but keeps every assertion and threshold.
// suite_id is one of geometry|entropy|cumulants|models|microstates|amplify.
std::uint64_t pinned_suite_seed(const std::string& suite_id);
RunResult suite(const std::string& suite_id, bool quick, int workers,
                std::uint64_t seed);

// Central-difference log-Jacobian of the polar parametrization
// (u, p) -> u p at a given point, over orthonormal tangent bases (Hermitian
// directions for p, left-translated anti-Hermitian directions for u, both
// orthonormal under <a,b> = Re tr(a b*)). Validates the analytic formula.
double fd_log_jacobian(const ComplexMatrix& u, const ComplexMatrix& p,
                       double step = 1e-5);

}  // namespace fplab::experiments
