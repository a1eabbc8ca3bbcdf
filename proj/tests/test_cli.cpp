#include <doctest.h>

#include <cstdio>
#include <stdexcept>
#include <string>

#include "fplab/experiments.hpp"
#include "fplab/serialize.hpp"

namespace ex = fplab::experiments;

namespace {

ex::ExperimentConfig entropy_config() {
  ex::ExperimentConfig c;
  c.subcommand = "entropy";
  c.law.name = "quarter_circle";
  c.law.grid_nodes = 1024;
  c.op = "chi_rdiag";
  return c;
}

}  // namespace

TEST_CASE("configs round-trip through their canonical JSON form") {
  ex::ExperimentConfig c;
  c.subcommand = "microstates";
  c.spec_path = "spec.json";
  c.ks = {2, 3, 4};
  c.samples = 100000;
  c.method = "automatic";
  c.seed = 99;
  c.has_seed = true;
  c.stream_id = 7;
  c.out_path = "report.json";
  c.tolerances["assert_abs_below"] = 0.5;
  const std::string json = ex::config_to_json(c);
  const ex::ExperimentConfig back = ex::config_from_json(json);
  CHECK(ex::config_to_json(back) == json);
  CHECK(back.ks == c.ks);
  CHECK(back.seed == c.seed);
  CHECK(back.has_seed);
  CHECK(back.tolerances.at("assert_abs_below") == 0.5);
}

TEST_CASE("config hashing is stable and ignores the worker knob") {
  ex::ExperimentConfig c = entropy_config();
  const std::string h1 = ex::config_hash(c);
  CHECK(h1.size() == 16);
  c.workers = 32;  // execution knob: must not change identity
  CHECK(ex::config_hash(c) == h1);
  c.op = "chi_sa";
  CHECK(ex::config_hash(c) != h1);
}

TEST_CASE("unknown config keys are rejected") {
  CHECK_THROWS_AS(
      ex::config_from_json(
          R"({"subcommand": "entropy", "law": {"name": "uniform"}, "op": "chi_sa", "bogus": 1})"),
      std::invalid_argument);
  CHECK_THROWS_AS(ex::config_from_json(
                      R"({"subcommand": "amplify", "d": 2, "seed": 4})"),
                  std::invalid_argument);  // amplify takes no seed
  CHECK_THROWS_AS(ex::config_from_json(R"({"op": "chi_sa"})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ex::config_from_json("not json"), std::invalid_argument);
}

TEST_CASE("entropy runs end to end with a parsable report") {
  const ex::RunResult r = ex::run(entropy_config());
  CHECK(r.exit_code == 0);
  CHECK(r.report.find("\"subcommand\": \"entropy\"") != std::string::npos);
  CHECK(r.report.find("\"value\":") != std::string::npos);
  CHECK(r.report.find("\"error_estimate\":") != std::string::npos);
  CHECK(r.report.find("\"method\":") != std::string::npos);
  CHECK(r.manifest.find("\"config_hash\"") != std::string::npos);
  CHECK(r.report.back() == '\n');
}

TEST_CASE("in-config assertions flip the exit code") {
  ex::ExperimentConfig c = entropy_config();
  c.tolerances["assert_value"] = 2.1447;  // log(pi e)
  c.tolerances["assert_tol"] = 0.01;
  CHECK(ex::run(c).exit_code == 0);
  c.tolerances["assert_tol"] = 1e-9;  // unattainably tight
  CHECK(ex::run(c).exit_code == 1);
}

TEST_CASE("stochastic subcommands demand an explicit seed") {
  ex::ExperimentConfig c;
  c.subcommand = "models";
  c.model = "haar_unitary";
  c.k = 4;
  c.samples = 10;
  CHECK_THROWS_AS(ex::run(c), std::invalid_argument);
  c.seed = 5;
  c.has_seed = true;
  CHECK(ex::run(c).exit_code == 0);

  ex::ExperimentConfig g;
  g.subcommand = "geometry";
  g.check = "jacobian";
  g.samples = 2;
  CHECK_THROWS_AS(ex::run(g), std::invalid_argument);
}

TEST_CASE("identical configs and seeds give byte-identical reports") {
  ex::ExperimentConfig c;
  c.subcommand = "models";
  c.model = "ginibre";
  c.k = 8;
  c.samples = 200;
  c.seed = 11;
  c.has_seed = true;
  const ex::RunResult a = ex::run(c);
  const ex::RunResult b = ex::run(c);
  CHECK(a.report == b.report);
  CHECK(a.manifest == b.manifest);
  c.workers = 4;
  const ex::RunResult d = ex::run(c);
  CHECK(d.report == a.report);
  CHECK(d.manifest == a.manifest);
}

TEST_CASE("reports and manifests land at the requested output path") {
  ex::ExperimentConfig c;
  c.subcommand = "amplify";
  c.d = 2;
  c.out_path = "cli_test_amplify_report.json";
  const ex::RunResult r = ex::run(c);
  CHECK(fplab::read_text_file(c.out_path) == r.report);
  CHECK(fplab::read_text_file(c.out_path + ".manifest.json") == r.manifest);
  std::remove(c.out_path.c_str());
  std::remove((c.out_path + ".manifest.json").c_str());
}

TEST_CASE("suite ids map to pinned seeds and run deterministically") {
  for (const char* id :
       {"geometry", "entropy", "cumulants", "models", "microstates",
        "amplify"}) {
    CHECK(ex::pinned_suite_seed(id) != 0);
  }
  CHECK_THROWS_AS(ex::pinned_suite_seed("nonsense"), std::invalid_argument);

  const ex::RunResult a = ex::suite("amplify", true, 1, 106);
  CHECK(a.exit_code == 0);
  const ex::RunResult b = ex::suite("amplify", true, 2, 106);
  CHECK(a.report == b.report);
}

TEST_CASE("unknown subcommands and ops raise config errors") {
  ex::ExperimentConfig c;
  c.subcommand = "entropy";
  c.law.name = "quarter_circle";
  c.op = "no_such_op";
  CHECK_THROWS_AS(ex::run(c), std::invalid_argument);
  c.subcommand = "mystery";
  CHECK_THROWS_AS(ex::run(c), std::invalid_argument);
}
