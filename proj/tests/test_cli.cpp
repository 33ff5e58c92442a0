#include <doctest.h>

#include <fstream>

#include "levymc/cli.hpp"

using namespace levymc;

namespace {

json base_config() {
  return json::parse(R"({
    "model": {
      "dim_x": 1,
      "sigma": [[0.0]],
      "drift": [0.3],
      "measure": {"kind": "truncated_stable", "alpha": 1.5, "intensity": 1.0, "radius": 1.0}
    },
    "coefficient": {"kind": "constant", "matrix": [[2.0]]},
    "y0": [1.0],
    "payoff": {"kind": "terminal", "weights": [1.0]},
    "schedule": {"mode": "case1", "tau": 1024, "C1": 1.0, "C2": 1.0},
    "seed": 42
  })");
}

std::string write_config(const json& doc, const std::string& name) {
  const std::string path = "cli_" + name + ".json";
  std::ofstream f(path, std::ios::binary);
  f << doc.dump(2);
  return path;
}

}  // namespace

TEST_CASE("config parsing is strict") {
  CHECK_NOTHROW(config_from_json(base_config()));

  json unknown_top = base_config();
  unknown_top["bogus"] = 1;
  CHECK_THROWS_AS(config_from_json(unknown_top), ConfigError);

  json unknown_nested = base_config();
  unknown_nested["payoff"]["extra"] = true;
  CHECK_THROWS_AS(config_from_json(unknown_nested), ConfigError);

  json missing = base_config();
  missing.erase("y0");
  CHECK_THROWS_AS(config_from_json(missing), ConfigError);

  json bad_dim = base_config();
  bad_dim["y0"] = {1.0, 2.0};
  CHECK_THROWS_AS(config_from_json(bad_dim), ConfigError);

  json bad_payoff = base_config();
  bad_payoff["payoff"] = {{"kind", "digital"}};
  CHECK_THROWS_AS(config_from_json(bad_payoff), ConfigError);

  json bad_mode = base_config();
  bad_mode["schedule"] = {{"mode", "adaptive"}};
  CHECK_THROWS_AS(config_from_json(bad_mode), ConfigError);
}

TEST_CASE("estimate command: determinism, seed override, exit codes") {
  const std::string path = write_config(base_config(), "estimate");

  const auto r1 = run_command({"estimate", "--config", path});
  REQUIRE(r1.code == 0);
  const json out = json::parse(r1.out);
  CHECK(out.contains("estimate"));
  CHECK(out.contains("stderr"));
  CHECK(out.contains("cost"));
  CHECK(out["levels"].size() > 0);
  CHECK(r1.out.back() == '\n');

  // byte-identical across repeated runs and worker counts
  for (const char* w : {"1", "4", "8"}) {
    const auto r = run_command({"estimate", "--config", path, "--workers", w});
    CHECK(r.code == 0);
    CHECK(r.out == r1.out);
  }

  const auto other = run_command({"estimate", "--config", path, "--seed", "43"});
  CHECK(other.code == 0);
  CHECK(other.out != r1.out);

  // --out redirects the payload to a file
  const auto redir =
      run_command({"estimate", "--config", path, "--out", "cli_estimate_out.json"});
  CHECK(redir.code == 0);
  CHECK(redir.out.empty());
  std::ifstream f("cli_estimate_out.json");
  std::string content((std::istreambuf_iterator<char>(f)),
                      std::istreambuf_iterator<char>());
  CHECK(content == r1.out);
}

TEST_CASE("estimate command error paths") {
  CHECK(run_command({"estimate", "--config", "does_not_exist.json"}).code == 2);

  std::ofstream bad("cli_bad.json", std::ios::binary);
  bad << "{ this is not json";
  bad.close();
  CHECK(run_command({"estimate", "--config", "cli_bad.json"}).code == 2);

  json small_tau = base_config();
  small_tau["schedule"]["tau"] = 2.0;
  const std::string p = write_config(small_tau, "small_tau");
  const auto r = run_command({"estimate", "--config", p});
  CHECK(r.code == 2);
  CHECK(r.err.find("tau") != std::string::npos);

  // a constant payoff realized through zero weights: stderr exactly 0
  json zero_w = base_config();
  zero_w["payoff"]["weights"] = {0.0};
  const auto rz = run_command({"estimate", "--config", write_config(zero_w, "zero_w")});
  REQUIRE(rz.code == 0);
  const json out = json::parse(rz.out);
  CHECK(out["estimate"].get<double>() == 0.0);
  CHECK(out["stderr"].get<double>() == 0.0);
}

TEST_CASE("rates command emits the frozen CSV layout") {
  json cfg = base_config();
  cfg["sweep"] = {{"tau_list", {512.0, 1024.0}}, {"repetitions", 3}};
  const std::string path = write_config(cfg, "rates");

  const auto r = run_command({"rates", "--config", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("tau,cost,abs_error,stderr,repetitions\n", 0) == 0);
  CHECK(r.out.find("# loglog_slope") != std::string::npos);
  // one row per tau plus header and comment
  int lines = 0;
  for (char c : r.out)
    if (c == '\n') ++lines;
  CHECK(lines == 4);

  const auto again = run_command({"rates", "--config", path});
  CHECK(again.out == r.out);

  // sweeps need a scheduled mode
  json manual = cfg;
  manual["schedule"] = {{"mode", "manual"},
                        {"eps", {0.5}},
                        {"h", {0.4}},
                        {"n", {4}}};
  CHECK(run_command({"rates", "--config", write_config(manual, "rates_manual")}).code == 2);

  json nosweep = base_config();
  CHECK(run_command({"rates", "--config", write_config(nosweep, "rates_nosweep")}).code ==
        2);
}

TEST_CASE("levels command emits the frozen CSV layout") {
  json cfg = base_config();
  cfg["n_probe"] = 400;
  const std::string path = write_config(cfg, "levels");
  const auto r = run_command({"levels", "--config", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("k,n,eps,h,mean,var,envelope,breakpoints\n", 0) == 0);
  const auto again = run_command({"levels", "--config", path, "--workers", "4"});
  CHECK(again.out == r.out);
}

TEST_CASE("verify passes on a healthy config and fails on broken ones") {
  json cfg = base_config();
  const auto ok = run_command({"verify", "--config", write_config(cfg, "verify_ok")});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  CHECK(ok.out.find("verify: all checks passed") != std::string::npos);

  // eps_1 > 1 violates the cost-bound precondition
  json loose = base_config();
  loose["schedule"] = {{"mode", "manual"},
                       {"eps", {2.0, 0.5}},
                       {"h", {0.8, 0.4}},
                       {"n", {4, 4}}};
  const auto bad1 = run_command({"verify", "--config", write_config(loose, "verify_eps")});
  CHECK(bad1.code == 1);
  CHECK(bad1.out.find("check schedule-preconditions: FAIL") != std::string::npos);

  // corrupting g breaks domination
  json mutated = base_config();
  mutated["model"]["measure"]["g"] = {{"coefficient", 0.4}, {"exponent", 1.5}};
  const auto bad2 =
      run_command({"verify", "--config", write_config(mutated, "verify_mut")});
  CHECK(bad2.code == 1);
  CHECK(bad2.out.find("check g-domination: FAIL") != std::string::npos);
}

TEST_CASE("verify accepts the shipped example configs") {
  const auto r = run_command(
      {"verify", "--config", std::string(LEVYMC_CONFIG_DIR) + "/constant_alpha15.json"});
  CHECK(r.code == 0);
  const auto r2 = run_command(
      {"verify", "--config", std::string(LEVYMC_CONFIG_DIR) + "/levels_alpha15.json"});
  CHECK(r2.code == 0);
}

TEST_CASE("usage errors") {
  CHECK(run_command({}).code != 0);
  CHECK(run_command({"estimate"}).code != 0);          // missing --config
  CHECK(run_command({"frobnicate", "--config", "x"}).code != 0);
}
