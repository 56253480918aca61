// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "spheredyn/commands.hpp"
#include "spheredyn/config.hpp"
#include "spheredyn/errors.hpp"
#include "spheredyn/report.hpp"

using namespace spheredyn;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("spheredyn_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

struct Run {
  ExitCode code;
  std::string out;
  std::string err;
};

Run run(const std::string& command, const fs::path& config, const fs::path& out_dir,
        bool halve = false) {
  CliOptions o;
  o.command = command;
  o.config_path = config.string();
  o.out_dir = out_dir.string();
  o.debug_halve_bound = halve;
  std::ostringstream out, err;
  const auto code = run_command(o, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

ErrorCode config_code(const std::string& text) {
  try {
    validate_config(parse_config(text));
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::invalid_argument;
}

// Small sizes so the full suite runs in well under a second.
constexpr const char* kSmallSizes = R"("sizes": {"haar_draws": 2000, "drift_draws": 2000,
  "beta_samples": 5000, "phase_samples": 2000, "phase_steps": 1000,
  "theorem2_trajectories": 200, "theorem2_steps": 100, "burnin_cap": 100000,
  "time_average_steps": 100000, "order_draws": 5000, "lemma_samples": 500,
  "annulus_steps": 10000, "reach_pairs": 10, "coverage_steps": 1000000, "coverage_cells": 50})";

}  // namespace

TEST_CASE("shortest round-trip doubles") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  for (double x : {1.0 / 3.0, 2.0 / 7.0, 6.02214076e23, 5e-324}) {
    const auto text = format_double(x);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == x);
  }
}

TEST_CASE("config round trip") {
  const ExperimentConfig defaults;
  CHECK(parse_config(serialize_config(defaults)) == defaults);
  CHECK(parse_config("{}") == defaults);

  ExperimentConfig c;
  c.model.kappas = {1.3, 1.2, 1.1, 1.05, 1, 1};
  c.model.lambda = 0.1 + 0.2;
  c.model.radial_law = {"discrete", 1.0, {0.25, 1.0}, {1.0, 3.0}};
  c.run.variant = "interleaved";
  c.run.interleave_tail = 7;
  c.run.v0 = std::vector<double>{1, 2, 3, 4, 5, 6};
  c.run.burnin = {"adaptive", 5000, 20};
  c.run.master_seed = 18446744073709551615ull;
  c.check.select = std::vector<std::string>{"beta_law", "reachability"};
  c.check.settings.theorem2_lambdas = {0.05, 0.25};
  c.check.settings.haar_partitions = {Partition(1, 2, 3)};
  c.output.formats = {"jsonl"};
  const std::string text = serialize_config(c);
  const auto back = parse_config(text);
  CHECK(back == c);
  CHECK(serialize_config(back) == text);
  validate_config(back);
}

TEST_CASE("config rejects unknown keys and bad values") {
  CHECK(config_code(R"({"modle": {}})") == ErrorCode::config_error);
  CHECK(config_code(R"({"model": {"kappa": [1]}})") == ErrorCode::config_error);
  CHECK(config_code(R"({"run": {"burnin": {"kind": "none", "extra": 1}}})") ==
        ErrorCode::config_error);
  CHECK(config_code(R"({"check": {"sizes": {"haar_drawz": 5}}})") == ErrorCode::config_error);
  CHECK(config_code(R"({"output": {"dir": "x"}})") == ErrorCode::config_error);
  CHECK(config_code(R"({"model": {"lambda": "0.1"}})") == ErrorCode::config_error);
  CHECK(config_code(R"({"run": {"n_steps": -3}})") == ErrorCode::config_error);
  CHECK(config_code("{not json") == ErrorCode::config_error);
  // Module preconditions surface as config errors.
  CHECK(config_code(R"({"model": {"partition": [2, 2, 1]}})") == ErrorCode::config_error);
  CHECK(config_code(R"({"model": {"lambda": 1.5}})") == ErrorCode::config_error);
  CHECK(config_code(R"({"run": {"variant": "sideways"}})") == ErrorCode::config_error);
  CHECK(config_code(R"({"run": {"variant": "interleaved"}})") == ErrorCode::config_error);
  CHECK(config_code(R"({"run": {"v0": [1, 0]}})") == ErrorCode::config_error);
  CHECK(config_code(R"({"check": {"select": ["no_such_check"]}})") == ErrorCode::config_error);
  CHECK(config_code(R"({"output": {"formats": ["xml"]}})") == ErrorCode::config_error);
  CHECK(config_code(R"({"model": {"radial_law": {"kind": "gamma"}}})") == ErrorCode::config_error);
}

TEST_CASE("simulate writes fixed columns and replays byte for byte") {
  const auto dir = scratch_dir("simulate");
  const auto cfg = write_config(dir, R"({"model": {"lambda": 0.1},
    "run": {"n_steps": 200, "m_trajectories": 5, "record_every": 20, "v0": [1,0,0,0,0,0]}})");
  const auto a = run("simulate", cfg, dir / "a");
  const auto b = run("simulate", cfg, dir / "b");
  REQUIRE(a.code == ExitCode::ok);
  REQUIRE(b.code == ExitCode::ok);
  const auto traj = read_file(dir / "a" / "trajectories.csv");
  CHECK(traj.rfind("step,trajectory_id,a2,b2,c2,z\n", 0) == 0);
  CHECK(line_count(traj) == 1 + 5 * 11);
  CHECK(traj == read_file(dir / "b" / "trajectories.csv"));
  const auto summary = read_file(dir / "a" / "summary.csv");
  CHECK(summary.rfind("N,mean_a2,stderr_a2,theorem2_rhs\n", 0) == 0);
  CHECK(summary.find(",0.6\n") != std::string::npos);
  CHECK(summary == read_file(dir / "b" / "summary.csv"));
}

TEST_CASE("simulate: deterministic limit and isotropic mean") {
  const auto dir = scratch_dir("simulate_limits");
  // lambda = 0 with a kappa gap: c2 increases to 1.
  const auto cfg = write_config(dir, R"({"model": {"kappas": [2,2,1,1,1,1], "lambda": 0.0},
    "run": {"n_steps": 60, "m_trajectories": 2, "record_every": 1, "v0": [1,1,1,1,1,1]},
    "output": {"formats": ["csv"]}})");
  REQUIRE(run("simulate", cfg, dir / "det").code == ExitCode::ok);
  std::istringstream rows(read_file(dir / "det" / "trajectories.csv"));
  std::string line;
  std::getline(rows, line);
  double prev = -1.0;
  double last = 0.0;
  while (std::getline(rows, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f[0] == "0") prev = -1.0;
    const double c2 = std::stod(f[4]);
    CHECK(c2 >= prev);
    prev = last = c2;
  }
  CHECK(last > 1.0 - 1e-9);

  const auto iso = write_config(dir, R"({"model": {"lambda": 0.25},
    "run": {"variant": "isotropic", "n_steps": 400, "m_trajectories": 2000, "record_every": 400},
    "output": {"formats": ["jsonl"]}})");
  REQUIRE(run("simulate", iso, dir / "iso").code == ExitCode::ok);
  std::istringstream lines(read_file(dir / "iso" / "summary.jsonl"));
  std::string first, final_line;
  std::getline(lines, first);
  std::getline(lines, final_line);
  CHECK(final_line.find("\"theorem2_rhs\":null") != std::string::npos);
  const auto pos = final_line.find("\"mean_a2\":") + 10;
  const double mean = std::stod(final_line.substr(pos));
  CHECK(std::fabs(mean - 1.0 / 3.0) < 0.03);
}

TEST_CASE("verify") {
  const auto dir = scratch_dir("verify");
  const auto empty = write_config(dir, R"({"check": {"select": []}})");
  const auto none = run("verify", empty, dir / "empty");
  CHECK(none.code == ExitCode::ok);
  CHECK(read_file(dir / "empty" / "report.jsonl").empty());

  const auto full = write_config(dir, std::string(R"({"check": {)") + kSmallSizes + "}}");
  const auto all = run("verify", full, dir / "full");
  CHECK(all.code == ExitCode::ok);
  const auto report = read_file(dir / "full" / "report.jsonl");
  CHECK(line_count(report) == check_ids().size());
  CHECK(report.find("\"status\":\"fail\"") == std::string::npos);
  for (const char* key : {"check_id", "paper_anchor", "status", "measured", "bound", "tolerance",
                          "n_samples", "seed"}) {
    CHECK(report.find(std::string("\"") + key + "\":") != std::string::npos);
  }
  CHECK(run("verify", full, dir / "again").code == ExitCode::ok);
  CHECK(read_file(dir / "again" / "report.jsonl") == report);

  // A bound far below the measured mean must trip the check.
  const auto wrong = write_config(dir, std::string(R"({"check": {"select": ["theorem2_bound"],
    "bound_scale": 0.002, )") + kSmallSizes + "}}");
  const auto tripped = run("verify", wrong, dir / "wrong", true);
  CHECK(tripped.code == ExitCode::fail);
  CHECK(read_file(dir / "wrong" / "report.jsonl").find("\"bound\":0.0006") != std::string::npos);

  // Burn-in cap too small for the adaptive rule: inconclusive.
  const auto capped = write_config(dir, R"({"check": {"select": ["time_average_bound"],
    "sizes": {"burnin_cap": 10, "time_average_steps": 1000}}})");
  CHECK(run("verify", capped, dir / "capped").code == ExitCode::inconclusive);

  const auto hyp = write_config(dir, R"({"model": {"lambda": 0.3},
    "check": {"select": ["theorem2_bound"]}})");
  const auto h = run("verify", hyp, dir / "hyp");
  CHECK(h.code == ExitCode::hypothesis);
  CHECK(h.err.find("\"error\":\"HypothesisViolated\"") != std::string::npos);
}

TEST_CASE("named test subcommands") {
  const auto dir = scratch_dir("named");
  const auto cfg = write_config(dir, std::string(R"({"check": {)") + kSmallSizes + "}}");
  CHECK(run("haar-test", cfg, dir).code == ExitCode::ok);
  CHECK(line_count(read_file(dir / "haar_test.jsonl")) == 2);
  CHECK(run("beta-test", cfg, dir).code == ExitCode::ok);
  CHECK(line_count(read_file(dir / "beta_test.jsonl")) == 3);
  CHECK(run("order-test", cfg, dir).code == ExitCode::ok);
  CHECK(line_count(read_file(dir / "order_test.jsonl")) == 2);
}

TEST_CASE("reach") {
  const auto dir = scratch_dir("reach");
  const auto same = write_config(dir, R"({"model": {"kappas": [1.1,1,1,1,1,1], "lambda": 0.25},
    "run": {"source": [0,0,0,0,0,1], "target": [0,0,0,0,0,1]}})");
  CHECK(run("reach", same, dir / "same").code == ExitCode::ok);
  CHECK(read_file(dir / "same" / "path.jsonl") == "{\"residual_norm\":0.0}\n");

  const auto climb = write_config(dir, R"({"model": {"kappas": [1.1,1,1,1,1,1], "lambda": 0.25},
    "run": {"source": [0,0,0,0,0,1], "target": [0,0,0,0,1,0]}})");
  CHECK(run("reach", climb, dir / "climb").code == ExitCode::ok);
  const auto path = read_file(dir / "climb" / "path.jsonl");
  CHECK(line_count(path) == 7 + 2 + 1);
  CHECK(path.find("{\"n\":1,\"s\":1.0,\"u_matrix\":[") == 0);
  const auto tail = path.substr(path.rfind("{\"residual_norm\":"));
  CHECK(std::stod(tail.substr(17)) < 1e-8);

  const auto small = write_config(dir, R"({"model": {"kappas": [1.1,1,1,1,1,1], "lambda": 0.05},
    "run": {"source": [0,0,0,0,0,1], "target": [0,0,0,0,1,0]}})");
  const auto h = run("reach", small, dir / "small");
  CHECK(h.code == ExitCode::hypothesis);
  CHECK(h.err.find("\"error\":\"HypothesisViolated\"") != std::string::npos);

  const auto missing = write_config(dir, R"({"run": {"source": [0,0,0,0,0,1]}})");
  CHECK(run("reach", missing, dir / "missing").code == ExitCode::config);
}

TEST_CASE("support-scan") {
  const auto dir = scratch_dir("scan");
  const auto ann = write_config(dir, R"({"model": {"kappas": [2,1,1,1,1,1], "lambda": 0.015625},
    "run": {"n_steps": 20000, "scan": {"mode": "annulus", "bins": 10}}})");
  CHECK(run("support-scan", ann, dir / "ann").code == ExitCode::ok);
  const auto line = read_file(dir / "ann" / "support_scan.jsonl");
  CHECK(line.find("\"violations\":0") != std::string::npos);

  const auto cov = write_config(dir, R"({"model": {"kappas": [1,1,1,1,1,1], "lambda": 0.25},
    "run": {"n_steps": 1000000, "scan": {"mode": "coverage", "n_cells": 30}}})");
  CHECK(run("support-scan", cov, dir / "cov").code == ExitCode::ok);
  const auto short_cov = write_config(dir, R"({"model": {"kappas": [1,1,1,1,1,1], "lambda": 0.25},
    "run": {"n_steps": 1, "scan": {"mode": "coverage", "n_cells": 30}}})");
  CHECK(run("support-scan", short_cov, dir / "short").code == ExitCode::fail);
  const auto gap = write_config(dir, R"({"model": {"lambda": 0.25},
    "run": {"scan": {"mode": "coverage"}}})");
  CHECK(run("support-scan", gap, dir / "gap").code == ExitCode::hypothesis);

  const auto atom = write_config(dir, R"({"model": {"kappas": [1,1,1,1,1,1], "lambda": 0.2},
    "run": {"n_steps": 50, "m_trajectories": 2000, "scan": {"mode": "atom"}}})");
  CHECK(run("support-scan", atom, dir / "atom").code == ExitCode::ok);
}

TEST_CASE("command line parsing") {
  const auto dir = scratch_dir("argv");
  const auto cfg = write_config(dir, R"({"check": {"select": []}})");
  const std::string cfg_s = cfg.string();
  const std::string out_s = (dir / "o").string();
  std::ostringstream out, err;
  const char* ok_argv[] = {"spheredyn", "verify", "--config", cfg_s.c_str(), "--seed", "7",
                           "--workers", "2", "--out", out_s.c_str()};
  CHECK(cli_main(10, ok_argv, out, err) == 0);
  CHECK(fs::exists(dir / "o" / "report.jsonl"));
  const char* no_config[] = {"spheredyn", "verify"};
  CHECK(cli_main(2, no_config, out, err) == 2);
  const char* bad_cmd[] = {"spheredyn", "explode", "--config", cfg_s.c_str()};
  CHECK(cli_main(4, bad_cmd, out, err) == 2);
  const char* missing_file[] = {"spheredyn", "simulate", "--config", "/nonexistent.json"};
  CHECK(cli_main(4, missing_file, out, err) == 2);
}
