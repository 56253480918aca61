// SPDX-License-Identifier: Apache-2.0
#include "spheredyn/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "spheredyn/checks.hpp"
#include "spheredyn/config.hpp"
#include "spheredyn/errors.hpp"
#include "spheredyn/reachability.hpp"
#include "spheredyn/report.hpp"
#include "spheredyn/statistics.hpp"
#include "spheredyn/support_scan.hpp"

namespace spheredyn {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Context {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  fs::path out_dir;
  bool debug_halve_bound = false;
  std::ostream* out = nullptr;
};

std::ofstream open_output(const Context& ctx, const std::string& name) {
  fs::create_directories(ctx.out_dir);
  const fs::path path = ctx.out_dir / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::invalid_argument, "cannot write '" + path.string() + "'");
  *ctx.out << path.string() << '\n';
  return f;
}

bool wants(const Context& ctx, const std::string& format) {
  const auto& f = ctx.config.output.formats;
  return std::find(f.begin(), f.end(), format) != f.end();
}

ExitCode verdict(const std::vector<CheckResult>& results) {
  bool inconclusive = false;
  for (const auto& r : results) {
    if (r.status == CheckStatus::fail) return ExitCode::fail;
    if (r.status == CheckStatus::inconclusive) inconclusive = true;
  }
  return inconclusive ? ExitCode::inconclusive : ExitCode::ok;
}

ExitCode cmd_simulate(const Context& ctx) {
  const auto& run = ctx.config.run;
  const DiagonalModel m = build_model(ctx.config.model);
  EnsembleSpec spec{m,
                    build_variant(run),
                    build_vector(run.v0),
                    run.n_steps,
                    run.m_trajectories,
                    run.record_every,
                    build_burnin(run.burnin),
                    0};
  const auto res = run_ensemble(spec, ctx.seed, ctx.workers);
  std::optional<double> rhs;
  if (run.variant == "hyperbolic") {
    try {
      rhs = theorem2_rhs(m);
    } catch (const Error&) {
      rhs.reset();
    }
  }
  if (wants(ctx, "csv")) {
    auto traj = open_output(ctx, "trajectories.csv");
    write_trajectory_csv(traj, res);
    auto summary = open_output(ctx, "summary.csv");
    write_summary_csv(summary, res, rhs);
  }
  if (wants(ctx, "jsonl")) {
    auto f = open_output(ctx, "summary.jsonl");
    std::vector<double> column(res.m_trajectories);
    for (std::size_t k = 0; k < res.records(); ++k) {
      for (std::size_t t = 0; t < res.m_trajectories; ++t) column[t] = res.at(res.a2, k, t);
      const Summary s = summarize(column);
      json j{{"N", res.grid[k]},
             {"mean_a2", s.mean},
             {"stderr_a2", s.std_error},
             {"theorem2_rhs", rhs ? json(*rhs) : json(nullptr)}};
      f << j.dump() << '\n';
    }
  }
  return res.burnin_converged ? ExitCode::ok : ExitCode::inconclusive;
}

ExitCode run_check_list(const Context& ctx, const std::vector<std::string>& ids,
                        const std::string& file) {
  const DiagonalModel m = build_model(ctx.config.model);
  CheckSettings s = ctx.config.check.settings;
  s.workers = ctx.workers;
  if (ctx.debug_halve_bound) s.bound_scale *= 0.5;
  auto f = open_output(ctx, file);
  std::vector<CheckResult> all;
  for (const auto& id : ids) {
    // Lines are flushed per check so a later hypothesis error keeps earlier results.
    auto results = run_checks(m, {id}, s, ctx.seed);
    write_check_report(f, results);
    f.flush();
    all.insert(all.end(), results.begin(), results.end());
  }
  return verdict(all);
}

ExitCode cmd_verify(const Context& ctx) {
  const auto& sel = ctx.config.check.select;
  return run_check_list(ctx, sel ? *sel : check_ids(), "report.jsonl");
}

ExitCode cmd_reach(const Context& ctx) {
  const auto& run = ctx.config.run;
  if (!run.source || !run.target) {
    throw Error(ErrorCode::config_error, "run.source and run.target are required for reach");
  }
  const DiagonalModel m = build_model(ctx.config.model);
  const auto path = plan_path(m, *build_vector(run.source), *build_vector(run.target));
  const double residual = path_residual(m, path);
  auto f = open_output(ctx, "path.jsonl");
  write_path_file(f, path, residual);
  return residual < 1e-6 ? ExitCode::ok : ExitCode::fail;
}

ExitCode cmd_support_scan(const Context& ctx) {
  const auto& run = ctx.config.run;
  const auto& sc = run.scan;
  const DiagonalModel m = build_model(ctx.config.model);
  if (sc.mode == "annulus") {
    AnnulusScanSpec spec;
    spec.channel = sc.channel;
    spec.n_steps = run.n_steps;
    spec.max_burnin = sc.max_burnin;
    spec.bins = sc.bins;
    spec.v0 = build_vector(run.v0);
    const auto rep = annulus_scan(m, spec, ctx.seed);
    auto f = open_output(ctx, "support_scan.jsonl");
    f << occupancy_json_line(rep) << '\n';
    if (!rep.burnin_converged) return ExitCode::inconclusive;
    return rep.violations == 0 ? ExitCode::ok : ExitCode::fail;
  }
  if (sc.mode == "coverage") {
    CoverageScanSpec spec;
    spec.n_steps = run.n_steps;
    spec.n_cells = sc.n_cells;
    spec.cap_radius = sc.cap_radius;
    spec.v0 = build_vector(run.v0);
    const auto rep = coverage_scan(m, spec, ctx.seed);
    auto f = open_output(ctx, "support_scan.jsonl");
    f << coverage_json_line(rep) << '\n';
    return rep.visited == rep.n_cells ? ExitCode::ok : ExitCode::fail;
  }
  if (m.radial_law().prob_zero() > 0.0) {
    throw Error(ErrorCode::hypothesis_violated, "atom check needs P(r = 0) = 0");
  }
  const auto samples = sample_final_states(m, build_vector(run.v0), run.n_steps,
                                           run.m_trajectories, ctx.seed, 0, ctx.workers);
  const auto rep = atom_check(samples, sc.atom_mass);
  auto f = open_output(ctx, "support_scan.jsonl");
  f << atom_json_line(rep, sc.atom_max_mass) << '\n';
  return rep.max_cluster_mass < sc.atom_max_mass ? ExitCode::ok : ExitCode::fail;
}

void report_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << json{{"error", std::string(code)}, {"message", message}}.dump() << '\n';
}

}  // namespace

std::size_t default_workers() {
  if (const char* env = std::getenv("SPHEREDYN_WORKERS")) {
    char* end = nullptr;
    const unsigned long long n = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
  }
  return 1;
}

ExitCode run_command(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, std::function<ExitCode(const Context&)>> table{
      {"simulate", cmd_simulate},
      {"verify", cmd_verify},
      {"reach", cmd_reach},
      {"support-scan", cmd_support_scan},
      {"haar-test",
       [](const Context& c) {
         return run_check_list(c, {"haar_moments", "drift_bound"}, "haar_test.jsonl");
       }},
      {"beta-test",
       [](const Context& c) {
         return run_check_list(c, {"beta_law", "random_phase_one_step", "random_phase_mixing"},
                               "beta_test.jsonl");
       }},
      {"order-test", [](const Context& c) {
         return run_check_list(c, {"stochastic_order", "stochastic_order_interleaved"},
                               "order_test.jsonl");
       }}};

  const auto cmd = table.find(opts.command);
  if (cmd == table.end()) {
    report_error(err, "ConfigError", "unknown subcommand '" + opts.command + "'");
    return ExitCode::config;
  }
  Context ctx;
  try {
    ctx.config = load_config(opts.config_path);
    validate_config(ctx.config);
  } catch (const Error& e) {
    report_error(err, to_string(e.code()), e.what());
    return ExitCode::config;
  }
  ctx.seed = opts.seed.value_or(ctx.config.run.master_seed);
  ctx.workers = opts.workers.value_or(default_workers());
  if (ctx.workers == 0) {
    report_error(err, "ConfigError", "--workers must be >= 1");
    return ExitCode::config;
  }
  ctx.out_dir = opts.out_dir.value_or(ctx.config.output.directory);
  ctx.debug_halve_bound = opts.debug_halve_bound;
  ctx.out = &out;

  try {
    return cmd->second(ctx);
  } catch (const Error& e) {
    report_error(err, to_string(e.code()), e.what());
    if (e.code() == ErrorCode::hypothesis_violated) return ExitCode::hypothesis;
    if (e.code() == ErrorCode::config_error) return ExitCode::config;
    return ExitCode::fail;
  } catch (const std::exception& e) {
    report_error(err, "RuntimeError", e.what());
    return ExitCode::fail;
  }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random dynamics on the sphere: simulation and verification"};
  app.require_subcommand(1);
  CliOptions opts;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "Run an ensemble and write trajectory and summary CSV files"},
      {"verify", "Run the selected checks and write a JSON-lines report"},
      {"reach", "Plan a steering path from run.source to run.target"},
      {"support-scan", "Annulus, coverage or atom scan of the hyperbolic chain"},
      {"haar-test", "Haar moment and drift checks"},
      {"beta-test", "Beta law and random phase checks"},
      {"order-test", "Stochastic order checks"}};
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::string out_dir;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "Experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "Master seed; overrides run.master_seed");
    sub->add_option("--workers", workers, "Worker threads (default: SPHEREDYN_WORKERS or 1)");
    sub->add_option("--out", out_dir, "Output directory; overrides output.directory");
    sub->add_flag("--debug-halve-bound", opts.debug_halve_bound,
                  "Halve the mean-value bounds (harness self-test)");
    sub->callback([&opts, name = name] { opts.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    report_error(err, "ConfigError", e.what());
    return static_cast<int>(ExitCode::config);
  }
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) opts.seed = seed;
    if (sub->count("--workers") > 0) opts.workers = workers;
    if (sub->count("--out") > 0) opts.out_dir = out_dir;
  }
  return static_cast<int>(run_command(opts, out, err));
}

}  // namespace spheredyn
