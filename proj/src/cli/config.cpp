// SPDX-License-Identifier: Apache-2.0
#include "spheredyn/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "spheredyn/errors.hpp"
#include "spheredyn/radial_law.hpp"

namespace spheredyn {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorCode::config_error, msg);
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) config_error(path + ": expected an object");
  return j;
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      config_error(path + ": unknown key '" + item.key() + "'");
    }
  }
}

double read_real(const json& j, const std::string& path) {
  if (!j.is_number()) config_error(path + ": expected a number");
  return j.get<double>();
}

std::uint64_t read_u64(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  config_error(path + ": expected a non-negative integer");
}

std::size_t read_count(const json& j, const std::string& path) {
  return static_cast<std::size_t>(read_u64(j, path));
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) config_error(path + ": expected a string");
  return j.get<std::string>();
}

template <class F>
auto read_array(const json& j, const std::string& path, F&& each) {
  if (!j.is_array()) config_error(path + ": expected an array");
  std::vector<decltype(each(j, path))> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(each(j[k], path + "[" + std::to_string(k) + "]"));
  }
  return out;
}

std::vector<double> read_reals(const json& j, const std::string& path) {
  return read_array(j, path, read_real);
}

// Assigns `field` from j[key] when present.
template <class T, class F>
void maybe(const json& j, const char* key, const std::string& path, T& field, F&& read) {
  if (j.contains(key)) field = read(j.at(key), path + "." + key);
}

RadialLawConfig parse_radial(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"kind", "p", "support", "weights"});
  RadialLawConfig c;
  maybe(j, "kind", path, c.kind, read_string);
  maybe(j, "p", path, c.p, read_real);
  maybe(j, "support", path, c.support, read_reals);
  maybe(j, "weights", path, c.weights, read_reals);
  return c;
}

ModelConfig parse_model(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"kappas", "partition", "lambda", "radial_law"});
  ModelConfig c;
  maybe(j, "kappas", path, c.kappas, read_reals);
  if (j.contains("partition")) {
    const auto parts = read_array(j.at("partition"), path + ".partition", read_count);
    if (parts.size() != 3) config_error(path + ".partition: expected [L_a, L_b, L_c]");
    c.partition = {parts[0], parts[1], parts[2]};
  }
  maybe(j, "lambda", path, c.lambda, read_real);
  maybe(j, "radial_law", path, c.radial_law, parse_radial);
  return c;
}

BurninConfig parse_burnin(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"kind", "steps", "window"});
  BurninConfig c;
  maybe(j, "kind", path, c.kind, read_string);
  maybe(j, "steps", path, c.steps, read_count);
  maybe(j, "window", path, c.window, read_count);
  return c;
}

ScanConfig parse_scan(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"mode", "channel", "max_burnin", "bins", "n_cells", "cap_radius",
                           "atom_mass", "atom_max_mass"});
  ScanConfig c;
  maybe(j, "mode", path, c.mode, read_string);
  maybe(j, "channel", path, c.channel, read_count);
  maybe(j, "max_burnin", path, c.max_burnin, read_count);
  maybe(j, "bins", path, c.bins, read_count);
  maybe(j, "n_cells", path, c.n_cells, read_count);
  maybe(j, "cap_radius", path, c.cap_radius, read_real);
  maybe(j, "atom_mass", path, c.atom_mass, read_real);
  maybe(j, "atom_max_mass", path, c.atom_max_mass, read_real);
  return c;
}

std::optional<std::vector<double>> read_optional_reals(const json& j, const std::string& path) {
  if (j.is_null()) return std::nullopt;
  return read_reals(j, path);
}

RunConfig parse_run(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"variant", "interleave_tail", "n_steps", "m_trajectories",
                           "record_every", "burnin", "master_seed", "v0", "source", "target",
                           "scan"});
  RunConfig c;
  maybe(j, "variant", path, c.variant, read_string);
  maybe(j, "interleave_tail", path, c.interleave_tail, read_count);
  maybe(j, "n_steps", path, c.n_steps, read_count);
  maybe(j, "m_trajectories", path, c.m_trajectories, read_count);
  maybe(j, "record_every", path, c.record_every, read_count);
  maybe(j, "burnin", path, c.burnin, parse_burnin);
  maybe(j, "master_seed", path, c.master_seed, read_u64);
  maybe(j, "v0", path, c.v0, read_optional_reals);
  maybe(j, "source", path, c.source, read_optional_reals);
  maybe(j, "target", path, c.target, read_optional_reals);
  maybe(j, "scan", path, c.scan, parse_scan);
  return c;
}

Partition read_partition(const json& j, const std::string& path) {
  const auto parts = read_array(j, path, read_count);
  if (parts.size() != 3) config_error(path + ": expected [L_a, L_b, L_c]");
  try {
    return Partition(parts[0], parts[1], parts[2]);
  } catch (const Error& e) {
    config_error(path + ": " + e.what());
  }
}

CheckSettings parse_sizes(const json& j, const std::string& path, CheckSettings s) {
  require_object(j, path);
  reject_unknown(j, path,
                 {"haar_vectors", "haar_draws", "haar_partitions", "drift_draws",
                  "beta_samples", "phase_samples", "phase_steps", "theorem2_lambdas",
                  "theorem2_trajectories", "theorem2_steps", "burnin_cap", "time_average_steps",
                  "order_draws", "order_prefix", "order_tail", "lemma_samples", "lemma_set_size",
                  "annulus_steps", "annulus_max_burnin", "reach_pairs", "coverage_steps",
                  "coverage_cells", "coverage_radius"});
  maybe(j, "haar_vectors", path, s.haar_vectors, read_count);
  maybe(j, "haar_draws", path, s.haar_draws, read_count);
  if (j.contains("haar_partitions")) {
    s.haar_partitions = read_array(j.at("haar_partitions"), path + ".haar_partitions",
                                   read_partition);
  }
  maybe(j, "drift_draws", path, s.drift_draws, read_count);
  maybe(j, "beta_samples", path, s.beta_samples, read_count);
  maybe(j, "phase_samples", path, s.phase_samples, read_count);
  maybe(j, "phase_steps", path, s.phase_steps, read_count);
  maybe(j, "theorem2_lambdas", path, s.theorem2_lambdas, read_reals);
  maybe(j, "theorem2_trajectories", path, s.theorem2_trajectories, read_count);
  maybe(j, "theorem2_steps", path, s.theorem2_steps, read_count);
  maybe(j, "burnin_cap", path, s.burnin_cap, read_count);
  maybe(j, "time_average_steps", path, s.time_average_steps, read_count);
  maybe(j, "order_draws", path, s.order_draws, read_count);
  maybe(j, "order_prefix", path, s.order_prefix, read_count);
  maybe(j, "order_tail", path, s.order_tail, read_count);
  maybe(j, "lemma_samples", path, s.lemma_samples, read_count);
  maybe(j, "lemma_set_size", path, s.lemma_set_size, read_count);
  maybe(j, "annulus_steps", path, s.annulus_steps, read_count);
  maybe(j, "annulus_max_burnin", path, s.annulus_max_burnin, read_count);
  maybe(j, "reach_pairs", path, s.reach_pairs, read_count);
  maybe(j, "coverage_steps", path, s.coverage_steps, read_count);
  maybe(j, "coverage_cells", path, s.coverage_cells, read_count);
  maybe(j, "coverage_radius", path, s.coverage_radius, read_real);
  return s;
}

CheckConfig parse_check(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"select", "n_sigma", "confidence", "bound_scale", "sizes"});
  CheckConfig c;
  if (j.contains("select") && !j.at("select").is_null()) {
    c.select = read_array(j.at("select"), path + ".select", read_string);
  }
  maybe(j, "n_sigma", path, c.settings.n_sigma, read_real);
  maybe(j, "confidence", path, c.settings.confidence, read_real);
  maybe(j, "bound_scale", path, c.settings.bound_scale, read_real);
  if (j.contains("sizes")) c.settings = parse_sizes(j.at("sizes"), path + ".sizes", c.settings);
  return c;
}

OutputConfig parse_output(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"directory", "formats"});
  OutputConfig c;
  maybe(j, "directory", path, c.directory, read_string);
  if (j.contains("formats")) {
    c.formats = read_array(j.at("formats"), path + ".formats", read_string);
  }
  return c;
}

json optional_reals(const std::optional<std::vector<double>>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  require_object(root, "config");
  reject_unknown(root, "config", {"model", "run", "check", "output"});
  ExperimentConfig c;
  maybe(root, "model", "config", c.model, parse_model);
  maybe(root, "run", "config", c.run, parse_run);
  maybe(root, "check", "config", c.check, parse_check);
  maybe(root, "output", "config", c.output, parse_output);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  const auto& m = c.model;
  j["model"] = {{"kappas", m.kappas},
                {"partition", m.partition},
                {"lambda", m.lambda},
                {"radial_law",
                 {{"kind", m.radial_law.kind},
                  {"p", m.radial_law.p},
                  {"support", m.radial_law.support},
                  {"weights", m.radial_law.weights}}}};
  const auto& r = c.run;
  const auto& sc = r.scan;
  j["run"] = {{"variant", r.variant},
              {"interleave_tail", r.interleave_tail},
              {"n_steps", r.n_steps},
              {"m_trajectories", r.m_trajectories},
              {"record_every", r.record_every},
              {"burnin",
               {{"kind", r.burnin.kind}, {"steps", r.burnin.steps}, {"window", r.burnin.window}}},
              {"master_seed", r.master_seed},
              {"v0", optional_reals(r.v0)},
              {"source", optional_reals(r.source)},
              {"target", optional_reals(r.target)},
              {"scan",
               {{"mode", sc.mode},
                {"channel", sc.channel},
                {"max_burnin", sc.max_burnin},
                {"bins", sc.bins},
                {"n_cells", sc.n_cells},
                {"cap_radius", sc.cap_radius},
                {"atom_mass", sc.atom_mass},
                {"atom_max_mass", sc.atom_max_mass}}}};
  const auto& s = c.check.settings;
  json partitions = json::array();
  for (const auto& p : s.haar_partitions) partitions.push_back({p.l_a(), p.l_b(), p.l_c()});
  j["check"] = {{"select", c.check.select ? json(*c.check.select) : json(nullptr)},
                {"n_sigma", s.n_sigma},
                {"confidence", s.confidence},
                {"bound_scale", s.bound_scale},
                {"sizes",
                 {{"haar_vectors", s.haar_vectors},
                  {"haar_draws", s.haar_draws},
                  {"haar_partitions", partitions},
                  {"drift_draws", s.drift_draws},
                  {"beta_samples", s.beta_samples},
                  {"phase_samples", s.phase_samples},
                  {"phase_steps", s.phase_steps},
                  {"theorem2_lambdas", s.theorem2_lambdas},
                  {"theorem2_trajectories", s.theorem2_trajectories},
                  {"theorem2_steps", s.theorem2_steps},
                  {"burnin_cap", s.burnin_cap},
                  {"time_average_steps", s.time_average_steps},
                  {"order_draws", s.order_draws},
                  {"order_prefix", s.order_prefix},
                  {"order_tail", s.order_tail},
                  {"lemma_samples", s.lemma_samples},
                  {"lemma_set_size", s.lemma_set_size},
                  {"annulus_steps", s.annulus_steps},
                  {"annulus_max_burnin", s.annulus_max_burnin},
                  {"reach_pairs", s.reach_pairs},
                  {"coverage_steps", s.coverage_steps},
                  {"coverage_cells", s.coverage_cells},
                  {"coverage_radius", s.coverage_radius}}}};
  j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
  return j.dump(2) + "\n";
}

DiagonalModel build_model(const ModelConfig& c) {
  const auto& rl = c.radial_law;
  RadialLaw law = RadialLaw::constant_one();
  if (rl.kind == "constant_one") {
    law = RadialLaw::constant_one();
  } else if (rl.kind == "uniform01") {
    law = RadialLaw::uniform01();
  } else if (rl.kind == "bernoulli") {
    law = RadialLaw::bernoulli(rl.p);
  } else if (rl.kind == "discrete") {
    law = RadialLaw::discrete(rl.support, rl.weights);
  } else {
    config_error("model.radial_law.kind: unknown law '" + rl.kind + "'");
  }
  return DiagonalModel(c.kappas, Partition(c.partition[0], c.partition[1], c.partition[2]),
                       c.lambda, law);
}

ChainVariant build_variant(const RunConfig& c) {
  if (c.variant == "hyperbolic") return ChainVariant::hyperbolic();
  if (c.variant == "isotropic") return ChainVariant::isotropic();
  if (c.variant == "interleaved") return ChainVariant::interleaved(c.interleave_tail);
  config_error("run.variant: unknown variant '" + c.variant + "'");
}

BurninPolicy build_burnin(const BurninConfig& c) {
  if (c.kind == "none") return BurninPolicy::none();
  if (c.kind == "fixed") return BurninPolicy::fixed(c.steps);
  if (c.kind == "adaptive") return BurninPolicy::adaptive(c.steps, c.window);
  config_error("run.burnin.kind: unknown policy '" + c.kind + "'");
}

std::optional<SphereVector> build_vector(const std::optional<std::vector<double>>& coords) {
  if (!coords) return std::nullopt;
  Vector v(static_cast<Eigen::Index>(coords->size()));
  for (std::size_t k = 0; k < coords->size(); ++k) v[static_cast<Eigen::Index>(k)] = (*coords)[k];
  return SphereVector(v);
}

void validate_config(const ExperimentConfig& c) {
  // Module errors become config errors that name the block.
  auto guard = [](const std::string& where, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::config_error) throw;
      config_error(where + ": " + e.what());
    }
  };
  std::optional<DiagonalModel> m;
  guard("model", [&] { m.emplace(build_model(c.model)); });
  guard("run", [&] {
    build_variant(c.run);
    build_burnin(c.run.burnin);
  });
  const auto& r = c.run;
  if (r.n_steps == 0) config_error("run.n_steps: must be >= 1");
  if (r.m_trajectories == 0) config_error("run.m_trajectories: must be >= 1");
  if (r.record_every == 0) config_error("run.record_every: must be >= 1");
  if (r.burnin.kind == "adaptive" && r.burnin.window == 0) {
    config_error("run.burnin.window: must be >= 1");
  }
  for (const auto& [key, vec] : {std::pair{"v0", &r.v0}, std::pair{"source", &r.source},
                                 std::pair{"target", &r.target}}) {
    if (!*vec) continue;
    if (vec->value().size() != m->dim()) {
      config_error(std::string("run.") + key + ": expected " + std::to_string(m->dim()) +
                   " coordinates");
    }
    guard(std::string("run.") + key, [&] { build_vector(*vec); });
  }
  const auto& sc = r.scan;
  if (sc.mode != "annulus" && sc.mode != "coverage" && sc.mode != "atom") {
    config_error("run.scan.mode: unknown mode '" + sc.mode + "'");
  }
  if (sc.channel < 1 || sc.channel > m->sphere_dim()) {
    config_error("run.scan.channel: must lie in [1, L]");
  }
  if (sc.bins == 0) config_error("run.scan.bins: must be >= 1");
  if (sc.n_cells == 0) config_error("run.scan.n_cells: must be >= 1");
  if (!(sc.cap_radius > 0.0 && sc.cap_radius <= 1.5707963267948966)) {
    config_error("run.scan.cap_radius: must lie in (0, pi/2]");
  }
  if (!(sc.atom_mass > 0.0 && sc.atom_mass <= 1.0)) {
    config_error("run.scan.atom_mass: must lie in (0, 1]");
  }

  const auto& s = c.check.settings;
  if (c.check.select) {
    const auto& known = check_ids();
    for (const auto& id : *c.check.select) {
      if (std::find(known.begin(), known.end(), id) == known.end()) {
        config_error("check.select: unknown check '" + id + "'");
      }
    }
  }
  if (!(s.n_sigma > 0.0)) config_error("check.n_sigma: must be > 0");
  if (!(s.confidence > 0.0 && s.confidence < 1.0)) config_error("check.confidence: must lie in (0, 1)");
  if (!(s.bound_scale > 0.0)) config_error("check.bound_scale: must be > 0");
  for (const auto& p : s.haar_partitions) {
    if (p.dim() != m->dim()) config_error("check.sizes.haar_partitions: dimension mismatch");
  }
  for (const auto& [key, n] : {std::pair{"haar_vectors", s.haar_vectors},
                               std::pair{"haar_draws", s.haar_draws},
                               std::pair{"drift_draws", s.drift_draws},
                               std::pair{"beta_samples", s.beta_samples},
                               std::pair{"phase_samples", s.phase_samples},
                               std::pair{"phase_steps", s.phase_steps},
                               std::pair{"theorem2_trajectories", s.theorem2_trajectories},
                               std::pair{"theorem2_steps", s.theorem2_steps},
                               std::pair{"time_average_steps", s.time_average_steps},
                               std::pair{"order_draws", s.order_draws},
                               std::pair{"order_tail", s.order_tail},
                               std::pair{"lemma_samples", s.lemma_samples},
                               std::pair{"lemma_set_size", s.lemma_set_size},
                               std::pair{"coverage_cells", s.coverage_cells}}) {
    if (n == 0) config_error(std::string("check.sizes.") + key + ": must be >= 1");
  }
  if (s.drift_draws < 2 || s.haar_draws < 2) {
    config_error("check.sizes: Monte Carlo checks need at least two draws");
  }
  for (double l : s.theorem2_lambdas) {
    guard("check.sizes.theorem2_lambdas", [&] { m->with_lambda(l); });
  }
  if (!(s.coverage_radius > 0.0 && s.coverage_radius <= 1.5707963267948966)) {
    config_error("check.sizes.coverage_radius: must lie in (0, pi/2]");
  }

  for (const auto& f : c.output.formats) {
    if (f != "csv" && f != "jsonl") config_error("output.formats: unknown format '" + f + "'");
  }
  if (c.output.directory.empty()) config_error("output.directory: must not be empty");
}

}  // namespace spheredyn
