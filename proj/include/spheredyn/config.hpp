// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: a JSON object with the blocks "model", "run",
// "check" and "output". Unknown keys are rejected at every level.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spheredyn/checks.hpp"
#include "spheredyn/dynamics.hpp"
#include "spheredyn/model.hpp"

namespace spheredyn {

struct RadialLawConfig {
  /// constant_one | uniform01 | bernoulli | discrete
  std::string kind = "constant_one";
  double p = 1.0;
  std::vector<double> support;
  std::vector<double> weights;

  friend bool operator==(const RadialLawConfig&, const RadialLawConfig&) = default;
};

struct ModelConfig {
  std::vector<double> kappas{2, 2, 2, 1, 1, 1};
  std::array<std::size_t, 3> partition{2, 2, 2};
  double lambda = 0.1;
  RadialLawConfig radial_law;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct BurninConfig {
  /// none | fixed | adaptive
  std::string kind = "none";
  std::size_t steps = 0;
  std::size_t window = 200;

  friend bool operator==(const BurninConfig&, const BurninConfig&) = default;
};

struct ScanConfig {
  /// annulus | coverage | atom
  std::string mode = "annulus";
  std::size_t channel = 1;
  std::size_t max_burnin = 1'000'000;
  std::size_t bins = 50;
  std::size_t n_cells = 200;
  double cap_radius = 0.35;
  double atom_mass = 0.01;
  /// Atom scans fail above this cluster mass.
  double atom_max_mass = 0.05;

  friend bool operator==(const ScanConfig&, const ScanConfig&) = default;
};

struct RunConfig {
  /// hyperbolic | isotropic | interleaved
  std::string variant = "hyperbolic";
  /// Isotropic tail length for `interleaved`.
  std::size_t interleave_tail = 0;
  std::size_t n_steps = 1000;
  std::size_t m_trajectories = 100;
  std::size_t record_every = 10;
  BurninConfig burnin;
  std::uint64_t master_seed = 42;
  /// Common start; absent means a uniform draw per trajectory.
  std::optional<std::vector<double>> v0;
  /// Endpoints for `reach`.
  std::optional<std::vector<double>> source;
  std::optional<std::vector<double>> target;
  ScanConfig scan;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct CheckConfig {
  /// Check ids for `verify`; absent means every check.
  std::optional<std::vector<std::string>> select;
  CheckSettings settings;

  friend bool operator==(const CheckConfig&, const CheckConfig&) = default;
};

struct OutputConfig {
  std::string directory = "out";
  /// Subset of {csv, jsonl}.
  std::vector<std::string> formats{"csv", "jsonl"};

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ExperimentConfig {
  ModelConfig model;
  RunConfig run;
  CheckConfig check;
  OutputConfig output;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses JSON text; throws ConfigError on syntax errors, wrong types and
/// unknown keys. Missing keys keep their defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Every field written out; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& c);

/// Checks all preconditions that can be checked without running anything;
/// throws ConfigError naming the offending key.
void validate_config(const ExperimentConfig& c);

DiagonalModel build_model(const ModelConfig& c);
ChainVariant build_variant(const RunConfig& c);
BurninPolicy build_burnin(const BurninConfig& c);
std::optional<SphereVector> build_vector(const std::optional<std::vector<double>>& coords);

}  // namespace spheredyn
