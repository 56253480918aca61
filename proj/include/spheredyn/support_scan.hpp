// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "spheredyn/model.hpp"

namespace spheredyn {

struct OccupancyReport {
  std::size_t channel = 0;
  std::optional<Interval> annulus;
  std::size_t n_samples = 0;
  std::size_t n_burnin = 0;
  /// False when the burn-in cap was hit; the scan is then inconclusive.
  bool burnin_converged = true;
  std::size_t violations = 0;
  /// Post-burn-in samples strictly below the lower annulus edge.
  std::size_t below_lower = 0;
  double min_observed = 0.0;
  double max_observed = 0.0;
  /// Equal-width bins over [0, 1]; counts sum to n_samples.
  std::vector<std::size_t> histogram;
};

struct AnnulusScanSpec {
  std::size_t channel = 1;
  std::size_t n_steps = 1'000'000;
  std::size_t max_burnin = 1'000'000;
  std::size_t bins = 50;
  /// Defaults to the first coordinate vector (all weight on the upper projection).
  std::optional<SphereVector> v0;
  std::uint64_t stream_index = 0;
};

/*
 * Hyperbolic chain against the forbidden annulus of |P_i v|^2, with P_i the
 * projection on the first L+1-i coordinates.
 *
 * Burn-in ends at the first step whose kicked state (1 + lambda r U) . v has
 * |P_i|^2 below the lower annulus edge; from there the sub-level set is
 * absorbing, so every later sample is counted. Without an annulus there is no
 * burn-in and no violation can occur.
 */
OccupancyReport annulus_scan(const DiagonalModel& m, const AnnulusScanSpec& spec,
                             std::uint64_t master_seed);

/// Deterministic, sign-folded probe centers: a generalized golden-ratio
/// sequence in [0, 1)^dim pushed through the normal quantile and normalized.
std::vector<Vector> probe_centers(std::size_t dim, std::size_t n_cells);

struct CoverageReport {
  std::size_t n_cells = 0;
  double cap_radius = 0.0;
  std::size_t visited = 0;
  double fraction = 0.0;
  /// Step at which each cap was first entered; nullopt if never.
  std::vector<std::optional<std::size_t>> first_visit;
  std::optional<std::size_t> steps_to_full;
};

struct CoverageScanSpec {
  std::size_t n_steps = 10'000'000;
  std::size_t n_cells = 200;
  double cap_radius = 0.35;
  std::optional<SphereVector> v0;
  std::uint64_t stream_index = 0;
};

/// Visits of the hyperbolic chain to the probe caps |<v, c>| >= cos(radius).
/// Stops early once every cap is visited. Needs lambda > every local gap and
/// 1 in supp(r).
CoverageReport coverage_scan(const DiagonalModel& m, const CoverageScanSpec& spec,
                             std::uint64_t master_seed);

/// nu_L-mass of a geodesic ball of angular radius rho on S^L.
double ball_mass(std::size_t sphere_dim, double rho);
/// Inverse of ball_mass in rho.
double ball_radius_for_mass(std::size_t sphere_dim, double mass);

struct AtomReport {
  double max_cluster_mass = 0.0;
  double angular_radius = 0.0;
  /// nu_L-mass of the ball, the no-atom reference value.
  double ball_mass = 0.0;
  std::size_t n_samples = 0;
};

/// Final states v_N of `count` independent hyperbolic trajectories, trajectory t
/// on stream first_stream + t, each started at v0 or at its own uniform draw.
std::vector<Vector> sample_final_states(const DiagonalModel& m, const std::optional<SphereVector>& v0,
                                        std::size_t n_steps, std::size_t count,
                                        std::uint64_t master_seed, std::uint64_t first_stream = 0,
                                        std::size_t workers = 1);

/// Largest fraction of the samples inside a ball of the given nu_L-mass
/// centered at one of them.
AtomReport atom_check(const std::vector<Vector>& samples, double mass);

}  // namespace spheredyn
