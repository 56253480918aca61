// SPDX-License-Identifier: Apache-2.0
//
// Verification checks with uniform pass/fail records. A check passes when
// measured <= bound + tolerance; "inconclusive" marks a burn-in timeout.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spheredyn/model.hpp"

namespace spheredyn {

enum class CheckStatus { pass, fail, inconclusive };

std::string_view to_string(CheckStatus s) noexcept;
/// Throws UnknownKind.
CheckStatus check_status_from_string(std::string_view name);

struct CheckResult {
  std::string check_id;
  std::string paper_anchor;
  CheckStatus status = CheckStatus::pass;
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

/// Sample sizes and tolerances. Defaults are the full acceptance sizes.
struct CheckSettings {
  double n_sigma = 4.0;
  double confidence = 0.99;
  /// Multiplies the bounds of the mean-value checks; 1 outside harness self-tests.
  double bound_scale = 1.0;
  std::size_t workers = 1;

  std::size_t haar_vectors = 5;
  std::size_t haar_draws = 100'000;
  /// Empty: the model's partition only.
  std::vector<Partition> haar_partitions;
  std::size_t drift_draws = 100'000;

  std::size_t beta_samples = 100'000;

  std::size_t phase_samples = 100'000;
  std::size_t phase_steps = 1'000;

  /// Empty: the model's lambda only.
  std::vector<double> theorem2_lambdas;
  std::size_t theorem2_trajectories = 10'000;
  std::size_t theorem2_steps = 1'000;
  std::size_t burnin_cap = 1'000'000;

  std::size_t time_average_steps = 10'000'000;

  std::size_t order_draws = 100'000;
  std::size_t order_prefix = 50;
  std::size_t order_tail = 10;

  std::size_t lemma_samples = 10'000;
  std::size_t lemma_set_size = 100;

  std::size_t annulus_steps = 1'000'000;
  std::size_t annulus_max_burnin = 1'000'000;

  std::size_t reach_pairs = 100;

  std::size_t coverage_steps = 10'000'000;
  std::size_t coverage_cells = 200;
  double coverage_radius = 0.35;

  friend bool operator==(const CheckSettings&, const CheckSettings&) = default;
};

/// Monte Carlo Haar moments against their closed forms; measured is the
/// largest |error| in standard errors.
CheckResult check_haar_moments(const DiagonalModel& m, const CheckSettings& s,
                               std::uint64_t seed);
/// One-step growth of |a|^2 against |a(v)|^2 + 3 lambda^2 L_a/(L+1), worst of
/// a few start vectors, in standard errors past the bound.
CheckResult check_drift_bound(const DiagonalModel& m, const CheckSettings& s,
                              std::uint64_t seed);
/// Empirical CDF of |c(v)|^2, v uniform, against the beta law on a 0.01 grid.
CheckResult check_beta_law(const DiagonalModel& m, const CheckSettings& s, std::uint64_t seed);
/// One isotropic step from uniform starts leaves the |c|^2 law unchanged.
CheckResult check_random_phase_one_step(const DiagonalModel& m, const CheckSettings& s,
                                        std::uint64_t seed);
/// Isotropic chain from e_1 forgets its start: |c(v_N)|^2 follows the beta law.
CheckResult check_random_phase_mixing(const DiagonalModel& m, const CheckSettings& s,
                                      std::uint64_t seed);
/// Ensemble mean of |a(v_N)|^2 past adaptive burn-in, one result per lambda.
std::vector<CheckResult> check_theorem2_bound(const DiagonalModel& m, const CheckSettings& s,
                                              std::uint64_t seed);
/// Time average of |a|^2 along one long stationary run.
CheckResult check_time_average_bound(const DiagonalModel& m, const CheckSettings& s,
                                     std::uint64_t seed);
/// One-step |c| laws from start pairs with |c(v)| >= |c(w)|.
CheckResult check_stochastic_order(const DiagonalModel& m, const CheckSettings& s,
                                   std::uint64_t seed);
/// Hyperbolic prefix then isotropic tail vs a purely isotropic run of equal length.
CheckResult check_interleaved_order(const DiagonalModel& m, const CheckSettings& s,
                                    std::uint64_t seed);
/// Exact: violations of the deterministic contraction over random v.
CheckResult check_deterministic_contraction_lemma(const DiagonalModel& m,
                                                  const CheckSettings& s, std::uint64_t seed);
/// Exact: violations of the product-moment inequality on empirical sample sets.
CheckResult check_product_moment_lemma(const DiagonalModel& m, const CheckSettings& s,
                                       std::uint64_t seed);
/// Post-burn-in samples inside the forbidden annulus of channel 1.
CheckResult check_forbidden_annulus(const DiagonalModel& m, const CheckSettings& s,
                                    std::uint64_t seed);
/// Worst forward residual of plan_path over random pairs.
CheckResult check_reachability(const DiagonalModel& m, const CheckSettings& s,
                               std::uint64_t seed);
/// Fraction of probe caps never visited.
CheckResult check_full_support(const DiagonalModel& m, const CheckSettings& s,
                               std::uint64_t seed);

/// Models used by the support checks when no model is forced on them.
DiagonalModel annulus_reference_model();
DiagonalModel reach_reference_model();
DiagonalModel coverage_reference_model();

/// Ids accepted by run_checks, in suite order.
const std::vector<std::string>& check_ids();

/*
 * Runs the named checks. Model-dependent checks use `m`; forbidden_annulus,
 * reachability and full_support use their reference models (same dimension
 * as those models, independent of `m`). Unknown ids throw UnknownKind.
 */
std::vector<CheckResult> run_checks(const DiagonalModel& m, const std::vector<std::string>& ids,
                                    const CheckSettings& s, std::uint64_t seed);

}  // namespace spheredyn
