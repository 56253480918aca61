// SPDX-License-Identifier: Apache-2.0
//
// Explicit steering: finite sequences of perturbations (s_n, U_n) with
// prod R(1 + lambda s_n U_n) . u = w.
//
// Channels are numbered as in the model: channel J is the unit vector whose
// coordinate is scaled by kappa_J, so channel 1 (the last coordinate) is the
// most expanding direction and the stable fixed point of R.
#pragma once

#include <cstddef>
#include <vector>

#include "spheredyn/model.hpp"

namespace spheredyn {

struct SteeringStep {
  double s = 1.0;
  Matrix u;
};

struct SteeringPath {
  std::vector<SteeringStep> steps;
  SphereVector source;
  SphereVector target;

  std::size_t size() const noexcept { return steps.size(); }
};

/// Coordinate index (0-based) of channel J (1-based).
std::size_t channel_coordinate(std::size_t dim, std::size_t channel);
/// Unit vector of channel J.
Vector channel_vector(std::size_t dim, std::size_t channel);

/// Forward application of a path with the simulator's step code.
Vector apply_path(const DiagonalModel& m, const SteeringPath& path, const Vector& v);
/// |apply_path(source) - target|.
double path_residual(const DiagonalModel& m, const SteeringPath& path);

/// Smallest m >= 0 with [k_i (1 - lambda)]^m k_i <= lambda^2 [k_j (1 + lambda)]^m k_j
/// for adjacent channels i = from, j = from + 1. The climb uses m such steps.
std::size_t climb_middle_steps(const DiagonalModel& m, std::size_t from);

/// Path from +channel(from) to sign * channel(to), from <= to, hopping one
/// channel at a time. Needs lambda > every local gap and 1 in supp(r).
SteeringPath climb_channel(const DiagonalModel& m, int sign, std::size_t from,
                           std::size_t to);

/// Rotation inside the degenerate block of channels K_tilde..K (equal kappas)
/// from `start` to `target`, both supported on that block. Uses s = 1 and
/// small-angle steps whose U act as the identity off the block.
SteeringPath rotate_in_eigenspace(const DiagonalModel& m, std::size_t k, std::size_t k_tilde,
                                  const SphereVector& start, const SphereVector& target);
/// Same, starting from +channel(K).
SteeringPath rotate_in_eigenspace(const DiagonalModel& m, std::size_t k, std::size_t k_tilde,
                                  const SphereVector& target);

/*
 * Tail construction. With w_mid the block K_tilde..K part of w and the tail
 * J < K_tilde, the root c of
 *
 *   f_N(c) = c |w_mid| - kappa_K^N [1 + lambda (1 - (c/lambda)^2 sum_J (w_J / kappa_J^N)^2)^{1/2}]
 *
 * fixes one kick U_1 with U_1 y = x, x_J = (c/lambda) w_J / kappa_J^N, followed
 * by N - 1 steps with U = 1, so that R^N (1 + lambda U_1) . y = w for
 * y = w_mid / |w_mid|.
 */
double spread_tail_f(const DiagonalModel& m, const Vector& w, std::size_t k,
                     std::size_t k_tilde, std::size_t n3, double c);

struct TailRoot {
  std::size_t n3 = 0;
  /// Root of f_N divided by kappa_K^N (the unscaled c overflows for long tails).
  double c_scaled = 0.0;
};

/// Smallest N with a sign change on [0, c_max(N)], and the bisected root.
TailRoot find_tail_root(const DiagonalModel& m, const Vector& w, std::size_t k,
                        std::size_t k_tilde);

/// Path from w_mid / |w_mid| to w. Empty when w has no tail.
SteeringPath spread_tail(const DiagonalModel& m, const SphereVector& w, std::size_t k,
                         std::size_t k_tilde);

/// Full plan: descend to channel 1, climb to channel K, rotate inside the
/// block of K, spread the tail. Needs lambda > max local gap and 1 in supp(r).
SteeringPath plan_path(const DiagonalModel& m, const SphereVector& u, const SphereVector& w);

}  // namespace spheredyn
