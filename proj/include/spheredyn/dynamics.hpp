// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "spheredyn/model.hpp"
#include "spheredyn/rng.hpp"

namespace spheredyn {

enum class StepKind { hyperbolic, isotropic };

/// Which product is iterated: R(1 + lambda r U), (1 + lambda r U), or a
/// hyperbolic prefix followed by k isotropic steps at the end of the horizon.
class ChainVariant {
 public:
  enum class Kind { hyperbolic, isotropic, interleaved };

  static ChainVariant hyperbolic() { return ChainVariant(Kind::hyperbolic, 0); }
  static ChainVariant isotropic() { return ChainVariant(Kind::isotropic, 0); }
  /// Throws InvalidArgument when k == 0.
  static ChainVariant interleaved(std::size_t k);

  Kind kind() const noexcept { return kind_; }
  std::size_t tail() const noexcept { return tail_; }

  /// Kind of step n (1-based) in a run of `horizon` steps.
  StepKind kind_at(std::size_t n, std::size_t horizon) const noexcept;

  friend bool operator==(const ChainVariant&, const ChainVariant&) = default;

 private:
  ChainVariant(Kind kind, std::size_t tail) : kind_(kind), tail_(tail) {}
  Kind kind_;
  std::size_t tail_;
};

/// Work buffers for advance(); reuse one per trajectory to stay allocation-free.
struct StepScratch {
  Vector direction;
  Vector next;
};

/*
 * One step of the chain, in place: v <- T v / |T v| with T = R(1 + lambda r U)
 * or T = 1 + lambda r U. Returns Z = <v_old, v_new>.
 *
 * Only U v enters the step, and for Haar U and fixed v the image U v is
 * uniform on the sphere, so the step samples that direction directly instead
 * of a full orthogonal matrix. If `kicked` is non-null it receives the
 * normalized intermediate (1 + lambda r U) . v.
 */
double advance(const DiagonalModel& m, StepKind kind, Vector& v, RngStream& rng,
               StepScratch& scratch, Vector* kicked = nullptr);

SphereVector step(const DiagonalModel& m, StepKind kind, const SphereVector& v,
                  RngStream& rng);

/// Same step with a prescribed draw (r, U); two matrix-vector products and
/// one normalization.
Vector apply_draw(const DiagonalModel& m, StepKind kind, const Vector& v, double r,
                  const Matrix& u);

struct TrajectorySpec {
  DiagonalModel model;
  ChainVariant variant = ChainVariant::hyperbolic();
  SphereVector v0;
  std::size_t n_steps = 1;
  std::size_t record_every = 10;
  std::uint64_t stream_index = 0;
};

/// 0, e, 2e, ... up to n_steps, with n_steps always included.
std::vector<std::size_t> recording_grid(std::size_t n_steps, std::size_t record_every);

struct TrajectoryRecord {
  std::vector<std::size_t> steps;
  std::vector<double> a2;
  std::vector<double> b2;
  std::vector<double> c2;
  /// Overlap of the step ending at the recorded point; NaN at step 0.
  std::vector<double> z;
  /// max_n | |v_n| - 1 | over every step, recorded or not.
  double max_norm_deviation = 0.0;
};

TrajectoryRecord run_trajectory(const TrajectorySpec& spec, std::uint64_t master_seed);

struct BurninPolicy {
  enum class Kind { none, fixed, adaptive };
  Kind kind = Kind::none;
  /// Steps for `fixed`; step cap for `adaptive`.
  std::size_t steps = 0;
  /// Recorded points per window for `adaptive`.
  std::size_t window = 200;

  static BurninPolicy none() { return {}; }
  static BurninPolicy fixed(std::size_t steps) { return {Kind::fixed, steps, 200}; }
  static BurninPolicy adaptive(std::size_t max_steps, std::size_t window = 200) {
    return {Kind::adaptive, max_steps, window};
  }
  friend bool operator==(const BurninPolicy&, const BurninPolicy&) = default;
};

struct EnsembleSpec {
  DiagonalModel model;
  ChainVariant variant = ChainVariant::hyperbolic();
  /// Common start; when empty each trajectory starts from its own uniform draw.
  std::optional<SphereVector> v0;
  /// Measured steps after burn-in.
  std::size_t n_steps = 1;
  std::size_t m_trajectories = 1;
  std::size_t record_every = 10;
  BurninPolicy burnin;
  /// Trajectory t uses stream first_stream + t.
  std::uint64_t first_stream = 0;
};

struct EnsembleResult {
  std::size_t m_trajectories = 0;
  /// Steps counted from the end of burn-in.
  std::vector<std::size_t> grid;
  /// Record-major: entry [k * M + t] is trajectory t at grid[k].
  std::vector<double> a2;
  std::vector<double> b2;
  std::vector<double> c2;
  std::vector<double> z;
  std::size_t burnin_steps = 0;
  /// False only when an adaptive burn-in hit its cap.
  bool burnin_converged = true;

  std::size_t records() const noexcept { return grid.size(); }
  double at(const std::vector<double>& series, std::size_t record,
            std::size_t trajectory) const {
    return series[record * m_trajectories + trajectory];
  }
  /// Values of `series` across the ensemble at the last grid point.
  std::vector<double> final_values(const std::vector<double>& series) const;
};

/// Trajectories are advanced independently on their own streams, so the
/// result does not depend on `workers`.
EnsembleResult run_ensemble(const EnsembleSpec& spec, std::uint64_t master_seed,
                            std::size_t workers = 1);

struct TimeAverageSpec {
  DiagonalModel model;
  StepKind kind = StepKind::hyperbolic;
  SphereVector v0;
  std::size_t measure_steps = 1;
  BurninPolicy burnin = BurninPolicy::adaptive(1'000'000);
  /// Burn-in windows are built from points every `record_every` steps.
  std::size_t record_every = 10;
  std::size_t n_batches = 100;
  std::uint64_t stream_index = 0;
};

struct TimeAverageResult {
  double mean_a2 = 0.0;
  /// Batch-means standard error.
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::size_t burnin_steps = 0;
  bool burnin_converged = true;
};

/// Time average of |a(v_n)|^2 along one trajectory after burn-in.
TimeAverageResult run_time_average(const TimeAverageSpec& spec, std::uint64_t master_seed);

}  // namespace spheredyn
