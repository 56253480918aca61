// SPDX-License-Identifier: Apache-2.0
//
// Geometry of the random dynamics v_n = R(1 + lambda r_n U_n) . v_{n-1} on the
// sphere S^L: unit vectors, the projective action, the diagonal matrix R, the
// a/b/c channel partition, eigenvalue gaps and the closed-form bounds on the
// invariant measure.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

#include "spheredyn/radial_law.hpp"

namespace spheredyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Unit vector in R^{L+1}, L >= 2. Renormalized on construction.
class SphereVector {
 public:
  static constexpr double kNormTolerance = 1e-12;

  explicit SphereVector(Vector coords);
  SphereVector(std::initializer_list<double> coords);

  /// Standard basis vector e_{index+1} (zero-based index) of R^dim.
  static SphereVector basis(std::size_t dim, std::size_t index);

  const Vector& coords() const noexcept { return coords_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(coords_.size()); }
  double operator[](std::size_t j) const { return coords_[static_cast<Eigen::Index>(j)]; }

 private:
  Vector coords_;
};

/// Channel counts (L_a, L_b, L_c) of the upper, middle and lower parts.
class Partition {
 public:
  Partition(std::size_t l_a, std::size_t l_b, std::size_t l_c);

  std::size_t l_a() const noexcept { return l_a_; }
  std::size_t l_b() const noexcept { return l_b_; }
  std::size_t l_c() const noexcept { return l_c_; }
  std::size_t dim() const noexcept { return l_a_ + l_b_ + l_c_; }
  /// (L_a, L_b) != (1, 1).
  bool well_separated() const noexcept { return !(l_a_ == 1 && l_b_ == 1); }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::size_t l_a_;
  std::size_t l_b_;
  std::size_t l_c_;
};

/*
 * The unperturbed matrix R, the channel partition, the coupling lambda and
 * the radial law.
 *
 * kappas are stored 1-based-first: kappas()[0] = kappa_1 >= ... >= kappa_{L+1}.
 * R = diag(kappa_{L+1}, ..., kappa_1), so component j (1-based) of a vector is
 * scaled by kappa_{L+2-j}: the a-part carries the smallest kappas and the
 * c-part the largest. e_{L+1} is the stable fixed point of R.
 */
class DiagonalModel {
 public:
  DiagonalModel(std::vector<double> kappas, Partition partition, double lambda,
                RadialLaw radial_law = RadialLaw::constant_one());

  std::size_t dim() const noexcept { return kappas_.size(); }
  /// L, the sphere dimension.
  std::size_t sphere_dim() const noexcept { return kappas_.size() - 1; }

  const std::vector<double>& kappas() const noexcept { return kappas_; }
  /// kappa_i for 1 <= i <= L+1.
  double kappa(std::size_t i) const;
  const Partition& partition() const noexcept { return partition_; }
  double lambda() const noexcept { return lambda_; }
  const RadialLaw& radial_law() const noexcept { return radial_law_; }

  /// Diagonal of R in component order.
  const Vector& r_diagonal() const noexcept { return r_diag_; }
  Matrix r_matrix() const;

  DiagonalModel with_lambda(double lambda) const;
  DiagonalModel with_partition(Partition partition) const;

 private:
  std::vector<double> kappas_;
  Partition partition_;
  double lambda_;
  RadialLaw radial_law_;
  Vector r_diag_;
};

/// Squared norms of the a-, b- and c-parts of a unit vector.
struct PartNorms {
  double a2 = 0.0;
  double b2 = 0.0;
  double c2 = 0.0;
};

/// Half-open interval (lower, upper].
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double x) const noexcept { return x > lower && x <= upper; }
};

struct ContractionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// T v / |T v| for any dimension; throws NearSingularAction on underflow.
Vector project_action(const Matrix& matrix, const Vector& v);
SphereVector project_action(const Matrix& matrix, const SphereVector& v);

PartNorms part_norms(const Vector& v, const Partition& p);
PartNorms part_norms(const SphereVector& v, const Partition& p);

/// |P_i^up v|^2: squared norm of the first L+1-i components.
double upper_projection_norm2(const Vector& v, std::size_t i);

/// delta R_i = (kappa_i - kappa_{i+1}) / kappa_{i+1}, 1 <= i <= L.
double local_gap(const DiagonalModel& m, std::size_t i);
/// delta R_{i,j} = (kappa_i - kappa_j) / kappa_j, i < j.
double channel_gap(const DiagonalModel& m, std::size_t i, std::size_t j);
/// max_i delta R_i.
double max_local_gap(const DiagonalModel& m);

/// gamma = min{1, kappa_{L_c}^2 / kappa_{L_b+L_c+1}^2 - 1}, clamped to [0, 1].
double macroscopic_gap(const DiagonalModel& m);

/// Upper bound on E|a(v_N)|^2 for N past burn-in (and on the invariant
/// average of |a|^2). Needs gamma > 0, a separated partition, 0 < lambda <= 1/4.
double theorem2_rhs(const DiagonalModel& m);

/// Threshold quantity d: the optimizing delta when d < 1; the bound exceeds 1
/// (and is vacuous) when d >= 1. Same preconditions as theorem2_rhs.
double theorem2_threshold_d(const DiagonalModel& m);

/// |a(R.v)|^2 <= (1 - |c(v)|^2 gamma / 2) |a(v)|^2, evaluated for one v.
ContractionCheck check_deterministic_contraction(const DiagonalModel& m,
                                                 const SphereVector& v);

/// Values of |P_i^up v|^2 that carry no invariant mass when
/// lambda < min{delta R_i, 1/2} / 16; nullopt otherwise.
std::optional<Interval> forbidden_annulus(const DiagonalModel& m, std::size_t i);

}  // namespace spheredyn
