// SPDX-License-Identifier: Apache-2.0
//
// Distributional checks: empirical CDFs with DKW bands, the beta law of
// |c(v)|^2 under the uniform measure, the projected surface-measure density,
// the one-step overlap transform G(r, y), stochastic order, and the moment
// inequalities used on the way to the |a|^2 bound.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "spheredyn/model.hpp"
#include "spheredyn/rng.hpp"

namespace spheredyn {

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased sample variance
  double std_error = 0.0;
};

Summary summarize(std::span<const double> xs);

/// Standard error of the mean from non-overlapping batch means; used for
/// autocorrelated time series.
double batch_means_std_error(std::span<const double> batch_means);

/// Sorted sample carrier. F(x) = #{samples <= x} / n.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples);

  double operator()(double x) const noexcept;
  std::size_t size() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted_samples() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

/// Dvoretzky-Kiefer-Wolfowitz band: P(sup|F_n - F| > eps) <= 2 exp(-2 n eps^2).
struct DkwBand {
  std::size_t n = 0;
  double confidence = 0.0;
  double half_width = 0.0;
};

DkwBand dkw_band(std::size_t n, double confidence);

/// sup_x |F_n(x) - cdf(x)| for a continuous reference cdf.
double ks_distance(const EmpiricalCdf& sample, const std::function<double(double)>& cdf);
/// sup_x |F_n(x) - G_m(x)|.
double ks_distance(const EmpiricalCdf& a, const EmpiricalCdf& b);

/// Regularized incomplete beta I_x(a, b) by Lentz continued fractions.
double regularized_incomplete_beta(double a, double b, double x);

/// nu_L(|c(v)|^2 < delta) = I_delta(L_c/2, (L_a+L_b)/2).
double beta_cdf_c_norm(const Partition& p, double delta);

/// Explicit upper bound on beta_cdf_c_norm valid for (L_a, L_b) != (1, 1).
double beta_cdf_upper_bound(const Partition& p, double delta);

/// Density of <v, w> for w uniform on S^L.
double projected_measure_density(std::size_t sphere_dim, double x);

/// G(r, y) = (1 + lambda r y) / sqrt(1 + 2 lambda r y + lambda^2 r^2): the
/// overlap <v, (1 + lambda r U) . v> as a function of y = <v, U v>.
double z_statistic_transform(double lambda, double r, double y);

struct OrderVerdict {
  bool ordered = true;
  /// Largest F_hi - F_lo - (band_hi + band_lo) over the merged grid; <= 0 when ordered.
  double max_excess = 0.0;
  double at = 0.0;
};

/// Checks that `hi` is stochastically larger than `lo` up to both DKW bands:
/// F_hi(x) <= F_lo(x) + band_hi + band_lo on every merged sample point.
OrderVerdict stochastic_order_test(const EmpiricalCdf& hi, const EmpiricalCdf& lo,
                                   double confidence);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// E[a2 c2] >= delta (E[a2] - P(c2 < delta)) on the empirical measure of the
/// given samples. Exact for any sample, so no tolerance beyond rounding.
InequalityCheck check_product_moment_inequality(std::span<const PartNorms> samples,
                                                double delta);

struct DriftBoundResult {
  double mc_mean = 0.0;
  double bound = 0.0;
  double std_error = 0.0;
  bool holds = false;
};

/// Monte Carlo E|a((1 + lambda r U) . v)|^2 against |a(v)|^2 + 3 lambda^2 L_a/(L+1).
/// Needs lambda <= 1/4 and L >= 3.
DriftBoundResult drift_bound_test(const DiagonalModel& m, const SphereVector& v,
                                  std::size_t n_draws, RngStream& rng,
                                  double n_sigma = 4.0);

/// Pearson chi-square statistic of observed counts against expected counts.
double chi_square_statistic(std::span<const std::size_t> observed,
                            std::span<const double> expected);
/// Upper tail P(X >= stat) of a chi-square law with `dof` degrees of freedom.
double chi_square_survival(double stat, double dof);

}  // namespace spheredyn
