// SPDX-License-Identifier: Apache-2.0
#include "spheredyn/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "spheredyn/errors.hpp"
#include "spheredyn/randomness.hpp"

namespace spheredyn {
namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b);
// converges quickly for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw Error(ErrorCode::out_of_domain, "incomplete beta continued fraction did not converge");
}

}  // namespace

Summary summarize(std::span<const double> xs) {
  Summary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  // Welford.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    ++k;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  s.mean = mean;
  s.variance = xs.size() > 1 ? m2 / static_cast<double>(xs.size() - 1) : 0.0;
  s.std_error = std::sqrt(s.variance / static_cast<double>(xs.size()));
  return s;
}

double batch_means_std_error(std::span<const double> batch_means) {
  return summarize(batch_means).std_error;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) {
    throw Error(ErrorCode::empty_sample, "empirical CDF needs at least one sample");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const noexcept {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

DkwBand dkw_band(std::size_t n, double confidence) {
  if (n == 0 || !(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::out_of_domain, "DKW band needs n >= 1 and confidence in (0, 1)");
  }
  DkwBand band;
  band.n = n;
  band.confidence = confidence;
  band.half_width = std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
  return band;
}

double ks_distance(const EmpiricalCdf& sample, const std::function<double(double)>& cdf) {
  const auto& xs = sample.sorted_samples();
  const double n = static_cast<double>(xs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    worst = std::max(worst, std::max(static_cast<double>(i + 1) / n - f,
                                     f - static_cast<double>(i) / n));
  }
  return worst;
}

double ks_distance(const EmpiricalCdf& a, const EmpiricalCdf& b) {
  const auto& xa = a.sorted_samples();
  const auto& xb = b.sorted_samples();
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double worst = 0.0;
  while (i < xa.size() || j < xb.size()) {
    double x = 0.0;
    if (j >= xb.size() || (i < xa.size() && xa[i] <= xb[j])) {
      x = xa[i];
    } else {
      x = xb[j];
    }
    while (i < xa.size() && xa[i] <= x) ++i;
    while (j < xb.size() && xb[j] <= x) ++j;
    worst = std::max(worst, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return worst;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) {
    throw Error(ErrorCode::out_of_domain, "incomplete beta needs a, b > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::out_of_domain, "incomplete beta needs x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  // I_x(a, b) = 1 - I_{1-x}(b, a).
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double beta_cdf_c_norm(const Partition& p, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::out_of_domain, "delta must lie in [0, 1]");
  }
  return regularized_incomplete_beta(static_cast<double>(p.l_c()) / 2.0,
                                     static_cast<double>(p.l_a() + p.l_b()) / 2.0, delta);
}

double beta_cdf_upper_bound(const Partition& p, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::out_of_domain, "delta must lie in [0, 1]");
  }
  if (!p.well_separated()) {
    throw Error(ErrorCode::partition_not_separated, "bound needs (L_a, L_b) != (1, 1)");
  }
  const double dim = static_cast<double>(p.dim());
  const double lab = static_cast<double>(p.l_a() + p.l_b());
  const double lc = static_cast<double>(p.l_c());
  return std::pow(dim / lab, lab / 2.0 - 1.0) * std::pow(dim * delta / lc, lc / 2.0) *
         (1.0 - delta / 6.0);
}

double projected_measure_density(std::size_t sphere_dim, double x) {
  if (sphere_dim < 2) {
    throw Error(ErrorCode::out_of_domain, "projected density needs L >= 2");
  }
  if (!(std::fabs(x) <= 1.0)) {
    throw Error(ErrorCode::out_of_domain, "projected density needs |x| <= 1");
  }
  const double l = static_cast<double>(sphere_dim);
  const double log_norm = std::lgamma((l + 1.0) / 2.0) - std::lgamma(l / 2.0) -
                          0.5 * std::log(std::numbers::pi);
  const double base = 1.0 - x * x;
  if (base == 0.0) {
    if (sphere_dim == 2) return std::exp(log_norm);
    return 0.0;
  }
  return std::exp(log_norm + (l / 2.0 - 1.0) * std::log(base));
}

double z_statistic_transform(double lambda, double r, double y) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(ErrorCode::out_of_domain, "G(r, y) needs lambda in (0, 1)");
  }
  if (!(r >= 0.0 && r <= 1.0) || !(std::fabs(y) <= 1.0)) {
    throw Error(ErrorCode::out_of_domain, "G(r, y) needs r in [0, 1] and |y| <= 1");
  }
  const double lr = lambda * r;
  return (1.0 + lr * y) / std::sqrt(1.0 + 2.0 * lr * y + lr * lr);
}

OrderVerdict stochastic_order_test(const EmpiricalCdf& hi, const EmpiricalCdf& lo,
                                   double confidence) {
  const double allowance =
      dkw_band(hi.size(), confidence).half_width + dkw_band(lo.size(), confidence).half_width;
  OrderVerdict verdict;
  verdict.max_excess = -std::numeric_limits<double>::infinity();
  auto probe = [&](double x) {
    const double excess = hi(x) - lo(x) - allowance;
    if (excess > verdict.max_excess) {
      verdict.max_excess = excess;
      verdict.at = x;
    }
  };
  for (double x : hi.sorted_samples()) probe(x);
  for (double x : lo.sorted_samples()) probe(x);
  verdict.ordered = verdict.max_excess <= 0.0;
  return verdict;
}

InequalityCheck check_product_moment_inequality(std::span<const PartNorms> samples,
                                                double delta) {
  if (samples.empty()) {
    throw Error(ErrorCode::empty_sample, "product-moment check needs samples");
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::out_of_domain, "delta must lie in [0, 1]");
  }
  double sum_ac = 0.0;
  double sum_a = 0.0;
  std::size_t below = 0;
  for (const auto& s : samples) {
    sum_ac += s.a2 * s.c2;
    sum_a += s.a2;
    if (s.c2 < delta) ++below;
  }
  const double n = static_cast<double>(samples.size());
  InequalityCheck out;
  out.lhs = sum_ac / n;
  out.rhs = delta * (sum_a / n - static_cast<double>(below) / n);
  out.holds = out.lhs >= out.rhs - 1e-12;
  return out;
}

DriftBoundResult drift_bound_test(const DiagonalModel& m, const SphereVector& v,
                                  std::size_t n_draws, RngStream& rng, double n_sigma) {
  if (!(m.lambda() <= 0.25) || m.sphere_dim() < 3) {
    throw Error(ErrorCode::hypothesis_violated, "drift bound needs lambda <= 1/4 and L >= 3");
  }
  if (n_draws < 2) {
    throw Error(ErrorCode::invalid_argument, "drift bound test needs at least two draws");
  }
  const auto& p = m.partition();
  const auto la = static_cast<Eigen::Index>(p.l_a());
  std::vector<double> values(n_draws);
  Vector kicked(v.coords().size());
  for (auto& value : values) {
    const double r = m.radial_law().sample(rng);
    const Vector uv = sample_uniform_sphere(m.dim(), rng);
    kicked = v.coords() + (m.lambda() * r) * uv;
    value = kicked.head(la).squaredNorm() / kicked.squaredNorm();
  }
  const Summary s = summarize(values);
  DriftBoundResult out;
  out.mc_mean = s.mean;
  out.std_error = s.std_error;
  out.bound = part_norms(v, p).a2 + 3.0 * m.lambda() * m.lambda() *
                                        static_cast<double>(p.l_a()) /
                                        static_cast<double>(m.dim());
  out.holds = out.mc_mean <= out.bound + n_sigma * out.std_error;
  return out;
}

double chi_square_statistic(std::span<const std::size_t> observed,
                            std::span<const double> expected) {
  if (observed.size() != expected.size() || observed.empty()) {
    throw Error(ErrorCode::dimension_mismatch, "chi-square needs matching non-empty bins");
  }
  double stat = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    if (!(expected[k] > 0.0)) {
      throw Error(ErrorCode::out_of_domain, "chi-square expected counts must be > 0");
    }
    const double diff = static_cast<double>(observed[k]) - expected[k];
    stat += diff * diff / expected[k];
  }
  return stat;
}

double chi_square_survival(double stat, double dof) {
  if (!(dof > 0.0) || !(stat >= 0.0)) {
    throw Error(ErrorCode::out_of_domain, "chi-square survival needs dof > 0, stat >= 0");
  }
  return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

}  // namespace spheredyn
