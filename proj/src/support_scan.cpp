// SPDX-License-Identifier: Apache-2.0
#include "spheredyn/support_scan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "parallel.hpp"
#include "spheredyn/dynamics.hpp"
#include "spheredyn/errors.hpp"
#include "spheredyn/randomness.hpp"
#include "spheredyn/rng.hpp"
#include "spheredyn/statistics.hpp"

namespace spheredyn {
namespace {

Vector first_coordinate(std::size_t dim) {
  Vector e = Vector::Zero(static_cast<Eigen::Index>(dim));
  e[0] = 1.0;
  return e;
}

/// Root of x^{d+1} = x + 1 (d = 1 gives the golden ratio).
double generalized_golden_ratio(std::size_t d) {
  double x = 2.0;
  const double p = static_cast<double>(d + 1);
  for (int it = 0; it < 100; ++it) {
    const double f = std::pow(x, p) - x - 1.0;
    const double df = p * std::pow(x, p - 1.0) - 1.0;
    const double next = x - f / df;
    if (std::fabs(next - x) < 1e-16) break;
    x = next;
  }
  return x;
}

}  // namespace

OccupancyReport annulus_scan(const DiagonalModel& m, const AnnulusScanSpec& spec,
                             std::uint64_t master_seed) {
  if (spec.channel < 1 || spec.channel > m.sphere_dim()) {
    throw Error(ErrorCode::index_out_of_range, "annulus channel outside [1, L]");
  }
  if (spec.bins == 0) throw Error(ErrorCode::invalid_argument, "histogram needs bins >= 1");
  const Vector start = spec.v0 ? spec.v0->coords() : first_coordinate(m.dim());
  if (static_cast<std::size_t>(start.size()) != m.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "start vector does not match the model");
  }

  OccupancyReport rep;
  rep.channel = spec.channel;
  rep.annulus = forbidden_annulus(m, spec.channel);
  rep.histogram.assign(spec.bins, 0);
  const auto upper = static_cast<Eigen::Index>(m.dim() - spec.channel);

  RngStream rng(master_seed, spec.stream_index);
  StepScratch scratch;
  Vector v = start;
  Vector kicked(v.size());

  if (rep.annulus) {
    rep.burnin_converged = false;
    while (rep.n_burnin < spec.max_burnin) {
      advance(m, StepKind::hyperbolic, v, rng, scratch, &kicked);
      ++rep.n_burnin;
      if (kicked.head(upper).squaredNorm() < rep.annulus->lower) {
        rep.burnin_converged = true;
        break;
      }
    }
    if (!rep.burnin_converged) return rep;
  }

  rep.min_observed = 1.0;
  rep.max_observed = 0.0;
  const double bins = static_cast<double>(spec.bins);
  for (std::size_t n = 0; n < spec.n_steps; ++n) {
    advance(m, StepKind::hyperbolic, v, rng, scratch);
    const double p = v.head(upper).squaredNorm();
    rep.min_observed = std::min(rep.min_observed, p);
    rep.max_observed = std::max(rep.max_observed, p);
    const auto bin = std::min(spec.bins - 1, static_cast<std::size_t>(p * bins));
    ++rep.histogram[bin];
    if (rep.annulus) {
      if (rep.annulus->contains(p)) ++rep.violations;
      if (p < rep.annulus->lower) ++rep.below_lower;
    }
  }
  rep.n_samples = spec.n_steps;
  if (rep.n_samples == 0) rep.min_observed = rep.max_observed = 0.0;
  return rep;
}

std::vector<Vector> probe_centers(std::size_t dim, std::size_t n_cells) {
  if (dim < 2) throw Error(ErrorCode::invalid_argument, "probe centers need dim >= 2");
  const double phi = generalized_golden_ratio(dim);
  std::vector<double> alpha(dim);
  for (std::size_t k = 0; k < dim; ++k) alpha[k] = std::pow(1.0 / phi, static_cast<double>(k + 1));
  std::vector<Vector> centers;
  centers.reserve(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) {
    Vector c(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
      double u = 0.5 + static_cast<double>(i + 1) * alpha[k];
      u -= std::floor(u);
      // Standard normal quantile.
      c[static_cast<Eigen::Index>(k)] = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
    }
    centers.push_back(c.normalized());
  }
  return centers;
}

CoverageReport coverage_scan(const DiagonalModel& m, const CoverageScanSpec& spec,
                             std::uint64_t master_seed) {
  if (!(m.lambda() > max_local_gap(m))) {
    throw Error(ErrorCode::hypothesis_violated,
                "full support is only claimed for lambda > max local gap");
  }
  if (!m.radial_law().includes_one()) {
    throw Error(ErrorCode::hypothesis_violated, "full support needs 1 in supp(r)");
  }
  if (spec.n_cells == 0) throw Error(ErrorCode::invalid_argument, "coverage needs n_cells >= 1");
  if (!(spec.cap_radius > 0.0 && spec.cap_radius <= std::numbers::pi / 2)) {
    throw Error(ErrorCode::invalid_argument, "cap radius must lie in (0, pi/2]");
  }
  const Vector start = spec.v0 ? spec.v0->coords() : first_coordinate(m.dim());
  if (static_cast<std::size_t>(start.size()) != m.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "start vector does not match the model");
  }

  CoverageReport rep;
  rep.n_cells = spec.n_cells;
  rep.cap_radius = spec.cap_radius;
  rep.first_visit.assign(spec.n_cells, std::nullopt);
  const auto centers = probe_centers(m.dim(), spec.n_cells);
  const double cos_radius = std::cos(spec.cap_radius);

  std::vector<std::size_t> open(spec.n_cells);
  for (std::size_t k = 0; k < open.size(); ++k) open[k] = k;
  auto mark = [&](const Vector& v, std::size_t step) {
    for (std::size_t idx = 0; idx < open.size();) {
      if (std::fabs(v.dot(centers[open[idx]])) >= cos_radius) {
        rep.first_visit[open[idx]] = step;
        open[idx] = open.back();
        open.pop_back();
      } else {
        ++idx;
      }
    }
  };

  RngStream rng(master_seed, spec.stream_index);
  StepScratch scratch;
  Vector v = start;
  mark(v, 0);
  for (std::size_t n = 1; n <= spec.n_steps && !open.empty(); ++n) {
    advance(m, StepKind::hyperbolic, v, rng, scratch);
    mark(v, n);
    if (open.empty()) rep.steps_to_full = n;
  }
  if (open.empty() && !rep.steps_to_full) rep.steps_to_full = 0;
  rep.visited = spec.n_cells - open.size();
  rep.fraction = static_cast<double>(rep.visited) / static_cast<double>(spec.n_cells);
  return rep;
}

double ball_mass(std::size_t sphere_dim, double rho) {
  if (sphere_dim < 2) throw Error(ErrorCode::invalid_argument, "ball mass needs L >= 2");
  if (!(rho >= 0.0 && rho <= std::numbers::pi)) {
    throw Error(ErrorCode::out_of_domain, "angular radius must lie in [0, pi]");
  }
  // <v, c>^2 has the law of |c(v)|^2 for a (L-1, 1, 1) split.
  const Partition one_vs_rest(sphere_dim - 1, 1, 1);
  const double c = std::cos(rho);
  const double tail = 0.5 * (1.0 - beta_cdf_c_norm(one_vs_rest, std::min(1.0, c * c)));
  return c >= 0.0 ? tail : 1.0 - tail;
}

double ball_radius_for_mass(std::size_t sphere_dim, double mass) {
  if (!(mass >= 0.0 && mass <= 1.0)) {
    throw Error(ErrorCode::out_of_domain, "ball mass must lie in [0, 1]");
  }
  if (mass == 0.0) return 0.0;
  if (mass == 1.0) return std::numbers::pi;
  double lo = 0.0;
  double hi = std::numbers::pi;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ball_mass(sphere_dim, mid) < mass ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<Vector> sample_final_states(const DiagonalModel& m, const std::optional<SphereVector>& v0,
                                        std::size_t n_steps, std::size_t count,
                                        std::uint64_t master_seed, std::uint64_t first_stream,
                                        std::size_t workers) {
  if (v0 && v0->dim() != m.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "start vector does not match the model");
  }
  std::vector<Vector> out(count);
  detail::parallel_for(count, workers, [&](std::size_t t) {
    RngStream rng(master_seed, first_stream + t);
    StepScratch scratch;
    Vector v = v0 ? v0->coords() : sample_uniform_sphere(m.dim(), rng);
    for (std::size_t n = 0; n < n_steps; ++n) advance(m, StepKind::hyperbolic, v, rng, scratch);
    out[t] = std::move(v);
  });
  return out;
}

AtomReport atom_check(const std::vector<Vector>& samples, double mass) {
  if (samples.empty()) throw Error(ErrorCode::empty_sample, "atom check needs samples");
  const auto dim = static_cast<std::size_t>(samples.front().size());
  if (dim < 3) throw Error(ErrorCode::dimension_mismatch, "atom check needs L >= 2");
  AtomReport rep;
  rep.n_samples = samples.size();
  rep.angular_radius = ball_radius_for_mass(dim - 1, mass);
  rep.ball_mass = ball_mass(dim - 1, rep.angular_radius);
  const double cos_radius = std::cos(rep.angular_radius);
  std::size_t best = 0;
  for (const auto& centre : samples) {
    if (static_cast<std::size_t>(centre.size()) != dim) {
      throw Error(ErrorCode::dimension_mismatch, "samples differ in dimension");
    }
    std::size_t count = 0;
    for (const auto& x : samples) {
      if (x.dot(centre) >= cos_radius - 1e-15) ++count;
    }
    best = std::max(best, count);
  }
  rep.max_cluster_mass = static_cast<double>(best) / static_cast<double>(samples.size());
  return rep;
}

}  // namespace spheredyn
