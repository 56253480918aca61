// SPDX-License-Identifier: Apache-2.0
#include "spheredyn/checks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "spheredyn/dynamics.hpp"
#include "spheredyn/errors.hpp"
#include "spheredyn/randomness.hpp"
#include "spheredyn/reachability.hpp"
#include "spheredyn/rng.hpp"
#include "spheredyn/statistics.hpp"
#include "spheredyn/support_scan.hpp"

namespace spheredyn {
namespace {

// Disjoint stream ranges per check.
constexpr std::uint64_t stream_base(std::uint64_t slot) { return (slot + 1) << 40; }

CheckResult make(std::string id, std::string anchor, double measured, double bound,
                 double tolerance, std::size_t n, std::uint64_t seed) {
  CheckResult r;
  r.check_id = std::move(id);
  r.paper_anchor = std::move(anchor);
  r.measured = measured;
  r.bound = bound;
  r.tolerance = tolerance;
  r.n_samples = n;
  r.seed = seed;
  r.status = measured <= bound + tolerance ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

std::vector<double> beta_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 99; ++k) g.push_back(k / 100.0);
  return g;
}

double max_deviation_from_beta(const EmpiricalCdf& cdf, const Partition& p) {
  double worst = 0.0;
  for (double d : beta_grid()) worst = std::max(worst, std::fabs(cdf(d) - beta_cdf_c_norm(p, d)));
  return worst;
}

double standardized(double excess, double se) {
  if (se > 0.0) return excess / se;
  if (excess <= 0.0) return 0.0;
  return std::numeric_limits<double>::infinity();
}

std::string with_lambda(std::string id, double lambda) {
  std::ostringstream os;
  os << id << "[lambda=" << lambda << "]";
  return os.str();
}

/// Start vector with |c|^2 = t^2, spread randomly inside each part.
Vector with_c_norm(const Partition& p, double t, RngStream& rng) {
  const auto n = static_cast<Eigen::Index>(p.dim());
  const auto lc = static_cast<Eigen::Index>(p.l_c());
  Vector v = sample_uniform_sphere(p.dim(), rng);
  Vector top = v.head(n - lc);
  Vector low = v.tail(lc);
  Vector out(n);
  out.head(n - lc) = std::sqrt(1.0 - t * t) * top.normalized();
  out.tail(lc) = t * low.normalized();
  return out.normalized();
}

}  // namespace

std::string_view to_string(CheckStatus s) noexcept {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::inconclusive: return "inconclusive";
  }
  return "fail";
}

CheckStatus check_status_from_string(std::string_view name) {
  if (name == "pass") return CheckStatus::pass;
  if (name == "fail") return CheckStatus::fail;
  if (name == "inconclusive") return CheckStatus::inconclusive;
  throw Error(ErrorCode::unknown_kind, "unknown check status: " + std::string(name));
}

CheckResult check_haar_moments(const DiagonalModel& m, const CheckSettings& s,
                               std::uint64_t seed) {
  std::vector<Partition> parts = s.haar_partitions;
  if (parts.empty()) parts.push_back(m.partition());
  constexpr std::array kinds{HaarMoment::a_norm, HaarMoment::z_sq, HaarMoment::a_norm_z_sq,
                             HaarMoment::cross};
  double worst = 0.0;
  std::uint64_t stream = stream_base(0);
  for (const auto& p : parts) {
    if (p.dim() != m.dim()) {
      throw Error(ErrorCode::dimension_mismatch, "Haar check partition does not match the model");
    }
    for (std::size_t i = 0; i < s.haar_vectors; ++i) {
      RngStream rng(seed, stream++);
      const Vector v = sample_uniform_sphere(m.dim(), rng);
      std::array<std::vector<double>, kinds.size()> values;
      for (auto& vals : values) vals.resize(s.haar_draws);
      for (std::size_t d = 0; d < s.haar_draws; ++d) {
        const Vector uv = sample_haar_orthogonal(m.dim(), rng) * v;
        for (std::size_t k = 0; k < kinds.size(); ++k) {
          values[k][d] = haar_moment_integrand(kinds[k], p, v, uv);
        }
      }
      for (std::size_t k = 0; k < kinds.size(); ++k) {
        const Summary sm = summarize(values[k]);
        const double err = std::fabs(sm.mean - haar_moment_oracle(kinds[k], p, v));
        worst = std::max(worst, standardized(err, sm.std_error));
      }
    }
  }
  return make("haar_moments", "closed-form Haar averages", worst, 0.0, s.n_sigma, s.haar_draws,
              seed);
}

CheckResult check_drift_bound(const DiagonalModel& m, const CheckSettings& s,
                              std::uint64_t seed) {
  RngStream rng(seed, stream_base(1));
  std::vector<SphereVector> starts{SphereVector::basis(m.dim(), 0),
                                   SphereVector::basis(m.dim(), m.dim() - 1)};
  for (int k = 0; k < 3; ++k) starts.emplace_back(sample_uniform_sphere(m.dim(), rng));
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& v : starts) {
    const auto r = drift_bound_test(m, v, s.drift_draws, rng, s.n_sigma);
    worst = std::max(worst, standardized(r.mc_mean - r.bound, r.std_error));
  }
  return make("drift_bound", "one-step drift of |a|^2", worst, 0.0, s.n_sigma, s.drift_draws,
              seed);
}

CheckResult check_beta_law(const DiagonalModel& m, const CheckSettings& s, std::uint64_t seed) {
  RngStream rng(seed, stream_base(2));
  std::vector<double> c2(s.beta_samples);
  for (auto& x : c2) x = part_norms(sample_uniform_sphere(m.dim(), rng), m.partition()).c2;
  const EmpiricalCdf cdf(std::move(c2));
  return make("beta_law", "beta law of |c|^2 under the uniform measure",
              max_deviation_from_beta(cdf, m.partition()), 0.0,
              dkw_band(s.beta_samples, s.confidence).half_width, s.beta_samples, seed);
}

CheckResult check_random_phase_one_step(const DiagonalModel& m, const CheckSettings& s,
                                        std::uint64_t seed) {
  std::vector<double> before(s.phase_samples);
  std::vector<double> after(s.phase_samples);
  RngStream rng(seed, stream_base(3));
  StepScratch scratch;
  for (std::size_t i = 0; i < s.phase_samples; ++i) {
    Vector v = sample_uniform_sphere(m.dim(), rng);
    before[i] = part_norms(v, m.partition()).c2;
    advance(m, StepKind::isotropic, v, rng, scratch);
    after[i] = part_norms(v, m.partition()).c2;
  }
  const double ks = ks_distance(EmpiricalCdf(std::move(before)), EmpiricalCdf(std::move(after)));
  const double band = 2.0 * dkw_band(s.phase_samples, s.confidence).half_width;
  return make("random_phase_one_step", "random phase property", ks, 0.0, band, s.phase_samples,
              seed);
}

CheckResult check_random_phase_mixing(const DiagonalModel& m, const CheckSettings& s,
                                      std::uint64_t seed) {
  EnsembleSpec spec{m, ChainVariant::isotropic(), SphereVector::basis(m.dim(), 0),
                    s.phase_steps, s.phase_samples, std::max<std::size_t>(1, s.phase_steps),
                    BurninPolicy::none(), stream_base(4)};
  const auto res = run_ensemble(spec, seed, s.workers);
  const EmpiricalCdf cdf(res.final_values(res.c2));
  return make("random_phase_mixing", "random phase property",
              max_deviation_from_beta(cdf, m.partition()), 0.0,
              dkw_band(s.phase_samples, s.confidence).half_width, s.phase_samples, seed);
}

std::vector<CheckResult> check_theorem2_bound(const DiagonalModel& m, const CheckSettings& s,
                                              std::uint64_t seed) {
  std::vector<double> lambdas = s.theorem2_lambdas;
  if (lambdas.empty()) lambdas.push_back(m.lambda());
  std::vector<CheckResult> out;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const DiagonalModel mk = m.with_lambda(lambdas[k]);
    const double rhs = theorem2_rhs(mk) * s.bound_scale;
    EnsembleSpec spec{mk, ChainVariant::hyperbolic(), SphereVector::basis(m.dim(), 0),
                      s.theorem2_steps, s.theorem2_trajectories, 10,
                      BurninPolicy::adaptive(s.burnin_cap), stream_base(5) + (k << 32)};
    const auto res = run_ensemble(spec, seed, s.workers);
    const Summary sm = summarize(res.final_values(res.a2));
    auto r = make(with_lambda("theorem2_bound", lambdas[k]), "bound on E|a(v_N)|^2 past burn-in",
                  sm.mean, rhs, s.n_sigma * sm.std_error, s.theorem2_trajectories, seed);
    if (!res.burnin_converged) r.status = CheckStatus::inconclusive;
    out.push_back(std::move(r));
  }
  return out;
}

CheckResult check_time_average_bound(const DiagonalModel& m, const CheckSettings& s,
                                     std::uint64_t seed) {
  TimeAverageSpec spec{m, StepKind::hyperbolic, SphereVector::basis(m.dim(), 0),
                       s.time_average_steps, BurninPolicy::adaptive(s.burnin_cap), 10, 100,
                       stream_base(6)};
  const auto res = run_time_average(spec, seed);
  auto r = make("time_average_bound", "time-averaged bound on |a|^2", res.mean_a2,
                theorem2_rhs(m) * s.bound_scale, s.n_sigma * res.std_error, res.n_samples, seed);
  if (!res.burnin_converged) r.status = CheckStatus::inconclusive;
  return r;
}

CheckResult check_stochastic_order(const DiagonalModel& m, const CheckSettings& s,
                                   std::uint64_t seed) {
  constexpr std::array<std::array<double, 2>, 5> pairs{
      {{0.3, 0.0}, {0.7, 0.3}, {1.0, 0.7}, {1.0, 0.0}, {0.7, 0.0}}};
  RngStream rng(seed, stream_base(7));
  StepScratch scratch;
  auto one_step = [&](const Vector& start) {
    std::vector<double> out(s.order_draws);
    for (auto& x : out) {
      Vector v = start;
      advance(m, StepKind::isotropic, v, rng, scratch);
      x = std::sqrt(part_norms(v, m.partition()).c2);
    }
    return EmpiricalCdf(std::move(out));
  };
  double worst = -std::numeric_limits<double>::infinity();
  const double band = 2.0 * dkw_band(s.order_draws, s.confidence).half_width;
  for (const auto& [hi, lo] : pairs) {
    const Vector v = with_c_norm(m.partition(), hi, rng);
    const Vector w = with_c_norm(m.partition(), lo, rng);
    const auto verdict = stochastic_order_test(one_step(v), one_step(w), s.confidence);
    worst = std::max(worst, verdict.max_excess + band);
  }
  return make("stochastic_order", "one-step stochastic order in |c|", worst, 0.0, band,
              s.order_draws, seed);
}

CheckResult check_interleaved_order(const DiagonalModel& m, const CheckSettings& s,
                                    std::uint64_t seed) {
  const std::size_t horizon = s.order_prefix + s.order_tail;
  auto run = [&](ChainVariant variant, std::uint64_t slot) {
    EnsembleSpec spec{m, variant, SphereVector::basis(m.dim(), 0), horizon, s.order_draws,
                      std::max<std::size_t>(1, horizon), BurninPolicy::none(), slot};
    const auto res = run_ensemble(spec, seed, s.workers);
    auto c2 = res.final_values(res.c2);
    for (auto& x : c2) x = std::sqrt(x);
    return EmpiricalCdf(std::move(c2));
  };
  const auto mixed = run(ChainVariant::interleaved(s.order_tail), stream_base(8));
  const auto iso = run(ChainVariant::isotropic(), stream_base(8) + (1ull << 32));
  const auto verdict = stochastic_order_test(mixed, iso, s.confidence);
  const double band = 2.0 * dkw_band(s.order_draws, s.confidence).half_width;
  return make("stochastic_order_interleaved", "ordered products against the isotropic chain",
              verdict.max_excess + band, 0.0, band, s.order_draws, seed);
}

CheckResult check_deterministic_contraction_lemma(const DiagonalModel& m,
                                                  const CheckSettings& s, std::uint64_t seed) {
  RngStream rng(seed, stream_base(9));
  std::size_t violations = 0;
  for (std::size_t i = 0; i < s.lemma_samples; ++i) {
    const SphereVector v(sample_uniform_sphere(m.dim(), rng));
    if (!check_deterministic_contraction(m, v).holds) ++violations;
  }
  return make("deterministic_contraction", "deterministic contraction of |a|^2",
              static_cast<double>(violations), 0.0, 0.0, s.lemma_samples, seed);
}

CheckResult check_product_moment_lemma(const DiagonalModel& m, const CheckSettings& s,
                                       std::uint64_t seed) {
  RngStream rng(seed, stream_base(10));
  std::size_t violations = 0;
  std::vector<PartNorms> set(s.lemma_set_size);
  for (std::size_t i = 0; i < s.lemma_samples; ++i) {
    // Mix uniform draws with draws concentrated near the c-part.
    const double tilt = rng.uniform();
    for (auto& pn : set) {
      Vector v = sample_uniform_sphere(m.dim(), rng);
      v.tail(static_cast<Eigen::Index>(m.partition().l_c())) /= std::max(tilt, 1e-3);
      pn = part_norms(Vector(v.normalized()), m.partition());
    }
    if (!check_product_moment_inequality(set, rng.uniform()).holds) ++violations;
  }
  return make("product_moment", "product-moment inequality for arbitrary laws",
              static_cast<double>(violations), 0.0, 0.0, s.lemma_samples, seed);
}

CheckResult check_forbidden_annulus(const DiagonalModel& m, const CheckSettings& s,
                                    std::uint64_t seed) {
  AnnulusScanSpec spec;
  spec.channel = 1;
  spec.n_steps = s.annulus_steps;
  spec.max_burnin = s.annulus_max_burnin;
  spec.stream_index = stream_base(11);
  const auto rep = annulus_scan(m, spec, seed);
  auto r = make("forbidden_annulus", "forbidden annulus for a large microscopic gap",
                static_cast<double>(rep.violations), 0.0, 0.0, rep.n_samples, seed);
  if (!rep.burnin_converged) r.status = CheckStatus::inconclusive;
  return r;
}

CheckResult check_reachability(const DiagonalModel& m, const CheckSettings& s,
                               std::uint64_t seed) {
  RngStream rng(seed, stream_base(12));
  double worst = 0.0;
  for (std::size_t i = 0; i < s.reach_pairs; ++i) {
    const SphereVector u(sample_uniform_sphere(m.dim(), rng));
    const SphereVector w(sample_uniform_sphere(m.dim(), rng));
    try {
      worst = std::max(worst, path_residual(m, plan_path(m, u, w)));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::hypothesis_violated) throw;
      worst = std::numeric_limits<double>::infinity();
    }
  }
  return make("reachability", "constructive steering between any two points", worst, 1e-6, 0.0,
              s.reach_pairs, seed);
}

CheckResult check_full_support(const DiagonalModel& m, const CheckSettings& s,
                               std::uint64_t seed) {
  CoverageScanSpec spec;
  spec.n_steps = s.coverage_steps;
  spec.n_cells = s.coverage_cells;
  spec.cap_radius = s.coverage_radius;
  spec.stream_index = stream_base(13);
  const auto rep = coverage_scan(m, spec, seed);
  return make("full_support", "support is the whole sphere", 1.0 - rep.fraction, 0.0, 0.0,
              rep.steps_to_full.value_or(s.coverage_steps), seed);
}

DiagonalModel annulus_reference_model() {
  return DiagonalModel({2, 1, 1, 1, 1, 1}, Partition(2, 2, 2), 1.0 / 64);
}

DiagonalModel reach_reference_model() {
  return DiagonalModel({1.2, 1.1, 1.05, 1, 1, 1}, Partition(2, 2, 2), 0.3);
}

DiagonalModel coverage_reference_model() {
  return DiagonalModel({1, 1, 1, 1, 1, 1}, Partition(2, 2, 2), 0.25);
}

const std::vector<std::string>& check_ids() {
  static const std::vector<std::string> ids{"haar_moments",
                                            "drift_bound",
                                            "beta_law",
                                            "random_phase_one_step",
                                            "random_phase_mixing",
                                            "theorem2_bound",
                                            "time_average_bound",
                                            "stochastic_order",
                                            "stochastic_order_interleaved",
                                            "deterministic_contraction",
                                            "product_moment",
                                            "forbidden_annulus",
                                            "reachability",
                                            "full_support"};
  return ids;
}

std::vector<CheckResult> run_checks(const DiagonalModel& m, const std::vector<std::string>& ids,
                                    const CheckSettings& s, std::uint64_t seed) {
  std::vector<CheckResult> out;
  for (const auto& id : ids) {
    if (id == "haar_moments") out.push_back(check_haar_moments(m, s, seed));
    else if (id == "drift_bound") out.push_back(check_drift_bound(m, s, seed));
    else if (id == "beta_law") out.push_back(check_beta_law(m, s, seed));
    else if (id == "random_phase_one_step") out.push_back(check_random_phase_one_step(m, s, seed));
    else if (id == "random_phase_mixing") out.push_back(check_random_phase_mixing(m, s, seed));
    else if (id == "theorem2_bound") {
      for (auto& r : check_theorem2_bound(m, s, seed)) out.push_back(std::move(r));
    } else if (id == "time_average_bound") out.push_back(check_time_average_bound(m, s, seed));
    else if (id == "stochastic_order") out.push_back(check_stochastic_order(m, s, seed));
    else if (id == "stochastic_order_interleaved") out.push_back(check_interleaved_order(m, s, seed));
    else if (id == "deterministic_contraction")
      out.push_back(check_deterministic_contraction_lemma(m, s, seed));
    else if (id == "product_moment") out.push_back(check_product_moment_lemma(m, s, seed));
    else if (id == "forbidden_annulus")
      out.push_back(check_forbidden_annulus(annulus_reference_model(), s, seed));
    else if (id == "reachability") out.push_back(check_reachability(reach_reference_model(), s, seed));
    else if (id == "full_support")
      out.push_back(check_full_support(coverage_reference_model(), s, seed));
    else throw Error(ErrorCode::unknown_kind, "unknown check id: " + id);
  }
  return out;
}

}  // namespace spheredyn
