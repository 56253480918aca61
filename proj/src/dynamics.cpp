// SPDX-License-Identifier: Apache-2.0
#include "spheredyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "spheredyn/errors.hpp"
#include "spheredyn/randomness.hpp"
#include "spheredyn/statistics.hpp"

namespace spheredyn {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_model_vector(const DiagonalModel& m, Eigen::Index size) {
  if (static_cast<std::size_t>(size) != m.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "state dimension does not match the model");
  }
}

StepKind burnin_kind(const ChainVariant& variant) {
  return variant.kind() == ChainVariant::Kind::isotropic ? StepKind::isotropic
                                                         : StepKind::hyperbolic;
}

double a2_of(const Vector& v, Eigen::Index la) { return v.head(la).squaredNorm(); }

}  // namespace

ChainVariant ChainVariant::interleaved(std::size_t k) {
  if (k == 0) {
    throw Error(ErrorCode::invalid_argument, "interleaved variant needs k >= 1");
  }
  return ChainVariant(Kind::interleaved, k);
}

StepKind ChainVariant::kind_at(std::size_t n, std::size_t horizon) const noexcept {
  switch (kind_) {
    case Kind::hyperbolic: return StepKind::hyperbolic;
    case Kind::isotropic: return StepKind::isotropic;
    case Kind::interleaved:
      return n + tail_ > horizon ? StepKind::isotropic : StepKind::hyperbolic;
  }
  return StepKind::hyperbolic;
}

double advance(const DiagonalModel& m, StepKind kind, Vector& v, RngStream& rng,
               StepScratch& scratch, Vector* kicked) {
  const Eigen::Index n = v.size();
  const double r = m.radial_law().sample(rng);
  Vector& dir = scratch.direction;
  dir.resize(n);
  double norm2 = 0.0;
  do {
    for (Eigen::Index j = 0; j < n; ++j) dir[j] = rng.normal();
    norm2 = dir.squaredNorm();
  } while (!(norm2 > 0.0));

  Vector& next = scratch.next;
  next = v + (m.lambda() * r / std::sqrt(norm2)) * dir;
  if (kicked != nullptr) *kicked = next.normalized();
  if (kind == StepKind::hyperbolic) next.array() *= m.r_diagonal().array();
  const double norm = next.norm();
  if (!(norm > 1e-300)) {
    throw Error(ErrorCode::near_singular_action, "|T v| underflows");
  }
  next /= norm;
  const double z = v.dot(next);
  v.swap(next);
  return z;
}

SphereVector step(const DiagonalModel& m, StepKind kind, const SphereVector& v,
                  RngStream& rng) {
  require_model_vector(m, v.coords().size());
  Vector state = v.coords();
  StepScratch scratch;
  advance(m, kind, state, rng, scratch);
  return SphereVector(std::move(state));
}

Vector apply_draw(const DiagonalModel& m, StepKind kind, const Vector& v, double r,
                  const Matrix& u) {
  require_model_vector(m, v.size());
  if (u.rows() != v.size() || u.cols() != v.size()) {
    throw Error(ErrorCode::dimension_mismatch, "orthogonal factor has wrong size");
  }
  Vector next = v + (m.lambda() * r) * (u * v);
  if (kind == StepKind::hyperbolic) next.array() *= m.r_diagonal().array();
  const double norm = next.norm();
  if (!(norm > 1e-300)) {
    throw Error(ErrorCode::near_singular_action, "|T v| underflows");
  }
  return next / norm;
}

std::vector<std::size_t> recording_grid(std::size_t n_steps, std::size_t record_every) {
  if (record_every == 0) {
    throw Error(ErrorCode::invalid_argument, "record_every must be >= 1");
  }
  std::vector<std::size_t> grid;
  grid.reserve(n_steps / record_every + 2);
  for (std::size_t s = 0; s <= n_steps; s += record_every) grid.push_back(s);
  if (grid.back() != n_steps) grid.push_back(n_steps);
  return grid;
}

TrajectoryRecord run_trajectory(const TrajectorySpec& spec, std::uint64_t master_seed) {
  if (spec.n_steps == 0) {
    throw Error(ErrorCode::invalid_argument, "n_steps must be >= 1");
  }
  const DiagonalModel& m = spec.model;
  require_model_vector(m, spec.v0.coords().size());
  const auto& p = m.partition();

  TrajectoryRecord rec;
  rec.steps = recording_grid(spec.n_steps, spec.record_every);
  const std::size_t k = rec.steps.size();
  rec.a2.reserve(k);
  rec.b2.reserve(k);
  rec.c2.reserve(k);
  rec.z.reserve(k);

  auto push = [&](const Vector& v, double z) {
    const PartNorms pn = part_norms(v, p);
    rec.a2.push_back(pn.a2);
    rec.b2.push_back(pn.b2);
    rec.c2.push_back(pn.c2);
    rec.z.push_back(z);
  };

  RngStream rng(master_seed, spec.stream_index);
  StepScratch scratch;
  Vector v = spec.v0.coords();
  push(v, kNaN);
  std::size_t next_record = 1;
  for (std::size_t n = 1; n <= spec.n_steps; ++n) {
    const double z = advance(m, spec.variant.kind_at(n, spec.n_steps), v, rng, scratch);
    rec.max_norm_deviation = std::max(rec.max_norm_deviation, std::fabs(v.norm() - 1.0));
    if (next_record < k && rec.steps[next_record] == n) {
      push(v, z);
      ++next_record;
    }
  }
  return rec;
}

std::vector<double> EnsembleResult::final_values(const std::vector<double>& series) const {
  if (grid.empty()) return {};
  const std::size_t offset = (grid.size() - 1) * m_trajectories;
  return {series.begin() + static_cast<std::ptrdiff_t>(offset),
          series.begin() + static_cast<std::ptrdiff_t>(offset + m_trajectories)};
}

EnsembleResult run_ensemble(const EnsembleSpec& spec, std::uint64_t master_seed,
                            std::size_t workers) {
  if (spec.m_trajectories == 0) {
    throw Error(ErrorCode::invalid_argument, "m_trajectories must be >= 1");
  }
  if (spec.n_steps == 0) {
    throw Error(ErrorCode::invalid_argument, "n_steps must be >= 1");
  }
  const DiagonalModel& m = spec.model;
  if (spec.v0) require_model_vector(m, spec.v0->coords().size());
  const std::size_t count = spec.m_trajectories;
  const auto la = static_cast<Eigen::Index>(m.partition().l_a());

  std::vector<RngStream> rngs;
  rngs.reserve(count);
  for (std::size_t t = 0; t < count; ++t) rngs.emplace_back(master_seed, spec.first_stream + t);
  std::vector<Vector> states(count);
  std::vector<StepScratch> scratch(count);
  for (std::size_t t = 0; t < count; ++t) {
    states[t] = spec.v0 ? spec.v0->coords() : sample_uniform_sphere(m.dim(), rngs[t]);
  }

  EnsembleResult out;
  out.m_trajectories = count;
  const StepKind warm = burnin_kind(spec.variant);

  switch (spec.burnin.kind) {
    case BurninPolicy::Kind::none: break;
    case BurninPolicy::Kind::fixed:
      detail::parallel_for(count, workers, [&](std::size_t t) {
        for (std::size_t n = 0; n < spec.burnin.steps; ++n) {
          advance(m, warm, states[t], rngs[t], scratch[t]);
        }
      });
      out.burnin_steps = spec.burnin.steps;
      break;
    case BurninPolicy::Kind::adaptive: {
      if (spec.burnin.window == 0 || spec.record_every == 0) {
        throw Error(ErrorCode::invalid_argument, "burn-in window and record_every must be >= 1");
      }
      const std::size_t block = spec.burnin.window * spec.record_every;
      std::vector<double> window_means(count);
      std::optional<double> previous;
      out.burnin_converged = false;
      while (out.burnin_steps + block <= spec.burnin.steps) {
        detail::parallel_for(count, workers, [&](std::size_t t) {
          double sum = 0.0;
          for (std::size_t n = 1; n <= block; ++n) {
            advance(m, warm, states[t], rngs[t], scratch[t]);
            if (n % spec.record_every == 0) sum += a2_of(states[t], la);
          }
          window_means[t] = sum / static_cast<double>(spec.burnin.window);
        });
        out.burnin_steps += block;
        const Summary s = summarize(window_means);
        if (previous && std::fabs(s.mean - *previous) < s.std_error) {
          out.burnin_converged = true;
          break;
        }
        previous = s.mean;
      }
      break;
    }
  }

  out.grid = recording_grid(spec.n_steps, spec.record_every);
  const std::size_t records = out.grid.size();
  out.a2.assign(records * count, 0.0);
  out.b2.assign(records * count, 0.0);
  out.c2.assign(records * count, 0.0);
  out.z.assign(records * count, kNaN);

  const Partition& p = m.partition();
  detail::parallel_for(count, workers, [&](std::size_t t) {
    auto store = [&](std::size_t k, double z) {
      const PartNorms pn = part_norms(states[t], p);
      const std::size_t idx = k * count + t;
      out.a2[idx] = pn.a2;
      out.b2[idx] = pn.b2;
      out.c2[idx] = pn.c2;
      out.z[idx] = z;
    };
    store(0, kNaN);
    std::size_t next_record = 1;
    for (std::size_t n = 1; n <= spec.n_steps; ++n) {
      const double z = advance(m, spec.variant.kind_at(n, spec.n_steps), states[t], rngs[t],
                               scratch[t]);
      if (next_record < records && out.grid[next_record] == n) {
        store(next_record, z);
        ++next_record;
      }
    }
  });
  return out;
}

TimeAverageResult run_time_average(const TimeAverageSpec& spec, std::uint64_t master_seed) {
  const DiagonalModel& m = spec.model;
  require_model_vector(m, spec.v0.coords().size());
  if (spec.n_batches < 2 || spec.measure_steps < spec.n_batches) {
    throw Error(ErrorCode::invalid_argument,
                "time average needs n_batches >= 2 and measure_steps >= n_batches");
  }
  if (spec.record_every == 0) {
    throw Error(ErrorCode::invalid_argument, "record_every must be >= 1");
  }
  const auto la = static_cast<Eigen::Index>(m.partition().l_a());
  RngStream rng(master_seed, spec.stream_index);
  StepScratch scratch;
  Vector v = spec.v0.coords();

  TimeAverageResult out;
  switch (spec.burnin.kind) {
    case BurninPolicy::Kind::none: break;
    case BurninPolicy::Kind::fixed:
      for (std::size_t n = 0; n < spec.burnin.steps; ++n) advance(m, spec.kind, v, rng, scratch);
      out.burnin_steps = spec.burnin.steps;
      break;
    case BurninPolicy::Kind::adaptive: {
      if (spec.burnin.window < 2) {
        throw Error(ErrorCode::invalid_argument, "burn-in window must be >= 2");
      }
      const std::size_t block = spec.burnin.window * spec.record_every;
      std::vector<double> points(spec.burnin.window);
      std::optional<double> previous;
      out.burnin_converged = false;
      while (out.burnin_steps + block <= spec.burnin.steps) {
        for (std::size_t n = 1; n <= block; ++n) {
          advance(m, spec.kind, v, rng, scratch);
          if (n % spec.record_every == 0) points[n / spec.record_every - 1] = a2_of(v, la);
        }
        out.burnin_steps += block;
        const Summary s = summarize(points);
        if (previous && std::fabs(s.mean - *previous) < s.std_error) {
          out.burnin_converged = true;
          break;
        }
        previous = s.mean;
      }
      break;
    }
  }

  std::vector<double> batch_means(spec.n_batches, 0.0);
  double total = 0.0;
  for (std::size_t b = 0; b < spec.n_batches; ++b) {
    const std::size_t begin = b * spec.measure_steps / spec.n_batches;
    const std::size_t end = (b + 1) * spec.measure_steps / spec.n_batches;
    double sum = 0.0;
    for (std::size_t n = begin; n < end; ++n) {
      advance(m, spec.kind, v, rng, scratch);
      sum += a2_of(v, la);
    }
    total += sum;
    batch_means[b] = sum / static_cast<double>(end - begin);
  }
  out.n_samples = spec.measure_steps;
  out.mean_a2 = total / static_cast<double>(spec.measure_steps);
  out.std_error = batch_means_std_error(batch_means);
  return out;
}

}  // namespace spheredyn
