// SPDX-License-Identifier: Apache-2.0
#include "spheredyn/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spheredyn/dynamics.hpp"
#include "spheredyn/errors.hpp"

namespace spheredyn {
namespace {

constexpr double kZeroComponent = 1e-12;
constexpr double kDegenerateTol = 1e-12;
constexpr double kInjectMass = 1e-3;
constexpr std::size_t kMaxPathSteps = 200'000;
constexpr std::size_t kMaxTailSteps = 1'000'000;

bool same_kappa(double a, double b) { return std::fabs(a - b) <= kDegenerateTol * std::max(a, b); }

/// First channel of the degenerate block containing channel k.
std::size_t block_start(const DiagonalModel& m, std::size_t k) {
  std::size_t j = k;
  while (j > 1 && same_kappa(m.kappa(j - 1), m.kappa(k))) --j;
  return j;
}

std::size_t block_end(const DiagonalModel& m, std::size_t k) {
  std::size_t j = k;
  while (j < m.dim() && same_kappa(m.kappa(j + 1), m.kappa(k))) ++j;
  return j;
}

/// Reflection with U a = b for unit a, b.
Matrix householder_map(const Vector& a, const Vector& b) {
  const auto n = a.size();
  const Vector h = a - b;
  const double h2 = h.squaredNorm();
  Matrix u = Matrix::Identity(n, n);
  if (h2 < 1e-30) return u;
  u.noalias() -= (2.0 / h2) * h * h.transpose();
  return u;
}

/// sin of the angle between unit vectors, stable for small angles.
double angle_between(const Vector& a, const Vector& b) {
  const double c = a.dot(b);
  const double s = (a - c * b).norm();
  return std::atan2(s, c);
}

Vector rotate_toward(const Vector& p, const Vector& q, double angle) {
  Vector perp = q - p.dot(q) * p;
  const double norm = perp.norm();
  if (norm < 1e-15) return p;
  perp /= norm;
  return std::cos(angle) * p + std::sin(angle) * perp;
}

/// Unit vector on coordinates [lo, hi] orthogonal to p (p supported there too).
Vector orthogonal_in_range(const Vector& p, Eigen::Index lo, Eigen::Index hi) {
  Eigen::Index best = lo;
  for (Eigen::Index k = lo; k <= hi; ++k) {
    if (std::fabs(p[k]) < std::fabs(p[best])) best = k;
  }
  Vector e = Vector::Zero(p.size());
  e[best] = 1.0;
  e -= e.dot(p) * p;
  return e.normalized();
}

int sign_of(double x) { return x < 0.0 ? -1 : 1; }

void require_channel_range(const DiagonalModel& m, std::size_t j) {
  if (j < 1 || j > m.dim()) {
    throw Error(ErrorCode::index_out_of_range,
                "channel " + std::to_string(j) + " outside [1, " + std::to_string(m.dim()) + "]");
  }
}

void require_positive_lambda(const DiagonalModel& m) {
  if (!(m.lambda() > 0.0)) {
    throw Error(ErrorCode::hypothesis_violated, "steering needs lambda > 0");
  }
}

void require_gap_hypothesis(const DiagonalModel& m) {
  const double gap = max_local_gap(m);
  if (!(m.lambda() > gap)) {
    throw Error(ErrorCode::hypothesis_violated,
                "steering needs lambda > max local gap (" + std::to_string(gap) + ")");
  }
}

void require_degenerate(const DiagonalModel& m, std::size_t k, std::size_t k_tilde) {
  require_channel_range(m, k);
  require_channel_range(m, k_tilde);
  if (k_tilde > k) throw Error(ErrorCode::invalid_order, "block needs K_tilde <= K");
  for (std::size_t j = k_tilde; j < k; ++j) {
    if (!same_kappa(m.kappa(j), m.kappa(k))) {
      throw Error(ErrorCode::not_degenerate,
                  "kappa_" + std::to_string(j) + " differs from kappa_" + std::to_string(k));
    }
  }
}

class PathBuilder {
 public:
  PathBuilder(const DiagonalModel& m, Vector start)
      : m_(m), state_(std::move(start)), theta_(std::asin(m.lambda())) {}

  const Vector& state() const noexcept { return state_; }
  double theta() const noexcept { return theta_; }
  std::size_t dim() const noexcept { return m_.dim(); }

  void push(Matrix u) {
    if (steps_.size() >= kMaxPathSteps) {
      throw Error(ErrorCode::planning_failed, "path exceeds the step cap");
    }
    state_ = apply_draw(m_, StepKind::hyperbolic, state_, 1.0, u);
    steps_.push_back({1.0, std::move(u)});
  }

  void push_diagonal(const Vector& d) { push(d.asDiagonal().toDenseMatrix()); }

  /// One step whose kicked state (before R) is proportional to the unit t.
  void correct_to(const Vector& t) {
    const double lambda = m_.lambda();
    const double c = state_.dot(t);
    const double floor = std::sqrt(1.0 - lambda * lambda);
    if (c < floor - 1e-12) {
      throw Error(ErrorCode::planning_failed, "correction target is out of reach");
    }
    const double alpha = c + std::sqrt(std::max(0.0, c * c - 1.0 + lambda * lambda));
    const Vector d = ((alpha * t - state_) / lambda).normalized();
    push(householder_map(state_, d));
  }

  std::vector<SteeringStep> take() { return std::move(steps_); }

 private:
  const DiagonalModel& m_;
  Vector state_;
  double theta_;
  std::vector<SteeringStep> steps_;
};

/// Rotates the state inside coordinates [lo, hi] (where R is scalar) to y.
void rotate_block(PathBuilder& b, const Vector& y, Eigen::Index lo, Eigen::Index hi) {
  const double budget = 0.9 * b.theta();
  for (;;) {
    const Vector& v = b.state();
    Vector p = Vector::Zero(v.size());
    p.segment(lo, hi - lo + 1) = v.segment(lo, hi - lo + 1);
    const double in_block = p.norm();
    if (in_block < 0.5) throw Error(ErrorCode::planning_failed, "state left the block");
    p /= in_block;
    const double rho = std::asin(std::min(1.0, (v - in_block * p).norm()));
    const double phi = angle_between(p, y);
    if (phi + rho <= budget) {
      if ((v - y).norm() > 1e-15) b.correct_to(y);
      return;
    }
    const Vector dir = p.dot(y) < -1.0 + 1e-12 ? orthogonal_in_range(p, lo, hi) : y;
    b.correct_to(rotate_toward(p, dir, std::min(phi, budget - rho)));
  }
}

void climb_hops(PathBuilder& b, const DiagonalModel& m, std::size_t from, std::size_t to,
                int sign) {
  const std::size_t n = m.dim();
  for (std::size_t i = from; i < to; ++i) {
    const std::size_t j = i + 1;
    if (!(m.lambda() > local_gap(m, i))) {
      throw Error(ErrorCode::hypothesis_violated,
                  "climb needs lambda > local gap " + std::to_string(i));
    }
    const auto ci = static_cast<Eigen::Index>(channel_coordinate(n, i));
    const auto cj = static_cast<Eigen::Index>(channel_coordinate(n, j));
    const int current = sign_of(b.state()[ci]);
    const int final_sign = j == to ? sign : 1;

    Matrix swap = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    swap(ci, ci) = 0.0;
    swap(cj, cj) = 0.0;
    swap(cj, ci) = static_cast<double>(final_sign * current);
    swap(ci, cj) = 1.0;
    b.push(std::move(swap));

    Vector flip = Vector::Ones(static_cast<Eigen::Index>(n));
    flip[ci] = -1.0;
    const std::size_t middle = climb_middle_steps(m, i);
    for (std::size_t k = 0; k < middle; ++k) b.push_diagonal(flip);

    b.correct_to(static_cast<double>(final_sign) * channel_vector(n, j));
  }
}

/// Steers the state to +-channel 1. sign = 0 accepts either sign.
void descend(PathBuilder& b, const DiagonalModel& m, int sign) {
  const std::size_t n = m.dim();
  const auto top = static_cast<Eigen::Index>(block_end(m, 1));
  const auto rest = static_cast<Eigen::Index>(n) - top;
  const auto e1 = static_cast<Eigen::Index>(n - 1);
  const double theta = b.theta();

  if (top == 1 && sign != 0) {
    const double comp = b.state()[e1];
    if (comp * sign < 0.0 && std::fabs(comp) >= kInjectMass) {
      // The sign of a one-channel top block cannot be changed from nearby;
      // leave through channel 2 and come back.
      descend(b, m, 0);
      climb_hops(b, m, 1, 2, 1);
    }
  }

  const double top_mass = b.state().tail(top).norm();
  const bool wrong_sign = top == 1 && sign != 0 && b.state()[e1] * sign <= 0.0;
  if (top_mass < kInjectMass || wrong_sign) {
    const Vector q = static_cast<double>(sign == 0 ? 1 : sign) * channel_vector(n, 1);
    b.correct_to(rotate_toward(b.state(), q, 0.9 * theta));
  }

  if (rest > 0) {
    Vector boost = Vector::Ones(static_cast<Eigen::Index>(n));
    boost.head(rest).setConstant(-1.0);
    const double threshold = std::sin(0.45 * theta);
    while (b.state().head(rest).norm() > threshold) b.push_diagonal(boost);
  }

  const int target_sign = sign != 0 ? sign : sign_of(b.state()[e1]);
  const Vector q = static_cast<double>(target_sign) * channel_vector(n, 1);
  rotate_block(b, q, rest, static_cast<Eigen::Index>(n) - 1);
}

/// Block part of w (channels K_tilde..K) as a full vector.
Vector middle_part(const Vector& w, std::size_t k, std::size_t k_tilde) {
  const std::size_t n = static_cast<std::size_t>(w.size());
  Vector mid = Vector::Zero(w.size());
  const auto lo = static_cast<Eigen::Index>(channel_coordinate(n, k));
  const auto hi = static_cast<Eigen::Index>(channel_coordinate(n, k_tilde));
  mid.segment(lo, hi - lo + 1) = w.segment(lo, hi - lo + 1);
  return mid;
}

double tail_weight(const DiagonalModel& m, const Vector& w, std::size_t k, std::size_t k_tilde,
                   std::size_t n3) {
  const std::size_t n = m.dim();
  double s = 0.0;
  for (std::size_t j = 1; j < k_tilde; ++j) {
    const double rho = std::pow(m.kappa(k) / m.kappa(j), static_cast<double>(n3));
    const double x = w[static_cast<Eigen::Index>(channel_coordinate(n, j))] * rho;
    s += x * x;
  }
  return s;
}

void require_tail_shape(const DiagonalModel& m, const Vector& w, std::size_t k,
                        std::size_t k_tilde) {
  require_degenerate(m, k, k_tilde);
  if (static_cast<std::size_t>(w.size()) != m.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "target does not match the model");
  }
  for (std::size_t j = k + 1; j <= m.dim(); ++j) {
    if (std::fabs(w[static_cast<Eigen::Index>(channel_coordinate(m.dim(), j))]) >=
        kZeroComponent) {
      throw Error(ErrorCode::invalid_argument, "target has weight above channel K");
    }
  }
  if (middle_part(w, k, k_tilde).norm() < kZeroComponent) {
    throw Error(ErrorCode::invalid_argument, "target has no weight on the block of K");
  }
}

void spread(PathBuilder& b, const DiagonalModel& m, const Vector& w, std::size_t k,
            std::size_t k_tilde) {
  const TailRoot root = find_tail_root(m, w, k, k_tilde);
  if (root.n3 == 0) return;
  const std::size_t n = m.dim();
  const double lambda = m.lambda();
  const Vector mid = middle_part(w, k, k_tilde);
  const Vector y = mid / mid.norm();

  Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
  double tail2 = 0.0;
  for (std::size_t j = 1; j < k_tilde; ++j) {
    const auto c = static_cast<Eigen::Index>(channel_coordinate(n, j));
    const double rho = std::pow(m.kappa(k) / m.kappa(j), static_cast<double>(root.n3));
    x[c] = (root.c_scaled / lambda) * w[c] * rho;
    tail2 += x[c] * x[c];
  }
  x += std::sqrt(std::max(0.0, 1.0 - tail2)) * y;
  const double norm = x.norm();
  if (std::fabs(norm - 1.0) > 1e-10) {
    throw Error(ErrorCode::orthogonal_completion_failed, "prescribed image is not a unit vector");
  }
  b.push(householder_map(b.state(), x / norm));
  const Matrix id = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t s = 1; s < root.n3; ++s) b.push(id);
}

SphereVector as_sphere(const Vector& v) { return SphereVector(v); }

}  // namespace

std::size_t channel_coordinate(std::size_t dim, std::size_t channel) {
  if (channel < 1 || channel > dim) {
    throw Error(ErrorCode::index_out_of_range, "channel outside [1, L+1]");
  }
  return dim - channel;
}

Vector channel_vector(std::size_t dim, std::size_t channel) {
  Vector e = Vector::Zero(static_cast<Eigen::Index>(dim));
  e[static_cast<Eigen::Index>(channel_coordinate(dim, channel))] = 1.0;
  return e;
}

Vector apply_path(const DiagonalModel& m, const SteeringPath& path, const Vector& v) {
  Vector state = v;
  for (const auto& st : path.steps) state = apply_draw(m, StepKind::hyperbolic, state, st.s, st.u);
  return state;
}

double path_residual(const DiagonalModel& m, const SteeringPath& path) {
  return (apply_path(m, path, path.source.coords()) - path.target.coords()).norm();
}

std::size_t climb_middle_steps(const DiagonalModel& m, std::size_t from) {
  require_channel_range(m, from);
  require_channel_range(m, from + 1);
  require_positive_lambda(m);
  const double lambda = m.lambda();
  const double ki = m.kappa(from);
  const double kj = m.kappa(from + 1);
  if (!(kj * (1.0 + lambda) > ki * (1.0 - lambda))) {
    throw Error(ErrorCode::hypothesis_violated, "climb cannot beat the local gap");
  }
  const double lhs0 = std::log(ki);
  const double rhs0 = 2.0 * std::log(lambda) + std::log(kj);
  const double lhs_rate = std::log(ki * (1.0 - lambda));
  const double rhs_rate = std::log(kj * (1.0 + lambda));
  for (std::size_t k = 0; k < kMaxPathSteps; ++k) {
    const double kk = static_cast<double>(k);
    if (lhs0 + kk * lhs_rate <= rhs0 + kk * rhs_rate) return k;
  }
  throw Error(ErrorCode::planning_failed, "climb needs too many steps");
}

SteeringPath climb_channel(const DiagonalModel& m, int sign, std::size_t from, std::size_t to) {
  require_channel_range(m, from);
  require_channel_range(m, to);
  if (sign != 1 && sign != -1) throw Error(ErrorCode::invalid_argument, "sign must be +1 or -1");
  if (from > to) throw Error(ErrorCode::invalid_order, "climb needs from <= to");
  const std::size_t n = m.dim();
  SteeringPath path{{}, as_sphere(channel_vector(n, from)),
                    as_sphere(static_cast<double>(sign) * channel_vector(n, to))};
  if (from == to) {
    if (sign != 1) {
      throw Error(ErrorCode::planning_failed, "a channel cannot be sign-flipped in place");
    }
    return path;
  }
  require_positive_lambda(m);
  require_gap_hypothesis(m);
  if (!m.radial_law().includes_one()) {
    throw Error(ErrorCode::radial_one_unavailable, "steering uses s = 1");
  }
  PathBuilder b(m, channel_vector(n, from));
  climb_hops(b, m, from, to, sign);
  path.steps = b.take();
  return path;
}

SteeringPath rotate_in_eigenspace(const DiagonalModel& m, std::size_t k, std::size_t k_tilde,
                                  const SphereVector& start, const SphereVector& target) {
  require_degenerate(m, k, k_tilde);
  if (start.dim() != m.dim() || target.dim() != m.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "vectors do not match the model");
  }
  const std::size_t n = m.dim();
  const auto lo = static_cast<Eigen::Index>(channel_coordinate(n, k));
  const auto hi = static_cast<Eigen::Index>(channel_coordinate(n, k_tilde));
  for (const auto* v : {&start, &target}) {
    const double outside = v->coords().head(lo).norm() +
                           v->coords().tail(static_cast<Eigen::Index>(n) - 1 - hi).norm();
    if (outside > kZeroComponent) {
      throw Error(ErrorCode::invalid_argument, "vector is not supported on the block");
    }
  }
  SteeringPath path{{}, start, target};
  if ((start.coords() - target.coords()).norm() < kZeroComponent) return path;
  if (k == k_tilde) {
    throw Error(ErrorCode::planning_failed,
                "a one-channel block only holds +-e_K; its sign cannot be flipped in place");
  }
  require_positive_lambda(m);
  if (!m.radial_law().includes_one()) {
    throw Error(ErrorCode::radial_one_unavailable, "block rotation uses s = 1");
  }
  PathBuilder b(m, start.coords());
  rotate_block(b, target.coords(), lo, hi);
  path.steps = b.take();
  return path;
}

SteeringPath rotate_in_eigenspace(const DiagonalModel& m, std::size_t k, std::size_t k_tilde,
                                  const SphereVector& target) {
  require_channel_range(m, k);
  return rotate_in_eigenspace(m, k, k_tilde, as_sphere(channel_vector(m.dim(), k)), target);
}

double spread_tail_f(const DiagonalModel& m, const Vector& w, std::size_t k,
                     std::size_t k_tilde, std::size_t n3, double c) {
  require_tail_shape(m, w, k, k_tilde);
  const std::size_t n = m.dim();
  const double lambda = m.lambda();
  double s = 0.0;
  for (std::size_t j = 1; j < k_tilde; ++j) {
    const double x = w[static_cast<Eigen::Index>(channel_coordinate(n, j))] /
                     std::pow(m.kappa(j), static_cast<double>(n3));
    s += x * x;
  }
  const double radicand = 1.0 - (c / lambda) * (c / lambda) * s;
  if (radicand < -1e-12) throw Error(ErrorCode::out_of_domain, "c beyond c_max(N)");
  const double scale = std::pow(m.kappa(k), static_cast<double>(n3));
  return c * middle_part(w, k, k_tilde).norm() -
         scale * (1.0 + lambda * std::sqrt(std::max(0.0, radicand)));
}

TailRoot find_tail_root(const DiagonalModel& m, const Vector& w, std::size_t k,
                        std::size_t k_tilde) {
  require_tail_shape(m, w, k, k_tilde);
  require_positive_lambda(m);
  const double lambda = m.lambda();
  const double mid = middle_part(w, k, k_tilde).norm();
  TailRoot root;
  if (tail_weight(m, w, k, k_tilde, 0) < kZeroComponent * kZeroComponent) return root;

  auto bracketed = [&](std::size_t n3) {
    return lambda * mid > std::sqrt(tail_weight(m, w, k, k_tilde, n3));
  };
  std::size_t hi = 1;
  while (!bracketed(hi)) {
    if (hi >= kMaxTailSteps) {
      throw Error(ErrorCode::no_root_in_range, "f_N has no sign change below the step cap");
    }
    hi = std::min(kMaxTailSteps, 2 * hi);
  }
  std::size_t lo = hi / 2;  // not bracketed (or 0)
  while (hi - lo > 1) {
    const std::size_t probe = lo + (hi - lo) / 2;
    (bracketed(probe) ? hi : lo) = probe;
  }
  root.n3 = hi;

  const double s = tail_weight(m, w, k, k_tilde, root.n3);
  auto g = [&](double c) {
    return c * mid - (1.0 + lambda * std::sqrt(std::max(0.0, 1.0 - c * c * s / (lambda * lambda))));
  };
  double a = 0.0;
  double bnd = lambda / std::sqrt(s);
  double c = 0.5 * (a + bnd);
  for (int it = 0; it < 400; ++it) {
    c = 0.5 * (a + bnd);
    const double gc = g(c);
    if (std::fabs(gc) < 1e-15 || bnd - a <= 1e-17 * bnd) break;
    (gc < 0.0 ? a : bnd) = c;
  }
  if (!(std::fabs(g(c)) < 1e-12)) {
    throw Error(ErrorCode::no_root_in_range, "bisection did not reach |f| < 1e-12");
  }
  root.c_scaled = c;
  return root;
}

SteeringPath spread_tail(const DiagonalModel& m, const SphereVector& w, std::size_t k,
                         std::size_t k_tilde) {
  require_tail_shape(m, w.coords(), k, k_tilde);
  const Vector mid = middle_part(w.coords(), k, k_tilde);
  SteeringPath path{{}, as_sphere(mid), w};
  if (!m.radial_law().includes_one()) {
    throw Error(ErrorCode::radial_one_unavailable, "tail construction uses s = 1");
  }
  PathBuilder b(m, path.source.coords());
  spread(b, m, w.coords(), k, k_tilde);
  path.steps = b.take();
  return path;
}

SteeringPath plan_path(const DiagonalModel& m, const SphereVector& u, const SphereVector& w) {
  if (u.dim() != m.dim() || w.dim() != m.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "vectors do not match the model");
  }
  require_positive_lambda(m);
  require_gap_hypothesis(m);
  if (!m.radial_law().includes_one()) {
    throw Error(ErrorCode::hypothesis_violated, "steering needs 1 in supp(r)");
  }
  SteeringPath path{{}, u, w};
  if ((u.coords() - w.coords()).norm() < kZeroComponent) return path;

  const std::size_t n = m.dim();
  std::size_t k = 1;
  for (std::size_t j = n; j >= 1; --j) {
    if (std::fabs(w[channel_coordinate(n, j)]) >= kZeroComponent) {
      k = j;
      break;
    }
  }
  const std::size_t k_tilde = block_start(m, k);
  // Exact zeros above K keep the tail construction clean.
  Vector target = w.coords();
  for (std::size_t j = k + 1; j <= n; ++j) target[static_cast<Eigen::Index>(channel_coordinate(n, j))] = 0.0;
  target.normalize();

  try {
    PathBuilder b(m, u.coords());
    const int wk_sign = sign_of(target[static_cast<Eigen::Index>(channel_coordinate(n, k))]);
    descend(b, m, k == 1 ? wk_sign : 0);
    if (k > 1) climb_hops(b, m, 1, k, wk_sign);
    const Vector mid = middle_part(target, k, k_tilde);
    const Vector y = mid / mid.norm();
    if (k > k_tilde) {
      rotate_block(b, y, static_cast<Eigen::Index>(channel_coordinate(n, k)),
                   static_cast<Eigen::Index>(channel_coordinate(n, k_tilde)));
    }
    if (k_tilde > 1) spread(b, m, target, k, k_tilde);
    path.steps = b.take();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::hypothesis_violated) throw;
    throw Error(ErrorCode::planning_failed, std::string("planning failed: ") + e.what());
  }
  return path;
}

}  // namespace spheredyn
