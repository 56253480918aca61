// SPDX-License-Identifier: Apache-2.0
#include "spheredyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spheredyn/errors.hpp"

namespace spheredyn {
namespace {

constexpr double kUnderflowNorm = 1e-300;

Vector normalized_or_throw(Vector coords) {
  if (!coords.allFinite()) {
    throw Error(ErrorCode::out_of_domain, "sphere vector has non-finite entries");
  }
  const double norm = coords.norm();
  if (!(norm > kUnderflowNorm)) {
    throw Error(ErrorCode::out_of_domain, "cannot normalize a zero vector");
  }
  coords /= norm;
  return coords;
}

void require_channel(std::size_t i, std::size_t max) {
  if (i < 1 || i > max) {
    throw Error(ErrorCode::index_out_of_range,
                "channel index " + std::to_string(i) + " outside [1, " +
                    std::to_string(max) + "]");
  }
}

void require_theorem2_hypotheses(const DiagonalModel& m, double gamma) {
  if (!m.partition().well_separated()) {
    throw Error(ErrorCode::partition_not_separated,
                "bound needs (L_a, L_b) != (1, 1)");
  }
  if (!(gamma > 0.0)) {
    throw Error(ErrorCode::gap_is_zero, "macroscopic gap gamma vanishes");
  }
  if (!(m.lambda() > 0.0 && m.lambda() <= 0.25)) {
    throw Error(ErrorCode::hypothesis_violated, "bound needs 0 < lambda <= 1/4");
  }
}

}  // namespace

SphereVector::SphereVector(Vector coords)
    : coords_(normalized_or_throw(std::move(coords))) {
  if (coords_.size() < 3) {
    throw Error(ErrorCode::dimension_mismatch,
                "sphere vectors need dimension L+1 >= 3");
  }
}

SphereVector::SphereVector(std::initializer_list<double> coords)
    : SphereVector(Vector(Eigen::Map<const Vector>(
          coords.begin(), static_cast<Eigen::Index>(coords.size())))) {}

SphereVector SphereVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) {
    throw Error(ErrorCode::index_out_of_range, "basis index outside dimension");
  }
  Vector e = Vector::Zero(static_cast<Eigen::Index>(dim));
  e[static_cast<Eigen::Index>(index)] = 1.0;
  return SphereVector(std::move(e));
}

Partition::Partition(std::size_t l_a, std::size_t l_b, std::size_t l_c)
    : l_a_(l_a), l_b_(l_b), l_c_(l_c) {
  if (l_a == 0 || l_b == 0 || l_c == 0) {
    throw Error(ErrorCode::invalid_argument, "partition parts must be >= 1");
  }
}

DiagonalModel::DiagonalModel(std::vector<double> kappas, Partition partition,
                             double lambda, RadialLaw radial_law)
    : kappas_(std::move(kappas)),
      partition_(partition),
      lambda_(lambda),
      radial_law_(std::move(radial_law)) {
  if (kappas_.size() < 3) {
    throw Error(ErrorCode::dimension_mismatch, "model needs L+1 >= 3 channels");
  }
  if (partition_.dim() != kappas_.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "partition sizes must add up to L+1");
  }
  for (std::size_t i = 0; i < kappas_.size(); ++i) {
    if (!(kappas_[i] > 0.0) || !std::isfinite(kappas_[i])) {
      throw Error(ErrorCode::invalid_argument, "kappas must be finite and > 0");
    }
    if (i > 0 && kappas_[i] > kappas_[i - 1]) {
      throw Error(ErrorCode::invalid_argument,
                  "kappas must be non-increasing (kappa_1 >= kappa_2 >= ...)");
    }
  }
  if (!(lambda_ >= 0.0 && lambda_ < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "lambda must lie in [0, 1)");
  }
  const auto n = static_cast<Eigen::Index>(kappas_.size());
  r_diag_.resize(n);
  // Component j (0-based) carries kappa_{L+1-j} (1-based), i.e. kappas_[n-1-j].
  for (Eigen::Index j = 0; j < n; ++j) {
    r_diag_[j] = kappas_[static_cast<std::size_t>(n - 1 - j)];
  }
}

double DiagonalModel::kappa(std::size_t i) const {
  if (i < 1 || i > kappas_.size()) {
    throw Error(ErrorCode::index_out_of_range, "kappa index out of range");
  }
  return kappas_[i - 1];
}

Matrix DiagonalModel::r_matrix() const { return r_diag_.asDiagonal(); }

DiagonalModel DiagonalModel::with_lambda(double lambda) const {
  return DiagonalModel(kappas_, partition_, lambda, radial_law_);
}

DiagonalModel DiagonalModel::with_partition(Partition partition) const {
  return DiagonalModel(kappas_, partition, lambda_, radial_law_);
}

Vector project_action(const Matrix& matrix, const Vector& v) {
  if (matrix.cols() != v.size() || matrix.rows() != v.size()) {
    throw Error(ErrorCode::dimension_mismatch, "matrix and vector sizes differ");
  }
  Vector image = matrix * v;
  const double norm = image.norm();
  if (!(norm > kUnderflowNorm)) {
    throw Error(ErrorCode::near_singular_action,
                "|T v| underflows; the matrix is not invertible on this vector");
  }
  image /= norm;
  return image;
}

SphereVector project_action(const Matrix& matrix, const SphereVector& v) {
  return SphereVector(project_action(matrix, v.coords()));
}

PartNorms part_norms(const Vector& v, const Partition& p) {
  if (static_cast<std::size_t>(v.size()) != p.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "vector dimension does not match partition");
  }
  const auto la = static_cast<Eigen::Index>(p.l_a());
  const auto lc = static_cast<Eigen::Index>(p.l_c());
  PartNorms out;
  out.a2 = v.head(la).squaredNorm();
  out.c2 = v.tail(lc).squaredNorm();
  out.b2 = std::max(0.0, 1.0 - out.a2 - out.c2);
  return out;
}

PartNorms part_norms(const SphereVector& v, const Partition& p) {
  return part_norms(v.coords(), p);
}

double upper_projection_norm2(const Vector& v, std::size_t i) {
  const auto n = static_cast<std::size_t>(v.size());
  if (i < 1 || i >= n) {
    throw Error(ErrorCode::index_out_of_range, "projection index outside [1, L]");
  }
  return v.head(static_cast<Eigen::Index>(n - i)).squaredNorm();
}

double local_gap(const DiagonalModel& m, std::size_t i) {
  require_channel(i, m.sphere_dim());
  return (m.kappa(i) - m.kappa(i + 1)) / m.kappa(i + 1);
}

double channel_gap(const DiagonalModel& m, std::size_t i, std::size_t j) {
  require_channel(i, m.dim());
  require_channel(j, m.dim());
  if (i >= j) {
    throw Error(ErrorCode::invalid_order, "channel_gap needs i < j");
  }
  return (m.kappa(i) - m.kappa(j)) / m.kappa(j);
}

double max_local_gap(const DiagonalModel& m) {
  double best = 0.0;
  for (std::size_t i = 1; i <= m.sphere_dim(); ++i) {
    best = std::max(best, local_gap(m, i));
  }
  return best;
}

double macroscopic_gap(const DiagonalModel& m) {
  const auto& p = m.partition();
  const double upper = m.kappa(p.l_c());
  const double lower = m.kappa(p.l_b() + p.l_c() + 1);
  const double raw = upper * upper / (lower * lower) - 1.0;
  return std::clamp(raw, 0.0, 1.0);
}

double theorem2_rhs(const DiagonalModel& m) {
  const double gamma = macroscopic_gap(m);
  require_theorem2_hypotheses(m, gamma);
  const auto& p = m.partition();
  const double dim = static_cast<double>(m.dim());
  const double la = static_cast<double>(p.l_a());
  const double lab = static_cast<double>(p.l_a() + p.l_b());
  const double lc = static_cast<double>(p.l_c());
  const double lam = m.lambda();
  const double geometric = std::pow(dim / lab, (lab - 2.0) / (lc + 2.0));
  const double drift = std::pow((6.0 / gamma) * (la / lc) * lam * lam,
                                lc / (lc + 2.0));
  return 2.0 * geometric * drift;
}

double theorem2_threshold_d(const DiagonalModel& m) {
  const double gamma = macroscopic_gap(m);
  require_theorem2_hypotheses(m, gamma);
  const auto& p = m.partition();
  const double dim = static_cast<double>(m.dim());
  const double la = static_cast<double>(p.l_a());
  const double lab = static_cast<double>(p.l_a() + p.l_b());
  const double lc = static_cast<double>(p.l_c());
  const double lam = m.lambda();
  return (lc / dim) *
         std::pow(6.0 * lam * lam * la / (gamma * lc), 2.0 / (lc + 2.0)) *
         std::pow(lab / dim, (lab - 2.0) / (lc + 2.0));
}

ContractionCheck check_deterministic_contraction(const DiagonalModel& m,
                                                 const SphereVector& v) {
  if (v.dim() != m.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "vector does not match model");
  }
  const Vector image = m.r_diagonal().cwiseProduct(v.coords()).normalized();
  const PartNorms before = part_norms(v, m.partition());
  const PartNorms after = part_norms(image, m.partition());
  ContractionCheck out;
  out.lhs = after.a2;
  out.rhs = (1.0 - before.c2 * macroscopic_gap(m) / 2.0) * before.a2;
  out.holds = out.lhs <= out.rhs + 1e-12;
  return out;
}

std::optional<Interval> forbidden_annulus(const DiagonalModel& m, std::size_t i) {
  const double gap = std::min(local_gap(m, i), 0.5);
  if (!(m.lambda() < gap / 16.0)) return std::nullopt;
  const double s = std::sqrt(1.0 - 16.0 * m.lambda() / gap);
  if (!(s > 0.0)) return std::nullopt;
  return Interval{(1.0 - s) / 2.0, (1.0 + s) / 2.0};
}

}  // namespace spheredyn
