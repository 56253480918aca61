// SPDX-License-Identifier: Apache-2.0
#include "spheredyn/randomness.hpp"

#include <cmath>
#include <string>

#include "spheredyn/errors.hpp"

namespace spheredyn {

double orthogonality_defect(const Matrix& u) {
  const Matrix gram = u.transpose() * u;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

Matrix sample_haar_orthogonal(std::size_t dim, RngStream& rng) {
  if (dim < 2) {
    throw Error(ErrorCode::invalid_argument, "Haar sampling needs dim >= 2");
  }
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix gauss(n, n);
  // Column-major fill; the order is part of the reproducibility contract.
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) gauss(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  const Matrix& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (packed(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Vector sample_uniform_sphere(std::size_t dim, RngStream& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  Vector x(n);
  double norm2 = 0.0;
  do {
    for (Eigen::Index j = 0; j < n; ++j) x[j] = rng.normal();
    norm2 = x.squaredNorm();
  } while (!(norm2 > 0.0));
  x /= std::sqrt(norm2);
  return x;
}

PerturbationDraw sample_perturbation(const DiagonalModel& m, RngStream& rng) {
  PerturbationDraw draw;
  draw.r = m.radial_law().sample(rng);
  draw.u = sample_haar_orthogonal(m.dim(), rng);
  return draw;
}

Matrix assemble_transfer(const DiagonalModel& m, const PerturbationDraw& d) {
  const auto n = static_cast<Eigen::Index>(m.dim());
  if (d.u.rows() != n || d.u.cols() != n) {
    throw Error(ErrorCode::dimension_mismatch, "perturbation has wrong size");
  }
  Matrix kick = Matrix::Identity(n, n) + (m.lambda() * d.r) * d.u;
  return m.r_diagonal().asDiagonal() * kick;
}

HaarMoment haar_moment_from_string(std::string_view name) {
  if (name == "a_norm") return HaarMoment::a_norm;
  if (name == "z_sq") return HaarMoment::z_sq;
  if (name == "a_norm_z_sq") return HaarMoment::a_norm_z_sq;
  if (name == "cross") return HaarMoment::cross;
  throw Error(ErrorCode::unknown_kind,
              "unknown Haar moment kind '" + std::string(name) + "'");
}

std::string_view to_string(HaarMoment kind) noexcept {
  switch (kind) {
    case HaarMoment::a_norm: return "a_norm";
    case HaarMoment::z_sq: return "z_sq";
    case HaarMoment::a_norm_z_sq: return "a_norm_z_sq";
    case HaarMoment::cross: return "cross";
  }
  return "unknown";
}

double haar_moment_oracle(HaarMoment kind, const Partition& p, const Vector& v) {
  const double n = static_cast<double>(p.dim());  // L + 1
  const double la = static_cast<double>(p.l_a());
  const double a2 = part_norms(v, p).a2;
  switch (kind) {
    case HaarMoment::a_norm: return la / n;
    case HaarMoment::z_sq: return 1.0 / n;
    case HaarMoment::a_norm_z_sq: return (la + 2.0 * a2) / (n * (n + 2.0));
    case HaarMoment::cross: return a2 / n;
  }
  throw Error(ErrorCode::unknown_kind, "unknown Haar moment kind");
}

double haar_moment_oracle(HaarMoment kind, const DiagonalModel& m,
                          const SphereVector& v) {
  return haar_moment_oracle(kind, m.partition(), v.coords());
}

double haar_moment_integrand(HaarMoment kind, const Partition& p,
                             const Vector& v, const Vector& uv) {
  const auto la = static_cast<Eigen::Index>(p.l_a());
  const double z = v.dot(uv);
  switch (kind) {
    case HaarMoment::a_norm: return uv.head(la).squaredNorm();
    case HaarMoment::z_sq: return z * z;
    case HaarMoment::a_norm_z_sq: return uv.head(la).squaredNorm() * z * z;
    case HaarMoment::cross: return uv.head(la).dot(v.head(la)) * z;
  }
  throw Error(ErrorCode::unknown_kind, "unknown Haar moment kind");
}

}  // namespace spheredyn
