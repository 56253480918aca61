// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

#include "spheredyn/model.hpp"
#include "spheredyn/rng.hpp"

namespace spheredyn {

/// One realization (r, U) of the perturbation 1 + lambda r U.
struct PerturbationDraw {
  double r = 1.0;
  Matrix u;
};

/// max |U^T U - I| entry.
double orthogonality_defect(const Matrix& u);

/*
 * Haar-distributed element of O(dim).
 *
 * Gaussian matrix, Householder QR, then Q := Q diag(sign R_jj). Without the
 * sign fix Q is orthogonal but not Haar (its law depends on the QR sign
 * convention); with it, Q has exactly the Haar law on both components of O(dim).
 */
Matrix sample_haar_orthogonal(std::size_t dim, RngStream& rng);

/// Uniform point on S^{dim-1} (normalized Gaussian vector).
Vector sample_uniform_sphere(std::size_t dim, RngStream& rng);

/// r from the model's radial law, then U from Haar; r is drawn first.
PerturbationDraw sample_perturbation(const DiagonalModel& m, RngStream& rng);

/// R (1 + lambda r U).
Matrix assemble_transfer(const DiagonalModel& m, const PerturbationDraw& d);

enum class HaarMoment {
  a_norm,       ///< E |a(Uv)|^2
  z_sq,         ///< E <v, Uv>^2
  a_norm_z_sq,  ///< E |a(Uv)|^2 <v, Uv>^2
  cross,        ///< E <a(Uv), a(v)> <v, Uv>
};

/// Parses "a_norm", "z_sq", "a_norm_z_sq", "cross"; throws UnknownKind.
HaarMoment haar_moment_from_string(std::string_view name);
std::string_view to_string(HaarMoment kind) noexcept;

/// Closed-form Haar average of the given kind.
double haar_moment_oracle(HaarMoment kind, const Partition& p, const Vector& v);
double haar_moment_oracle(HaarMoment kind, const DiagonalModel& m,
                          const SphereVector& v);

/// The integrand of `kind` for one image x = U v; Monte Carlo averages of this
/// over Haar U estimate haar_moment_oracle.
double haar_moment_integrand(HaarMoment kind, const Partition& p,
                             const Vector& v, const Vector& uv);

}  // namespace spheredyn
