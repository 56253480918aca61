// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "spheredyn/errors.hpp"
#include "spheredyn/model.hpp"
#include "spheredyn/randomness.hpp"

using namespace spheredyn;

namespace {

DiagonalModel reference_model(double lambda = 0.1) {
  return DiagonalModel({2, 2, 2, 1, 1, 1}, Partition(2, 2, 2), lambda);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("sphere vectors normalize") {
  SphereVector v{3.0, 4.0, 0.0};
  CHECK(v[0] == doctest::Approx(0.6));
  CHECK(v[1] == doctest::Approx(0.8));
  CHECK(v.coords().norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(SphereVector::basis(4, 2)[2] == 1.0);
  CHECK(code_of([] { SphereVector({0.0, 0.0, 0.0}); }) == ErrorCode::out_of_domain);
  CHECK(code_of([] { SphereVector({1.0, 0.0}); }) == ErrorCode::dimension_mismatch);
}

TEST_CASE("model validation") {
  CHECK(code_of([] { DiagonalModel({1, 2, 1}, Partition(1, 1, 1), 0.1); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([] { DiagonalModel({2, 1, 1}, Partition(1, 1, 2), 0.1); }) ==
        ErrorCode::dimension_mismatch);
  CHECK(code_of([] { DiagonalModel({2, 1, 1}, Partition(1, 1, 1), 1.0); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([] { Partition(0, 1, 2); }) == ErrorCode::invalid_argument);
  const auto m = reference_model();
  CHECK(m.sphere_dim() == 5);
  CHECK(m.kappa(1) == 2.0);
  CHECK(m.kappa(6) == 1.0);
  // R = diag(kappa_{L+1}, ..., kappa_1): the last coordinate carries kappa_1.
  CHECK(m.r_diagonal()[0] == 1.0);
  CHECK(m.r_diagonal()[5] == 2.0);
}

TEST_CASE("projective action") {
  Matrix t(2, 2);
  t << 2, 0, 0, 1;
  Vector v(2);
  v << 1, 1;
  const Vector w = project_action(t, v);
  CHECK(w[0] == doctest::Approx(2.0 / std::sqrt(5.0)));
  CHECK(w[1] == doctest::Approx(1.0 / std::sqrt(5.0)));

  Matrix singular = Matrix::Zero(3, 3);
  singular(0, 0) = 1.0;
  CHECK(code_of([&] { project_action(singular, SphereVector{0, 1, 0}); }) ==
        ErrorCode::near_singular_action);

  // Scale invariance: (c T) . v = T . v.
  RngStream rng(3, 0);
  const Matrix a = Matrix::Identity(5, 5) + 0.3 * sample_haar_orthogonal(5, rng);
  const Vector x = sample_uniform_sphere(5, rng);
  CHECK((project_action(a, x) - project_action(7.5 * a, x)).norm() < 1e-14);
  // Composition: (AB) . v = A . (B . v).
  const Matrix b = Matrix::Identity(5, 5) + 0.2 * sample_haar_orthogonal(5, rng);
  CHECK((project_action(a * b, x) - project_action(a, project_action(b, x))).norm() < 1e-14);
}

TEST_CASE("part norms and gaps") {
  const auto m = reference_model();
  SphereVector v{1, 1, 1, 1, 1, 1};
  const auto pn = part_norms(v, m.partition());
  CHECK(pn.a2 == doctest::Approx(1.0 / 3));
  CHECK(pn.b2 == doctest::Approx(1.0 / 3));
  CHECK(pn.c2 == doctest::Approx(1.0 / 3));
  CHECK(upper_projection_norm2(v.coords(), 1) == doctest::Approx(5.0 / 6));

  CHECK(local_gap(m, 3) == doctest::Approx(1.0));
  CHECK(local_gap(m, 1) == 0.0);
  CHECK(channel_gap(m, 1, 6) == doctest::Approx(1.0));
  CHECK(code_of([&] { channel_gap(m, 3, 3); }) == ErrorCode::invalid_order);
  CHECK(code_of([&] { local_gap(m, 6); }) == ErrorCode::index_out_of_range);
  CHECK(max_local_gap(m) == doctest::Approx(1.0));
  CHECK(macroscopic_gap(m) == 1.0);

  const DiagonalModel soft({1.3, 1.2, 1.1, 1.05, 1.0, 1.0}, Partition(2, 2, 2), 0.1);
  CHECK(macroscopic_gap(soft) == doctest::Approx(0.44));
  const DiagonalModel flat({1, 1, 1, 1, 1, 1}, Partition(2, 2, 2), 0.1);
  CHECK(macroscopic_gap(flat) == 0.0);
}

TEST_CASE("bound quantities against high-precision values") {
  // Values from an independent multi-precision evaluation of the closed forms.
  CHECK(theorem2_rhs(reference_model(0.1)) == doctest::Approx(0.6).epsilon(1e-13));
  CHECK(theorem2_rhs(reference_model(0.05)) == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(theorem2_rhs(reference_model(0.25)) == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(theorem2_threshold_d(reference_model(0.1)) ==
        doctest::Approx(0.0666666666666666731).epsilon(1e-13));

  const DiagonalModel soft({1.3, 1.2, 1.1, 1.05, 1.0, 1.0}, Partition(2, 2, 2), 0.1);
  CHECK(theorem2_rhs(soft) == doctest::Approx(0.904534033733291065).epsilon(1e-12));
  CHECK(theorem2_threshold_d(soft) == doctest::Approx(0.100503781525921229).epsilon(1e-12));

  const DiagonalModel skew({3, 2.5, 2, 1.5, 1, 0.5}, Partition(1, 2, 3), 0.2);
  CHECK(theorem2_rhs(skew) == doctest::Approx(0.504765875584154658).epsilon(1e-12));
  CHECK(theorem2_threshold_d(skew) == doctest::Approx(0.158489319246111361).epsilon(1e-12));
}

TEST_CASE("bound equals the optimized drift/escape ratio at d") {
  // Independent route: the bound is 2 M(d) / (gamma d) where M(delta) adds the
  // drift term to the beta tail bound without its (1 - delta/6) factor.
  for (double lambda : {0.05, 0.1, 0.2}) {
    for (const auto& [kappas, part] :
         {std::pair{std::vector<double>{2, 2, 2, 1, 1, 1}, Partition(2, 2, 2)},
          std::pair{std::vector<double>{3, 2.5, 2, 1.5, 1, 0.5}, Partition(1, 2, 3)},
          std::pair{std::vector<double>{1.3, 1.2, 1.1, 1.05, 1.0, 1.0}, Partition(2, 2, 2)},
          std::pair{std::vector<double>{4, 3, 3, 2, 2, 1, 1}, Partition(3, 2, 2)}}) {
      const DiagonalModel m(kappas, part, lambda);
      const double gamma = macroscopic_gap(m);
      const double d = theorem2_threshold_d(m);
      const double dim = static_cast<double>(m.dim());
      const double la = static_cast<double>(part.l_a());
      const double lab = static_cast<double>(part.l_a() + part.l_b());
      const double lc = static_cast<double>(part.l_c());
      const double md = 3 * lambda * lambda * la / dim +
                        gamma * lc / (2 * dim) * std::pow(dim / lab, lab / 2 - 1) *
                            std::pow(dim * d / lc, lc / 2 + 1);
      CHECK(2 * md / (gamma * d) == doctest::Approx(theorem2_rhs(m)).epsilon(1e-12));
    }
  }
}

TEST_CASE("bound hypotheses") {
  const DiagonalModel pinched({2, 2, 1}, Partition(1, 1, 1), 0.1);
  CHECK(code_of([&] { theorem2_rhs(pinched); }) == ErrorCode::partition_not_separated);
  const DiagonalModel flat({1, 1, 1, 1, 1, 1}, Partition(2, 2, 2), 0.1);
  CHECK(code_of([&] { theorem2_rhs(flat); }) == ErrorCode::gap_is_zero);
  CHECK(code_of([] { theorem2_rhs(reference_model(0.3)); }) == ErrorCode::hypothesis_violated);
  CHECK(code_of([] { theorem2_threshold_d(reference_model(0.0)); }) ==
        ErrorCode::hypothesis_violated);
}

TEST_CASE("deterministic contraction holds on random vectors") {
  RngStream rng(11, 0);
  for (const auto& m : {reference_model(),
                        DiagonalModel({1.3, 1.2, 1.1, 1.05, 1.0, 1.0}, Partition(2, 2, 2), 0.1),
                        DiagonalModel({3, 2.5, 2, 1.5, 1, 0.5}, Partition(1, 2, 3), 0.1)}) {
    for (int i = 0; i < 2000; ++i) {
      const SphereVector v(sample_uniform_sphere(m.dim(), rng));
      REQUIRE(check_deterministic_contraction(m, v).holds);
    }
  }
  const auto m = reference_model();
  const auto at_fixed_point = check_deterministic_contraction(m, SphereVector::basis(6, 5));
  CHECK(at_fixed_point.lhs == 0.0);
  CHECK(at_fixed_point.holds);
}

TEST_CASE("forbidden annulus") {
  const DiagonalModel m({2, 1, 1, 1, 1, 1}, Partition(2, 2, 2), 1.0 / 64);
  const auto band = forbidden_annulus(m, 1);
  REQUIRE(band.has_value());
  // delta' = 1/2, s = sqrt(1 - 16 lambda / delta') = sqrt(1/2).
  CHECK(band->lower == doctest::Approx((1 - std::sqrt(0.5)) / 2).epsilon(1e-14));
  CHECK(band->upper == doctest::Approx((1 + std::sqrt(0.5)) / 2).epsilon(1e-14));
  CHECK(band->contains(0.5));
  CHECK_FALSE(band->contains(band->lower));
  CHECK(band->contains(band->upper));
  CHECK_FALSE(forbidden_annulus(m.with_lambda(0.05), 1).has_value());
  CHECK_FALSE(forbidden_annulus(m, 2).has_value());
}
