// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "spheredyn/errors.hpp"
#include "spheredyn/randomness.hpp"
#include "spheredyn/statistics.hpp"

using namespace spheredyn;

TEST_CASE("summary and batch means") {
  const std::vector<double> xs{1, 2, 3, 4};
  const Summary s = summarize(xs);
  CHECK(s.mean == 2.5);
  CHECK(s.variance == doctest::Approx(5.0 / 3));
  CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 12)));
  CHECK(summarize(std::vector<double>{}).n == 0);
  CHECK(batch_means_std_error(xs) == s.std_error);
}

TEST_CASE("empirical cdf is right-continuous step function") {
  const EmpiricalCdf f({3.0, 1.0, 2.0, 2.0});
  CHECK(f(0.5) == 0.0);
  CHECK(f(1.0) == 0.25);
  CHECK(f(1.5) == 0.25);
  CHECK(f(2.0) == 0.75);
  CHECK(f(3.0) == 1.0);
  CHECK(f(1e300) == 1.0);
  CHECK(f.sorted_samples().front() == 1.0);
  CHECK_THROWS_AS(EmpiricalCdf({}), Error);
}

TEST_CASE("DKW half-width") {
  const auto b = dkw_band(100000, 0.99);
  CHECK(b.half_width == doctest::Approx(std::sqrt(std::log(200.0) / 200000.0)));
  CHECK(dkw_band(400, 0.99).half_width == doctest::Approx(2 * dkw_band(1600, 0.99).half_width));
  CHECK_THROWS_AS(dkw_band(0, 0.99), Error);
  CHECK_THROWS_AS(dkw_band(10, 1.0), Error);
}

TEST_CASE("ks distances") {
  const EmpiricalCdf a({0.1, 0.2, 0.3, 0.4});
  CHECK(ks_distance(a, a) == 0.0);
  const EmpiricalCdf b({0.5, 0.6});
  CHECK(ks_distance(a, b) == 1.0);
  const double d = ks_distance(a, [](double x) { return x; });
  CHECK(d == doctest::Approx(0.6));
}

TEST_CASE("incomplete beta against multi-precision values") {
  CHECK(regularized_incomplete_beta(1, 2, 0.3) == doctest::Approx(0.51).epsilon(1e-13));
  CHECK(regularized_incomplete_beta(1.5, 2, 0.2) ==
        doctest::Approx(0.196773982019981508).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(0.5, 2.5, 0.7) ==
        doctest::Approx(0.981072875928054339).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(3, 1, 0.9) == doctest::Approx(0.729).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(2, 1.5, 0.05) ==
        doctest::Approx(0.00460862753638456152).epsilon(1e-12));
  CHECK_THROWS_AS(regularized_incomplete_beta(0, 1, 0.5), Error);
  CHECK_THROWS_AS(regularized_incomplete_beta(1, 1, 1.5), Error);
}

TEST_CASE("incomplete beta agrees with an independent implementation") {
  RngStream rng(13, 0);
  for (int i = 0; i < 2000; ++i) {
    const double a = 0.5 * (1 + std::floor(rng.uniform() * 12));
    const double b = 0.5 * (1 + std::floor(rng.uniform() * 12));
    const double x = rng.uniform();
    const double expected = boost::math::ibeta(a, b, x);
    REQUIRE(regularized_incomplete_beta(a, b, x) ==
            doctest::Approx(expected).epsilon(1e-12).scale(1e-300));
  }
}

TEST_CASE("beta law of |c|^2") {
  const Partition p(2, 2, 2);
  CHECK(beta_cdf_c_norm(p, 0.0) == 0.0);
  CHECK(beta_cdf_c_norm(p, 1.0) == 1.0);
  CHECK(beta_cdf_c_norm(p, 0.5) == doctest::Approx(0.75).epsilon(1e-14));
  for (double d = 0.01; d < 1.0; d += 0.01) {
    REQUIRE(beta_cdf_c_norm(p, d) == doctest::Approx(2 * d - d * d).epsilon(1e-13));
  }
  CHECK_THROWS_AS(beta_cdf_c_norm(p, -0.1), Error);

  CHECK(beta_cdf_upper_bound(p, 0.1) == doctest::Approx(0.4425).epsilon(1e-13));
  for (const Partition& q : {Partition(2, 2, 2), Partition(1, 2, 3), Partition(3, 1, 2),
                             Partition(2, 1, 1), Partition(4, 3, 1)}) {
    for (double d = 0.0; d <= 1.0; d += 0.005) {
      REQUIRE(beta_cdf_c_norm(q, d) <= beta_cdf_upper_bound(q, d) + 1e-14);
    }
  }
  CHECK_THROWS_AS(beta_cdf_upper_bound(Partition(1, 1, 3), 0.1), Error);

  RngStream rng(17, 0);
  const int n = 50000;
  std::vector<double> c2(n);
  for (auto& x : c2) x = part_norms(sample_uniform_sphere(6, rng), p).c2;
  const EmpiricalCdf cdf(c2);
  CHECK(ks_distance(cdf, [&](double d) { return beta_cdf_c_norm(p, d); }) <
        dkw_band(n, 0.99).half_width);
}

TEST_CASE("projected density") {
  for (double x : {-0.9, -0.3, 0.0, 0.5, 1.0}) {
    CHECK(projected_measure_density(2, x) == doctest::Approx(0.5).epsilon(1e-14));
  }
  CHECK(projected_measure_density(5, 0.3) ==
        doctest::Approx(0.736853156140396240).epsilon(1e-13));
  CHECK(projected_measure_density(3, 0.5) ==
        doctest::Approx(0.551328895421792018).epsilon(1e-13));
  CHECK(projected_measure_density(5, 0.4) == projected_measure_density(5, -0.4));
  for (std::size_t dim : {2u, 3u, 5u, 9u}) {
    // Composite Simpson on [-1, 1].
    const int n = 20000;
    const double h = 2.0 / n;
    double sum = projected_measure_density(dim, -1) + projected_measure_density(dim, 1);
    for (int k = 1; k < n; ++k) {
      sum += (k % 2 ? 4.0 : 2.0) * projected_measure_density(dim, -1 + k * h);
    }
    // L = 3 has a square-root singularity in its derivative at the ends.
    CHECK(sum * h / 3 == doctest::Approx(1.0).epsilon(dim == 3 ? 1e-6 : 1e-10));
  }
  CHECK_THROWS_AS(projected_measure_density(5, 1.5), Error);
}

TEST_CASE("overlap transform G") {
  CHECK(z_statistic_transform(0.3, 0.0, 0.7) == 1.0);
  CHECK(z_statistic_transform(0.3, 1.0, -1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(z_statistic_transform(0.6, 1.0, 0.0) ==
        doctest::Approx(0.857492925712544156).epsilon(1e-14));
  // dG/dy has the sign of y + lambda r: G falls to sqrt(1 - lambda^2 r^2) at
  // y = -lambda r and rises from there to 1.
  for (double lambda : {0.05, 0.25, 0.6, 0.9}) {
    for (double r : {0.5, 1.0}) {
      const double turn = -lambda * r;
      CHECK(z_statistic_transform(lambda, r, turn) ==
            doctest::Approx(std::sqrt(1 - turn * turn)).epsilon(1e-14));
      double prev = 2.0;
      for (double y = -1.0; y <= turn; y += 1e-3) {
        const double g = z_statistic_transform(lambda, r, y);
        REQUIRE(g <= prev + 1e-15);
        prev = g;
      }
      prev = -1.0;
      for (double y = turn; y <= 1.0; y += 1e-3) {
        const double g = z_statistic_transform(lambda, r, y);
        REQUIRE(g >= prev - 1e-15);
        REQUIRE(g >= std::sqrt(1 - lambda * lambda) - 1e-15);
        REQUIRE(g <= 1.0 + 1e-15);
        prev = g;
      }
    }
  }
  CHECK_THROWS_AS(z_statistic_transform(0.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(z_statistic_transform(0.5, 1.5, 0.0), Error);
}

TEST_CASE("stochastic order verdicts") {
  RngStream rng(21, 0);
  std::vector<double> lo(20000), hi(20000);
  for (auto& x : lo) x = rng.uniform();
  for (auto& x : hi) x = std::sqrt(rng.uniform());
  const EmpiricalCdf flo(lo), fhi(hi);
  CHECK(stochastic_order_test(flo, flo, 0.99).ordered);
  CHECK(stochastic_order_test(fhi, flo, 0.99).ordered);
  const auto reversed = stochastic_order_test(flo, fhi, 0.99);
  CHECK_FALSE(reversed.ordered);
  // sup (x - x^2) = 1/4 at x = 1/2.
  CHECK(reversed.max_excess > 0.2);
  CHECK(reversed.at == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("product-moment inequality on empirical measures") {
  RngStream rng(23, 0);
  const Partition p(2, 2, 2);
  std::vector<PartNorms> samples;
  for (int i = 0; i < 10000; ++i) samples.push_back(part_norms(sample_uniform_sphere(6, rng), p));
  for (double delta : {0.0, 0.1, 0.3, 0.7, 1.0}) {
    CHECK(check_product_moment_inequality(samples, delta).holds);
  }
  const auto zero = check_product_moment_inequality(samples, 0.0);
  CHECK(zero.rhs == 0.0);
  const std::vector<PartNorms> pure_c(10, PartNorms{0, 0, 1});
  const auto eq = check_product_moment_inequality(pure_c, 0.4);
  CHECK(eq.lhs == 0.0);
  CHECK(eq.rhs == 0.0);
  CHECK(eq.holds);
  CHECK_THROWS_AS(check_product_moment_inequality(std::vector<PartNorms>{}, 0.1), Error);
}

TEST_CASE("drift bound") {
  const DiagonalModel m({2, 2, 2, 1, 1, 1}, Partition(2, 2, 2), 0.25);
  RngStream rng(29, 0);
  const auto res = drift_bound_test(m, SphereVector::basis(6, 5), 100000, rng);
  CHECK(res.bound == doctest::Approx(0.0625));
  CHECK(res.holds);
  RngStream rng2(29, 1);
  const SphereVector v(sample_uniform_sphere(6, rng2));
  const auto r2 = drift_bound_test(m, v, 50000, rng2);
  CHECK(r2.holds);
  CHECK(r2.bound == doctest::Approx(part_norms(v, m.partition()).a2 + 0.0625));
  CHECK_THROWS_AS(drift_bound_test(m.with_lambda(0.3), v, 100, rng2), Error);
  const DiagonalModel small({2, 1, 1}, Partition(1, 1, 1), 0.1);
  CHECK_THROWS_AS(drift_bound_test(small, SphereVector{1, 0, 0}, 100, rng2), Error);
}

TEST_CASE("chi-square helpers") {
  const std::vector<std::size_t> obs{10, 20, 30};
  const std::vector<double> exp{20, 20, 20};
  CHECK(chi_square_statistic(obs, exp) == doctest::Approx(10.0));
  // P(chi2_2 >= x) = exp(-x / 2).
  CHECK(chi_square_survival(10.0, 2.0) == doctest::Approx(std::exp(-5.0)).epsilon(1e-13));
  CHECK_THROWS_AS(chi_square_statistic(obs, std::vector<double>{1, 2}), Error);
}
