// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "spheredyn/errors.hpp"
#include "spheredyn/randomness.hpp"
#include "spheredyn/reachability.hpp"

using namespace spheredyn;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::invalid_argument;
}

void check_path_shape(const DiagonalModel& m, const SteeringPath& path) {
  for (const auto& st : path.steps) {
    REQUIRE(orthogonality_defect(st.u) < 1e-10);
    REQUIRE(m.radial_law().in_support(st.s));
  }
}

SphereVector from(const Vector& v) { return SphereVector(v); }

}  // namespace

TEST_CASE("channel numbering") {
  CHECK(channel_coordinate(6, 1) == 5);
  CHECK(channel_coordinate(6, 6) == 0);
  CHECK(channel_vector(4, 2)[2] == 1.0);
  CHECK_THROWS_AS(channel_coordinate(6, 0), Error);
}

TEST_CASE("climb step count matches a direct search") {
  const DiagonalModel m({1.1, 1, 1, 1, 1, 1}, Partition(2, 2, 2), 0.25);
  // Direct search in Python over m: (1.1 * 0.75)^m * 1.1 <= 0.25^2 * 1.25^m.
  CHECK(climb_middle_steps(m, 1) == 7);
  // Degenerate pair: kappa_i = kappa_j.
  std::size_t brute = 0;
  while (std::pow(0.75, brute) > 0.0625 * std::pow(1.25, brute)) ++brute;
  CHECK(climb_middle_steps(m, 2) == brute);
}

TEST_CASE("climb_channel reaches the next channel") {
  const DiagonalModel m({1.1, 1, 1, 1, 1, 1}, Partition(2, 2, 2), 0.25);
  const auto empty = climb_channel(m, 1, 3, 3);
  CHECK(empty.size() == 0);
  for (int sign : {1, -1}) {
    const auto path = climb_channel(m, sign, 1, 2);
    CHECK(path.size() == 7 + 2);
    check_path_shape(m, path);
    CHECK(path_residual(m, path) < 1e-8);
    CHECK(path.target[channel_coordinate(6, 2)] == static_cast<double>(sign));
  }
  const auto chain = climb_channel(m, -1, 1, 6);
  check_path_shape(m, chain);
  CHECK(path_residual(m, chain) < 1e-8);

  const DiagonalModel tight({2, 1, 1, 1, 1, 1}, Partition(2, 2, 2), 0.25);
  CHECK(code_of([&] { climb_channel(tight, 1, 1, 2); }) == ErrorCode::hypothesis_violated);
}

TEST_CASE("rotation inside a degenerate block") {
  const DiagonalModel m({1.1, 1, 1, 1, 1, 1}, Partition(2, 2, 2), 0.25);
  Vector t = channel_vector(6, 3) + channel_vector(6, 2);
  const auto path = rotate_in_eigenspace(m, 3, 2, from(t));
  check_path_shape(m, path);
  CHECK(path_residual(m, path) < 1e-8);
  // Every factor is the identity off the block.
  for (const auto& st : path.steps) {
    for (std::size_t j : {1u, 4u, 5u, 6u}) {
      const auto c = static_cast<Eigen::Index>(channel_coordinate(6, j));
      REQUIRE(std::fabs(st.u(c, c) - 1.0) < 1e-12);
    }
  }
  // Antipodal target in a larger block.
  const auto flip = rotate_in_eigenspace(m, 6, 2, from(channel_vector(6, 6)),
                                         from(-channel_vector(6, 6)));
  CHECK(path_residual(m, flip) < 1e-8);
  CHECK(rotate_in_eigenspace(m, 3, 2, from(channel_vector(6, 3))).size() == 0);

  CHECK(code_of([&] { rotate_in_eigenspace(m, 2, 1, from(channel_vector(6, 1))); }) ==
        ErrorCode::not_degenerate);
  CHECK(code_of([&] {
          rotate_in_eigenspace(m, 1, 1, from(channel_vector(6, 1)), from(-channel_vector(6, 1)));
        }) == ErrorCode::planning_failed);
  const DiagonalModel half({1.1, 1, 1, 1, 1, 1}, Partition(2, 2, 2), 0.25,
                           RadialLaw::discrete({0.5}, {1.0}));
  CHECK(code_of([&] { rotate_in_eigenspace(half, 3, 2, from(t)); }) ==
        ErrorCode::radial_one_unavailable);
}

TEST_CASE("tail root against a multi-precision bisection") {
  // kappa = (2, 1, 1), w = 0.6 on channel 1 and 0.8 on channel 3.
  Vector w(3);
  w << 0.8, 0.0, 0.6;
  for (const auto& [lambda, n3, c] : {std::tuple{0.25, 2u, 1.415094339622641461},
                                      std::tuple{0.5, 1u, 1.512517981527275300}}) {
    const DiagonalModel m({2, 1, 1}, Partition(1, 1, 1), lambda);
    const auto root = find_tail_root(m, w, 3, 2);
    CHECK(root.n3 == n3);
    CHECK(root.c_scaled == doctest::Approx(c).epsilon(1e-12));
    // kappa_K = 1, so the scaled root is the root of f itself.
    CHECK(std::fabs(spread_tail_f(m, w, 3, 2, root.n3, root.c_scaled)) < 1e-12);
    CHECK(spread_tail_f(m, w, 3, 2, root.n3, 0.0) < 0.0);
    const auto path = spread_tail(m, SphereVector(w), 3, 2);
    CHECK(path.size() == n3);
    check_path_shape(m, path);
    CHECK(path_residual(m, path) < 1e-8);
  }
  const DiagonalModel m({2, 1, 1}, Partition(1, 1, 1), 0.25);
  Vector block_only(3);
  block_only << 0.6, 0.8, 0.0;
  CHECK(spread_tail(m, SphereVector(block_only), 3, 2).size() == 0);
  CHECK(find_tail_root(m, block_only, 3, 2).n3 == 0);
}

TEST_CASE("f_N is negative at zero for many targets") {
  RngStream rng(31, 0);
  const DiagonalModel m({1.3, 1.2, 1.1, 1, 1, 1}, Partition(2, 2, 2), 0.3);
  for (int i = 0; i < 200; ++i) {
    Vector w = sample_uniform_sphere(6, rng);
    w.head(1).setZero();
    w.normalize();
    for (std::size_t n3 : {1u, 5u, 20u}) {
      REQUIRE(spread_tail_f(m, w, 5, 4, n3, 0.0) < 0.0);
    }
    const auto path = spread_tail(m, SphereVector(w), 5, 4);
    REQUIRE(path_residual(m, path) < 1e-8);
  }
}

TEST_CASE("plan_path") {
  const DiagonalModel m({1.1, 1, 1, 1, 1, 1}, Partition(2, 2, 2), 0.25);
  const SphereVector e1(channel_vector(6, 1));
  CHECK(plan_path(m, e1, e1).size() == 0);

  const auto climb = plan_path(m, e1, from(channel_vector(6, 2)));
  CHECK(climb.size() == climb_channel(m, 1, 1, 2).size());
  CHECK(path_residual(m, climb) < 1e-8);

  // Sign change of the one-channel top block.
  const auto flip = plan_path(m, e1, from(-channel_vector(6, 1)));
  CHECK(path_residual(m, flip) < 1e-8);

  RngStream rng(37, 0);
  const DiagonalModel acc({1.2, 1.1, 1.05, 1, 1, 1}, Partition(2, 2, 2), 0.3);
  for (int i = 0; i < 40; ++i) {
    const SphereVector u(sample_uniform_sphere(6, rng));
    const SphereVector w(sample_uniform_sphere(6, rng));
    const auto path = plan_path(acc, u, w);
    check_path_shape(acc, path);
    REQUIRE(path_residual(acc, path) < 1e-8);
  }
  // Sparse targets exercise each K.
  for (std::size_t k = 1; k <= 6; ++k) {
    Vector w = Vector::Zero(6);
    for (std::size_t j = 1; j <= k; ++j) w[static_cast<Eigen::Index>(channel_coordinate(6, j))] = 1.0 + j;
    const SphereVector u(sample_uniform_sphere(6, rng));
    REQUIRE(path_residual(acc, plan_path(acc, u, from(w))) < 1e-8);
    REQUIRE(path_residual(acc, plan_path(acc, u, from(-w))) < 1e-8);
  }

  // Degenerate top block.
  const DiagonalModel top({1.1, 1.1, 1.0, 1.0, 0.95, 0.95}, Partition(2, 2, 2), 0.2);
  for (int i = 0; i < 20; ++i) {
    const SphereVector u(sample_uniform_sphere(6, rng));
    const SphereVector w(sample_uniform_sphere(6, rng));
    REQUIRE(path_residual(top, plan_path(top, u, w)) < 1e-8);
  }
  REQUIRE(path_residual(top, plan_path(top, e1, from(-channel_vector(6, 1)))) < 1e-8);

  CHECK(code_of([&] { plan_path(m.with_lambda(0.05), e1, from(channel_vector(6, 2))); }) ==
        ErrorCode::hypothesis_violated);
  const DiagonalModel no_one({1.1, 1, 1, 1, 1, 1}, Partition(2, 2, 2), 0.25,
                             RadialLaw::discrete({0.5}, {1.0}));
  CHECK(code_of([&] { plan_path(no_one, e1, from(channel_vector(6, 2))); }) ==
        ErrorCode::hypothesis_violated);
}
