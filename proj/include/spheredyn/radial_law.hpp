// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "spheredyn/rng.hpp"

namespace spheredyn {

/// Law of the scalar radial randomness r in [0, 1].
class RadialLaw {
 public:
  enum class Kind { constant_one, uniform01, bernoulli, discrete };

  static RadialLaw constant_one();
  static RadialLaw uniform01();
  /// r = 1 with probability p, r = 0 otherwise; requires 0 < p <= 1.
  static RadialLaw bernoulli(double p);
  /// Finite law; support in [0, 1], non-negative weights (normalized here).
  static RadialLaw discrete(std::vector<double> support,
                            std::vector<double> weights);

  Kind kind() const noexcept { return kind_; }
  std::string name() const;

  /// True iff 1 is in the support of r.
  bool includes_one() const noexcept;
  double prob_zero() const noexcept;
  /// Membership test for prescribed radial values, e.g. of a steering path.
  bool in_support(double s) const noexcept;

  double sample(RngStream& rng) const noexcept;

  double bernoulli_p() const noexcept { return p_; }
  const std::vector<double>& support() const noexcept { return support_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  friend bool operator==(const RadialLaw&, const RadialLaw&) = default;

 private:
  RadialLaw() = default;

  Kind kind_ = Kind::constant_one;
  double p_ = 1.0;
  std::vector<double> support_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

}  // namespace spheredyn
