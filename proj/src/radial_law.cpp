// SPDX-License-Identifier: Apache-2.0
#include "spheredyn/radial_law.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spheredyn/errors.hpp"

namespace spheredyn {

RadialLaw RadialLaw::constant_one() { return RadialLaw{}; }

RadialLaw RadialLaw::uniform01() {
  RadialLaw law;
  law.kind_ = Kind::uniform01;
  return law;
}

RadialLaw RadialLaw::bernoulli(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                "bernoulli radial law needs 0 < p <= 1 (r must not vanish a.s.)");
  }
  RadialLaw law;
  law.kind_ = Kind::bernoulli;
  law.p_ = p;
  return law;
}

RadialLaw RadialLaw::discrete(std::vector<double> support,
                              std::vector<double> weights) {
  if (support.empty() || support.size() != weights.size()) {
    throw Error(ErrorCode::invalid_argument,
                "discrete radial law needs matching non-empty support/weights");
  }
  double total = 0.0;
  double nonzero_mass = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (!(support[k] >= 0.0 && support[k] <= 1.0)) {
      throw Error(ErrorCode::invalid_argument,
                  "discrete radial law support must lie in [0, 1]");
    }
    if (!(weights[k] >= 0.0) || !std::isfinite(weights[k])) {
      throw Error(ErrorCode::invalid_argument,
                  "discrete radial law weights must be finite and >= 0");
    }
    total += weights[k];
    if (support[k] > 0.0) nonzero_mass += weights[k];
  }
  if (!(total > 0.0) || !(nonzero_mass > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "discrete radial law must put positive mass on r > 0");
  }
  RadialLaw law;
  law.kind_ = Kind::discrete;
  law.support_ = std::move(support);
  law.weights_ = std::move(weights);
  for (double& w : law.weights_) w /= total;
  law.cumulative_.resize(law.weights_.size());
  std::partial_sum(law.weights_.begin(), law.weights_.end(),
                   law.cumulative_.begin());
  law.cumulative_.back() = 1.0;
  return law;
}

std::string RadialLaw::name() const {
  switch (kind_) {
    case Kind::constant_one: return "constant_one";
    case Kind::uniform01: return "uniform01";
    case Kind::bernoulli: return "bernoulli";
    case Kind::discrete: return "discrete";
  }
  return "unknown";
}

bool RadialLaw::includes_one() const noexcept {
  switch (kind_) {
    case Kind::constant_one:
    case Kind::uniform01:
    case Kind::bernoulli:
      return true;
    case Kind::discrete:
      for (std::size_t k = 0; k < support_.size(); ++k) {
        if (support_[k] == 1.0 && weights_[k] > 0.0) return true;
      }
      return false;
  }
  return false;
}

double RadialLaw::prob_zero() const noexcept {
  switch (kind_) {
    case Kind::constant_one:
    case Kind::uniform01:
      return 0.0;
    case Kind::bernoulli:
      return 1.0 - p_;
    case Kind::discrete: {
      double mass = 0.0;
      for (std::size_t k = 0; k < support_.size(); ++k) {
        if (support_[k] == 0.0) mass += weights_[k];
      }
      return mass;
    }
  }
  return 0.0;
}

bool RadialLaw::in_support(double s) const noexcept {
  switch (kind_) {
    case Kind::constant_one: return s == 1.0;
    case Kind::uniform01: return s >= 0.0 && s <= 1.0;
    case Kind::bernoulli: return s == 1.0 || (s == 0.0 && p_ < 1.0);
    case Kind::discrete:
      for (std::size_t k = 0; k < support_.size(); ++k) {
        if (support_[k] == s && weights_[k] > 0.0) return true;
      }
      return false;
  }
  return false;
}

double RadialLaw::sample(RngStream& rng) const noexcept {
  switch (kind_) {
    case Kind::constant_one:
      return 1.0;
    case Kind::uniform01:
      return rng.uniform();
    case Kind::bernoulli:
      return rng.uniform() < p_ ? 1.0 : 0.0;
    case Kind::discrete: {
      const double u = rng.uniform();
      const auto it =
          std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      const auto idx = static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                   static_cast<std::ptrdiff_t>(support_.size()) - 1));
      return support_[idx];
    }
  }
  return 1.0;
}

}  // namespace spheredyn
