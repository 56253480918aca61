// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spheredyn {

enum class ErrorCode {
  invalid_argument,
  near_singular_action,
  dimension_mismatch,
  index_out_of_range,
  invalid_order,
  gap_is_zero,
  partition_not_separated,
  unknown_kind,
  out_of_domain,
  empty_sample,
  hypothesis_violated,
  not_degenerate,
  radial_one_unavailable,
  no_root_in_range,
  orthogonal_completion_failed,
  planning_failed,
  config_error,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` carries the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spheredyn
