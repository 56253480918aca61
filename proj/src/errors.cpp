// SPDX-License-Identifier: Apache-2.0
#include "spheredyn/errors.hpp"

namespace spheredyn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::near_singular_action: return "NearSingularAction";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::index_out_of_range: return "IndexOutOfRange";
    case ErrorCode::invalid_order: return "InvalidOrder";
    case ErrorCode::gap_is_zero: return "GapIsZero";
    case ErrorCode::partition_not_separated: return "PartitionNotSeparated";
    case ErrorCode::unknown_kind: return "UnknownKind";
    case ErrorCode::out_of_domain: return "OutOfDomain";
    case ErrorCode::empty_sample: return "EmptySample";
    case ErrorCode::hypothesis_violated: return "HypothesisViolated";
    case ErrorCode::not_degenerate: return "NotDegenerate";
    case ErrorCode::radial_one_unavailable: return "RadialOneUnavailable";
    case ErrorCode::no_root_in_range: return "NoRootInRange";
    case ErrorCode::orthogonal_completion_failed: return "OrthogonalCompletionFailed";
    case ErrorCode::planning_failed: return "PlanningFailed";
    case ErrorCode::config_error: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace spheredyn
