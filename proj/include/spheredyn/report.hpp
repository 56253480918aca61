// SPDX-License-Identifier: Apache-2.0
//
// Output formats: CSV with fixed columns, JSON lines for check reports and
// steering paths. Doubles are written in shortest round-trip form.
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spheredyn/checks.hpp"
#include "spheredyn/dynamics.hpp"
#include "spheredyn/reachability.hpp"
#include "spheredyn/support_scan.hpp"

namespace spheredyn {

/// Shortest decimal that parses back to the same double; "nan", "inf", "-inf"
/// for non-finite values.
std::string format_double(double x);

inline constexpr const char* kTrajectoryHeader = "step,trajectory_id,a2,b2,c2,z";
inline constexpr const char* kSummaryHeader = "N,mean_a2,stderr_a2,theorem2_rhs";

/// One row per (trajectory, grid point), trajectory-major.
void write_trajectory_csv(std::ostream& out, const EnsembleResult& e);
/// One row per grid point; theorem2_rhs left empty when absent.
void write_summary_csv(std::ostream& out, const EnsembleResult& e,
                       std::optional<double> theorem2_rhs);

/// {check_id, paper_anchor, status, measured, bound, tolerance, n_samples, seed};
/// non-finite numbers become null.
std::string check_json_line(const CheckResult& r);
void write_check_report(std::ostream& out, const std::vector<CheckResult>& results);

/// {n, s, u_matrix} per step (u row-major), then {residual_norm}.
void write_path_file(std::ostream& out, const SteeringPath& path, double residual);

std::string occupancy_json_line(const OccupancyReport& r);
std::string coverage_json_line(const CoverageReport& r);
std::string atom_json_line(const AtomReport& r, double max_mass);

}  // namespace spheredyn
