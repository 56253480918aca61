// SPDX-License-Identifier: Apache-2.0
#include "spheredyn/report.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include <json.hpp>

#include "spheredyn/statistics.hpp"

namespace spheredyn {
namespace {

using json = nlohmann::ordered_json;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

void write_trajectory_csv(std::ostream& out, const EnsembleResult& e) {
  out << kTrajectoryHeader << '\n';
  for (std::size_t t = 0; t < e.m_trajectories; ++t) {
    for (std::size_t k = 0; k < e.records(); ++k) {
      out << e.grid[k] << ',' << t << ',' << format_double(e.at(e.a2, k, t)) << ','
          << format_double(e.at(e.b2, k, t)) << ',' << format_double(e.at(e.c2, k, t)) << ','
          << format_double(e.at(e.z, k, t)) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const EnsembleResult& e,
                       std::optional<double> theorem2_rhs) {
  out << kSummaryHeader << '\n';
  std::vector<double> column(e.m_trajectories);
  for (std::size_t k = 0; k < e.records(); ++k) {
    for (std::size_t t = 0; t < e.m_trajectories; ++t) column[t] = e.at(e.a2, k, t);
    const Summary s = summarize(column);
    out << e.grid[k] << ',' << format_double(s.mean) << ',' << format_double(s.std_error) << ',';
    if (theorem2_rhs) out << format_double(*theorem2_rhs);
    out << '\n';
  }
}

std::string check_json_line(const CheckResult& r) {
  json j{{"check_id", r.check_id},
         {"paper_anchor", r.paper_anchor},
         {"status", std::string(to_string(r.status))},
         {"measured", number(r.measured)},
         {"bound", number(r.bound)},
         {"tolerance", number(r.tolerance)},
         {"n_samples", r.n_samples},
         {"seed", r.seed}};
  return j.dump();
}

void write_check_report(std::ostream& out, const std::vector<CheckResult>& results) {
  for (const auto& r : results) out << check_json_line(r) << '\n';
}

void write_path_file(std::ostream& out, const SteeringPath& path, double residual) {
  for (std::size_t n = 0; n < path.steps.size(); ++n) {
    const auto& st = path.steps[n];
    json u = json::array();
    for (Eigen::Index i = 0; i < st.u.rows(); ++i) {
      for (Eigen::Index k = 0; k < st.u.cols(); ++k) u.push_back(st.u(i, k));
    }
    out << json{{"n", n + 1}, {"s", st.s}, {"u_matrix", u}}.dump() << '\n';
  }
  out << json{{"residual_norm", number(residual)}}.dump() << '\n';
}

std::string occupancy_json_line(const OccupancyReport& r) {
  json j{{"mode", "annulus"},
         {"channel", r.channel},
         {"annulus_lower", r.annulus ? json(r.annulus->lower) : json(nullptr)},
         {"annulus_upper", r.annulus ? json(r.annulus->upper) : json(nullptr)},
         {"n_samples", r.n_samples},
         {"n_burnin", r.n_burnin},
         {"burnin_converged", r.burnin_converged},
         {"violations", r.violations},
         {"below_lower", r.below_lower},
         {"min_observed", r.min_observed},
         {"max_observed", r.max_observed},
         {"histogram", r.histogram}};
  return j.dump();
}

std::string coverage_json_line(const CoverageReport& r) {
  json first = json::array();
  for (const auto& f : r.first_visit) first.push_back(f ? json(*f) : json(nullptr));
  json j{{"mode", "coverage"},
         {"n_cells", r.n_cells},
         {"cap_radius", r.cap_radius},
         {"visited", r.visited},
         {"fraction", r.fraction},
         {"steps_to_full", r.steps_to_full ? json(*r.steps_to_full) : json(nullptr)},
         {"first_visit", first}};
  return j.dump();
}

std::string atom_json_line(const AtomReport& r, double max_mass) {
  json j{{"mode", "atom"},
         {"n_samples", r.n_samples},
         {"angular_radius", r.angular_radius},
         {"ball_mass", r.ball_mass},
         {"max_cluster_mass", r.max_cluster_mass},
         {"max_allowed", max_mass}};
  return j.dump();
}

}  // namespace spheredyn
