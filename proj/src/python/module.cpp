// SPDX-License-Identifier: Apache-2.0
//
// Python bindings. Vectors and matrices cross as numpy arrays; reports come
// back as plain dicts.
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "spheredyn/checks.hpp"
#include "spheredyn/config.hpp"
#include "spheredyn/dynamics.hpp"
#include "spheredyn/errors.hpp"
#include "spheredyn/model.hpp"
#include "spheredyn/randomness.hpp"
#include "spheredyn/reachability.hpp"
#include "spheredyn/statistics.hpp"
#include "spheredyn/support_scan.hpp"

namespace py = pybind11;
using namespace spheredyn;

namespace {

std::optional<SphereVector> maybe_vector(const std::optional<Vector>& v) {
  if (!v) return std::nullopt;
  return SphereVector(*v);
}

py::array_t<double> record_matrix(const EnsembleResult& e, const std::vector<double>& series) {
  py::array_t<double> out({e.records(), e.m_trajectories});
  auto buf = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < e.records(); ++k)
    for (std::size_t t = 0; t < e.m_trajectories; ++t)
      buf(k, t) = e.at(series, k, t);
  return out;
}

py::dict check_dict(const CheckResult& r) {
  py::dict d;
  d["check_id"] = r.check_id;
  d["paper_anchor"] = r.paper_anchor;
  d["status"] = std::string(to_string(r.status));
  d["measured"] = r.measured;
  d["bound"] = r.bound;
  d["tolerance"] = r.tolerance;
  d["n_samples"] = r.n_samples;
  d["seed"] = r.seed;
  return d;
}

RadialLaw radial_law_from(const std::string& kind, double p, std::vector<double> support,
                          std::vector<double> weights) {
  RadialLawConfig c;
  c.kind = kind;
  c.p = p;
  c.support = std::move(support);
  c.weights = std::move(weights);
  ModelConfig mc;
  mc.radial_law = c;
  return build_model(mc).radial_law();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random perturbations of diagonal projective dynamics on the sphere";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::exception<Error>(m, "Error", PyExc_ValueError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      std::string msg = std::string(to_string(e.code())) + ": " + e.what();
      py::set_error(error_type.get_stored(), msg.c_str());
    }
  });

  py::class_<Partition>(m, "Partition")
      .def(py::init<std::size_t, std::size_t, std::size_t>(), py::arg("l_a"), py::arg("l_b"),
           py::arg("l_c"))
      .def_property_readonly("l_a", &Partition::l_a)
      .def_property_readonly("l_b", &Partition::l_b)
      .def_property_readonly("l_c", &Partition::l_c)
      .def_property_readonly("dim", &Partition::dim)
      .def("well_separated", &Partition::well_separated)
      .def("__eq__", [](const Partition& a, const Partition& b) { return a == b; })
      .def("__repr__", [](const Partition& p) {
        return "Partition(" + std::to_string(p.l_a()) + ", " + std::to_string(p.l_b()) + ", " +
               std::to_string(p.l_c()) + ")";
      });

  py::class_<RadialLaw>(m, "RadialLaw")
      .def(py::init(&radial_law_from), py::arg("kind") = "constant_one", py::arg("p") = 1.0,
           py::arg("support") = std::vector<double>{}, py::arg("weights") = std::vector<double>{})
      .def_property_readonly("name", &RadialLaw::name)
      .def("includes_one", &RadialLaw::includes_one)
      .def("prob_zero", &RadialLaw::prob_zero);

  py::class_<DiagonalModel>(m, "DiagonalModel")
      .def(py::init<std::vector<double>, Partition, double, RadialLaw>(), py::arg("kappas"),
           py::arg("partition"), py::arg("lam"), py::arg("radial_law") = RadialLaw::constant_one())
      .def_property_readonly("dim", &DiagonalModel::dim)
      .def_property_readonly("sphere_dim", &DiagonalModel::sphere_dim)
      .def_property_readonly("kappas", &DiagonalModel::kappas)
      .def_property_readonly("partition", &DiagonalModel::partition)
      .def_property_readonly("lam", &DiagonalModel::lambda)
      .def_property_readonly("radial_law", &DiagonalModel::radial_law)
      .def_property_readonly("r_diagonal", &DiagonalModel::r_diagonal)
      .def("with_lambda", &DiagonalModel::with_lambda, py::arg("lam"));

  m.def("model_from_config", [](const std::string& text) {
    return build_model(parse_config(text).model);
  }, py::arg("config_json"));

  m.def("part_norms", [](const Vector& v, const Partition& p) {
    PartNorms n = part_norms(v, p);
    return py::make_tuple(n.a2, n.b2, n.c2);
  }, py::arg("v"), py::arg("partition"));
  m.def("local_gap", &local_gap, py::arg("model"), py::arg("i"));
  m.def("max_local_gap", &max_local_gap, py::arg("model"));
  m.def("macroscopic_gap", &macroscopic_gap, py::arg("model"));
  m.def("theorem2_rhs", &theorem2_rhs, py::arg("model"));
  m.def("theorem2_threshold_d", &theorem2_threshold_d, py::arg("model"));
  m.def("forbidden_annulus", [](const DiagonalModel& model, std::size_t i)
            -> std::optional<std::pair<double, double>> {
    auto iv = forbidden_annulus(model, i);
    if (!iv) return std::nullopt;
    return std::make_pair(iv->lower, iv->upper);
  }, py::arg("model"), py::arg("channel"));

  m.def("beta_cdf_c_norm", &beta_cdf_c_norm, py::arg("partition"), py::arg("delta"));
  m.def("regularized_incomplete_beta", &regularized_incomplete_beta, py::arg("a"), py::arg("b"),
        py::arg("x"));
  m.def("projected_measure_density", &projected_measure_density, py::arg("sphere_dim"),
        py::arg("x"));
  m.def("z_statistic_transform", &z_statistic_transform, py::arg("lam"), py::arg("r"),
        py::arg("y"));
  m.def("haar_moment_oracle", [](const std::string& kind, const Partition& p, const Vector& v) {
    return haar_moment_oracle(haar_moment_from_string(kind), p, v);
  }, py::arg("kind"), py::arg("partition"), py::arg("v"));

  m.def("sample_haar_orthogonal", [](std::size_t dim, std::uint64_t seed, std::uint64_t stream) {
    RngStream rng(seed, stream);
    return sample_haar_orthogonal(dim, rng);
  }, py::arg("dim"), py::arg("seed"), py::arg("stream") = 0);
  m.def("sample_uniform_sphere", [](std::size_t dim, std::size_t count, std::uint64_t seed,
                                    std::uint64_t stream) {
    RngStream rng(seed, stream);
    Matrix out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < count; ++k)
      out.row(static_cast<Eigen::Index>(k)) = sample_uniform_sphere(dim, rng).transpose();
    return out;
  }, py::arg("dim"), py::arg("count"), py::arg("seed"), py::arg("stream") = 0);

  m.def("run_ensemble", [](const DiagonalModel& model, const std::string& variant,
                           std::size_t interleave_tail, std::optional<Vector> v0,
                           std::size_t n_steps, std::size_t m_trajectories,
                           std::size_t record_every, const std::string& burnin,
                           std::size_t burnin_steps, std::uint64_t seed, std::size_t workers) {
    RunConfig rc;
    rc.variant = variant;
    rc.interleave_tail = interleave_tail;
    BurninConfig bc;
    bc.kind = burnin;
    bc.steps = burnin_steps;
    EnsembleSpec spec{model};
    spec.variant = build_variant(rc);
    spec.v0 = maybe_vector(v0);
    spec.n_steps = n_steps;
    spec.m_trajectories = m_trajectories;
    spec.record_every = record_every;
    spec.burnin = build_burnin(bc);
    EnsembleResult e;
    {
      py::gil_scoped_release release;
      e = run_ensemble(spec, seed, workers);
    }
    py::dict d;
    d["steps"] = e.grid;
    d["a2"] = record_matrix(e, e.a2);
    d["b2"] = record_matrix(e, e.b2);
    d["c2"] = record_matrix(e, e.c2);
    d["z"] = record_matrix(e, e.z);
    d["burnin_steps"] = e.burnin_steps;
    d["burnin_converged"] = e.burnin_converged;
    return d;
  }, py::arg("model"), py::arg("variant") = "hyperbolic", py::arg("interleave_tail") = 0,
     py::arg("v0") = py::none(), py::arg("n_steps") = 1000, py::arg("m_trajectories") = 100,
     py::arg("record_every") = 10, py::arg("burnin") = "none", py::arg("burnin_steps") = 0,
     py::arg("seed") = 42, py::arg("workers") = 1);

  m.def("plan_path", [](const DiagonalModel& model, const Vector& u, const Vector& w) {
    SteeringPath path = plan_path(model, SphereVector(u), SphereVector(w));
    std::vector<double> s;
    std::vector<Matrix> us;
    for (const auto& st : path.steps) {
      s.push_back(st.s);
      us.push_back(st.u);
    }
    py::dict d;
    d["s"] = s;
    d["u"] = us;
    d["residual_norm"] = path_residual(model, path);
    return d;
  }, py::arg("model"), py::arg("source"), py::arg("target"));

  m.def("annulus_scan", [](const DiagonalModel& model, std::size_t channel, std::size_t n_steps,
                           std::size_t max_burnin, std::size_t bins, std::uint64_t seed) {
    AnnulusScanSpec spec;
    spec.channel = channel;
    spec.n_steps = n_steps;
    spec.max_burnin = max_burnin;
    spec.bins = bins;
    OccupancyReport r = annulus_scan(model, spec, seed);
    py::dict d;
    d["channel"] = r.channel;
    if (r.annulus)
      d["annulus"] = py::make_tuple(r.annulus->lower, r.annulus->upper);
    else
      d["annulus"] = py::none();
    d["n_samples"] = r.n_samples;
    d["n_burnin"] = r.n_burnin;
    d["burnin_converged"] = r.burnin_converged;
    d["violations"] = r.violations;
    d["below_lower"] = r.below_lower;
    d["min_observed"] = r.min_observed;
    d["max_observed"] = r.max_observed;
    d["histogram"] = r.histogram;
    return d;
  }, py::arg("model"), py::arg("channel") = 1, py::arg("n_steps") = 1'000'000,
     py::arg("max_burnin") = 1'000'000, py::arg("bins") = 50, py::arg("seed") = 42);

  m.def("coverage_scan", [](const DiagonalModel& model, std::size_t n_steps, std::size_t n_cells,
                            double cap_radius, std::uint64_t seed) {
    CoverageScanSpec spec;
    spec.n_steps = n_steps;
    spec.n_cells = n_cells;
    spec.cap_radius = cap_radius;
    CoverageReport r = coverage_scan(model, spec, seed);
    py::dict d;
    d["n_cells"] = r.n_cells;
    d["cap_radius"] = r.cap_radius;
    d["visited"] = r.visited;
    d["fraction"] = r.fraction;
    d["first_visit"] = r.first_visit;
    d["steps_to_full"] = r.steps_to_full;
    return d;
  }, py::arg("model"), py::arg("n_steps") = 10'000'000, py::arg("n_cells") = 200,
     py::arg("cap_radius") = 0.35, py::arg("seed") = 42);

  m.def("ball_mass", &ball_mass, py::arg("sphere_dim"), py::arg("rho"));
  m.def("ball_radius_for_mass", &ball_radius_for_mass, py::arg("sphere_dim"), py::arg("mass"));
  m.def("sample_final_states", [](const DiagonalModel& model, std::optional<Vector> v0,
                                  std::size_t n_steps, std::size_t count, std::uint64_t seed,
                                  std::size_t workers) {
    std::vector<Vector> xs;
    {
      py::gil_scoped_release release;
      xs = sample_final_states(model, maybe_vector(v0), n_steps, count, seed, 0, workers);
    }
    Matrix out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(model.dim()));
    for (std::size_t k = 0; k < count; ++k) out.row(static_cast<Eigen::Index>(k)) = xs[k];
    return out;
  }, py::arg("model"), py::arg("v0") = py::none(), py::arg("n_steps") = 1000,
     py::arg("count") = 1000, py::arg("seed") = 42, py::arg("workers") = 1);
  m.def("atom_check", [](const Matrix& samples, double mass) {
    std::vector<Vector> xs;
    for (Eigen::Index k = 0; k < samples.rows(); ++k) xs.push_back(samples.row(k).transpose());
    AtomReport r = atom_check(xs, mass);
    py::dict d;
    d["max_cluster_mass"] = r.max_cluster_mass;
    d["angular_radius"] = r.angular_radius;
    d["ball_mass"] = r.ball_mass;
    d["n_samples"] = r.n_samples;
    return d;
  }, py::arg("samples"), py::arg("mass") = 0.01);

  m.def("check_ids", &check_ids);
  m.def("verify_config", [](const std::string& text, std::optional<std::uint64_t> seed) {
    ExperimentConfig c = parse_config(text);
    validate_config(c);
    DiagonalModel model = build_model(c.model);
    std::vector<std::string> ids = c.check.select.value_or(check_ids());
    std::vector<CheckResult> results;
    {
      py::gil_scoped_release release;
      results = run_checks(model, ids, c.check.settings, seed.value_or(c.run.master_seed));
    }
    py::list out;
    for (const auto& r : results) out.append(check_dict(r));
    return out;
  }, py::arg("config_json"), py::arg("seed") = py::none());
  m.def("normalize_config", [](const std::string& text) {
    ExperimentConfig c = parse_config(text);
    validate_config(c);
    return serialize_config(c);
  }, py::arg("config_json"));
}
