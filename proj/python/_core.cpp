#include "packbed/cli.hpp"
#include "packbed/io.hpp"
#include "packbed/solver.hpp"
#include "packbed/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>

namespace py = pybind11;
using namespace packbed;

namespace {

py::list profile_list(const SolutionFields& fields, double x, int n, const std::string& quantity) {
  py::list out;
  for (const auto& pt : sample_profile(fields, x, n, parse_quantity(quantity))) {
    out.append(py::make_tuple(pt.y, pt.value));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Q2/P1-disc solver for porous-media channel flow";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def("kappa", &kappa, py::arg("eps"));
  m.def("alpha_beta", [](double eps) {
    const DragCoefficients c = alpha_beta(eps);
    return py::make_tuple(c.alpha, c.beta);
  }, py::arg("eps"));
  m.def("porosity_at",
        [](double y, double eps_inf, double decay, double half_width) {
          return porosity_at(y, PorosityModel(eps_inf, decay, half_width));
        },
        py::arg("y"), py::arg("eps_inf") = 0.45, py::arg("decay") = 6.0,
        py::arg("half_width") = 5.0);
  m.def("reynolds",
        [](double u0, double dp, double nu) {
          PhysicalParams p;
          p.reference_speed = u0;
          p.pellet_diameter = dp;
          p.kinematic_viscosity = nu;
          return reynolds(p);
        },
        py::arg("reference_speed"), py::arg("pellet_diameter"), py::arg("kinematic_viscosity"));

  py::class_<CaseConfig>(m, "CaseConfig")
      .def(py::init<>())
      .def_static("reactor", &CaseConfig::reactor, py::arg("re") = 50.0)
      .def_readwrite("length", &CaseConfig::length)
      .def_readwrite("half_width", &CaseConfig::half_width)
      .def_readwrite("nx", &CaseConfig::nx)
      .def_readwrite("ny", &CaseConfig::ny)
      .def_readwrite("re", &CaseConfig::re)
      .def_readwrite("eps_inf", &CaseConfig::eps_inf)
      .def_readwrite("decay", &CaseConfig::decay)
      .def_readwrite("u_in", &CaseConfig::u_in)
      .def_readwrite("u_w", &CaseConfig::u_w)
      .def_readwrite("ramp", &CaseConfig::ramp)
      .def_readwrite("quad_order", &CaseConfig::quad_order)
      .def_property(
          "forcing", [](const CaseConfig& c) { return c.forcing_constant; },
          [](CaseConfig& c, const Vec2& f) { c.forcing_constant = f; })
      .def_property(
          "picard_tol_rel", [](const CaseConfig& c) { return c.picard.tol_rel; },
          [](CaseConfig& c, double v) { c.picard.tol_rel = v; })
      .def_property(
          "picard_tol_abs", [](const CaseConfig& c) { return c.picard.tol_abs; },
          [](CaseConfig& c, double v) { c.picard.tol_abs = v; })
      .def_property(
          "picard_max_iter", [](const CaseConfig& c) { return c.picard.max_iter; },
          [](CaseConfig& c, int v) { c.picard.max_iter = v; })
      .def_property(
          "picard_relaxation", [](const CaseConfig& c) { return c.picard.relaxation; },
          [](CaseConfig& c, double v) { c.picard.relaxation = v; })
      .def("validate", &ensure_valid)
      .def("issues", &validate_config);

  m.def("load_config", [](const std::string& path) { return load_config(path); }, py::arg("path"));

  py::class_<NonlinearResult>(m, "Solution")
      .def_property_readonly("iterations", [](const NonlinearResult& r) { return r.report.iterations; })
      .def_property_readonly("converged", [](const NonlinearResult& r) { return r.report.converged; })
      .def_property_readonly("residuals", [](const NonlinearResult& r) { return r.report.residuals; })
      .def_property_readonly("constraint_residual",
                             [](const NonlinearResult& r) { return r.report.constraint_residual; })
      .def_property_readonly("velocity", [](const NonlinearResult& r) { return r.fields.velocity(); })
      .def_property_readonly("pressure", [](const NonlinearResult& r) { return r.fields.pressure(); })
      .def("velocity_at",
           [](const NonlinearResult& r, double x, double y) {
             return r.fields.velocity_at(Vec2(x, y));
           },
           py::arg("x"), py::arg("y"))
      .def("pressure_at",
           [](const NonlinearResult& r, double x, double y) {
             return r.fields.pressure_at(Vec2(x, y));
           },
           py::arg("x"), py::arg("y"))
      .def("profile",
           [](const NonlinearResult& r, double x, int n, const std::string& quantity) {
             return profile_list(r.fields, x, n, quantity);
           },
           py::arg("x"), py::arg("n") = 201, py::arg("quantity") = "speed")
      .def("flux", [](const NonlinearResult& r, const CaseConfig& cfg) {
        const FluxReport f = check_global_flux(r.fields, cfg);
        py::dict d;
        d["inflow"] = f.inflow;
        d["outflow"] = f.outflow;
        d["walls"] = f.wall_bottom + f.wall_top;
        d["net"] = f.net();
        return d;
      }, py::arg("config"));

  m.def("solve",
        [](const CaseConfig& cfg) {
          py::gil_scoped_release release;
          return FlowProblem(cfg).solve();
        },
        py::arg("config"));

  m.def("check_skew_symmetry",
        [](int trials, unsigned seed, bool boundary_trace) {
          const SkewCheck s = check_skew_symmetry(trials, seed, boundary_trace);
          return py::make_tuple(s.max_violation, s.max_self_violation);
        },
        py::arg("trials") = 50, py::arg("seed") = 2024, py::arg("boundary_trace") = false);

  m.def("convergence_study",
        [](int levels, int base_cells, double re) {
          StudyOptions opts;
          opts.levels = levels;
          opts.base_cells = base_cells;
          opts.re = re;
          const ConvergenceTable t = run_convergence_study(ManufacturedCase::smooth(), opts);
          py::list rows;
          for (const auto& l : t.levels) {
            rows.append(py::make_tuple(l.h, l.errors.u_l2, l.errors.u_h1, l.errors.p_l2));
          }
          return rows;
        },
        py::arg("levels") = 3, py::arg("base_cells") = 4, py::arg("re") = 10.0);

  m.def("main",
        [](std::vector<std::string> args) {
          args.insert(args.begin(), "packbed");
          std::vector<const char*> argv;
          for (const auto& a : args) argv.push_back(a.c_str());
          return cli::run(static_cast<int>(argv.size()), argv.data(), std::cout, std::cerr);
        },
        py::arg("args"));
}
