// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ergocheck/analytic.hpp"
#include "ergocheck/error.hpp"
#include "ergocheck/grid.hpp"
#include "ergocheck/model.hpp"
#include "ergocheck/sde.hpp"
#include "ergocheck/solvers.hpp"
#include "ergocheck/valuedet.hpp"
#include "ergocheck/verify.hpp"

namespace py = pybind11;
using namespace ergocheck;

namespace {

DiffusionModel model_by_name(const std::string& name, const std::vector<double>& controls) {
  const ControlSet cs(controls);
  return builtin_model(name, &cs);
}

py::dict report_dict(const CompatibilityReport& r) {
  py::dict d;
  d["verdict"] = to_string(r.verdict);
  d["rho"] = r.rho;
  d["beta"] = r.beta;
  d["gap"] = r.gap;
  d["hjb_residual_sup"] = r.hjb_residual_sup;
  d["hjb_residual_abs_sup"] = r.hjb_residual_abs_sup;
  d["lyapunov_epsilon"] = r.lyapunov_epsilon;
  d["semigroup_slope"] = r.semigroup_slope;
  d["m_star_estimate"] = r.m_star_estimate;
  d["transient_selector"] = r.transient_selector;
  d["selector"] = std::vector<double>(r.selector.values().begin(), r.selector.values().end());
  return d;
}

}  // namespace

PYBIND11_MODULE(_ergocheck, m) {
  m.doc() = "Grid and Monte Carlo checks for ergodic control HJB solution pairs";

  static py::exception<Error> exc(m, "ErgocheckError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      exc(e.what());
    }
  });

  m.def("models", [] {
    std::vector<std::string> names;
    for (const auto& info : list_builtin_models()) names.push_back(info.name);
    return names;
  });

  m.def("grid_nodes", [](double L, std::size_t N) { return build_grid(L, N).nodes(); }, py::arg("L"), py::arg("N"));

  m.def("xi", &analytic::xi, py::arg("rho"));
  m.def("beta_quad", &analytic::beta_quad, py::arg("rho"), py::arg("quad_tol") = analytic::kDefaultQuadTol);
  m.def("beta_formula", &analytic::beta_formula, py::arg("rho"));
  m.def("v_rho", &analytic::v_rho, py::arg("rho"), py::arg("x"), py::arg("quad_tol") = analytic::kDefaultQuadTol);

  m.def(
      "run_pia",
      [](const std::string& model, double L, std::size_t N, double initial_rho, double tol, std::size_t max_iter,
         const std::vector<double>& controls) {
        const DiffusionModel mdl = model_by_name(model, controls);
        const Grid1D g = build_grid(L, N);
        PiaResult res = [&] {
          py::gil_scoped_release release;
          return run_pia(mdl, g, analytic::w_rho_policy(g, mdl.controls, initial_rho), PiaOptions{tol, max_iter});
        }();
        py::dict d;
        d["rho"] = res.pair.rho;
        d["iterations"] = res.trace.iterations;
        d["termination"] = to_string(res.trace.reason);
        d["rho_trace"] = res.trace.rhos();
        d["V"] = res.pair.V.values;
        return d;
      },
      py::arg("model") = "example", py::arg("L") = 8.0, py::arg("N") = 4001, py::arg("initial_rho") = 0.8,
      py::arg("tol") = 1e-9, py::arg("max_iter") = 50, py::arg("controls") = std::vector<double>{-1.0, 0.0, 1.0});

  m.def(
      "check_grid_v_rho",
      [](double rho, double L, std::size_t N) {
        const DiffusionModel mdl = builtin_example();
        const Grid1D g = build_grid(L, N);
        CompatibilityReport rep = [&] {
          py::gil_scoped_release release;
          return check_compatible(mdl, g, SolutionPair{analytic::grid_v_rho(mdl, g, rho), rho});
        }();
        return report_dict(rep);
      },
      py::arg("rho"), py::arg("L") = 8.0, py::arg("N") = 4001);

  m.def(
      "grid_beta_w_rho",
      [](double rho, double L, std::size_t N) {
        const DiffusionModel mdl = builtin_example();
        const Grid1D g = build_grid(L, N);
        return evaluate_policy(mdl, analytic::w_rho_policy(g, mdl.controls, rho)).rho;
      },
      py::arg("rho"), py::arg("L") = 8.0, py::arg("N") = 4001);

  m.def(
      "simulate_average_cost",
      [](double rho, double dt, double T, std::size_t n_paths, std::uint64_t seed, double L, std::size_t N) {
        const DiffusionModel mdl = builtin_example();
        const Grid1D g = build_grid(L, N);
        SimConfig cfg;
        cfg.dt = dt;
        cfg.T = T;
        cfg.n_paths = n_paths;
        cfg.seed = seed;
        PathStats s = [&] {
          py::gil_scoped_release release;
          return simulate_average_cost(mdl, analytic::w_rho_policy(g, mdl.controls, rho), cfg);
        }();
        return py::make_tuple(s.mean, s.std_error, s.n_samples);
      },
      py::arg("rho"), py::arg("dt") = 1e-2, py::arg("T") = 500.0, py::arg("n_paths") = 400,
      py::arg("seed") = SimConfig{}.seed, py::arg("L") = 8.0, py::arg("N") = 4001);
}
