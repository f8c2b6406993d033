#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "paracube/integrands.hpp"
#include "paracube/mcubes.hpp"
#include "paracube/pagani.hpp"
#include "paracube/quadrature.hpp"

namespace py = pybind11;
using namespace paracube;

namespace {

// Either a registry id ("f1".."f6", "sum") or a Python callable taking a
// list of d floats.
Integrand to_integrand(const py::object& f, int d) {
  if (py::isinstance<py::str>(f)) {
    const auto id = f.cast<std::string>();
    auto in = make_integrand(id, d);
    if (!in) throw ArgumentError("unknown integrand '" + id + "'");
    return *in;
  }
  if (!PyCallable_Check(f.ptr())) throw ArgumentError("integrand must be an id or a callable");
  auto fn = std::make_shared<py::object>(f);
  return Integrand(d, [fn](std::span<const double> x) {
    py::gil_scoped_acquire gil;
    py::list pt(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) pt[j] = x[j];
    return (*fn)(pt).cast<double>();
  });
}

ExecConfig make_exec(unsigned workers, bool deterministic) {
  ExecConfig e;
  e.workers = workers;
  e.deterministic = deterministic;
  return e;
}

ErrorMode error_mode(const std::string& s) {
  if (s == "max-null") return ErrorMode::MaxNull;
  if (s == "pairwise") return ErrorMode::Pairwise;
  if (s == "asymptotic") return ErrorMode::Asymptotic;
  throw ArgumentError("unknown error mode '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_paracube, m) {
  m.doc() = "Parallel multidimensional integration: PAGANI cubature and m-Cubes Monte Carlo";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);

  py::class_<RuleTable>(m, "RuleTable")
      .def_readonly("d", &RuleTable::d)
      .def_readonly("f_eval", &RuleTable::f_eval)
      .def_readonly("degree", &RuleTable::degree)
      .def_readonly("weights", &RuleTable::weights)
      .def_readonly("generators", &RuleTable::generators);
  m.def("build_rule", &build_rule, py::arg("d"));

  py::class_<IntegralResult>(m, "IntegralResult")
      .def_readonly("estimate", &IntegralResult::estimate)
      .def_readonly("errorest", &IntegralResult::errorest)
      .def_readonly("iterations", &IntegralResult::iterations)
      .def_readonly("regions_processed", &IntegralResult::regions_processed)
      .def_readonly("converged", &IntegralResult::converged)
      .def_readonly("reason", &IntegralResult::reason);

  m.def(
      "pagani",
      [](const py::object& f, int d, double rel_tol, int max_iterations,
         const std::string& mode, unsigned workers, bool deterministic) {
        const Integrand in = to_integrand(f, d);
        PaganiConfig cfg;
        cfg.rel_tol = rel_tol;
        cfg.max_iterations = max_iterations;
        cfg.error_mode = error_mode(mode);
        py::gil_scoped_release nogil;
        return refine(in, cfg, make_exec(workers, deterministic));
      },
      py::arg("f"), py::arg("d"), py::arg("rel_tol") = 1e-3, py::arg("max_iterations") = 60,
      py::arg("error_mode") = "max-null", py::arg("workers") = 0,
      py::arg("deterministic") = true);

  py::class_<MonteCarloResult>(m, "MonteCarloResult")
      .def_readonly("estimate", &MonteCarloResult::estimate)
      .def_readonly("errorest", &MonteCarloResult::errorest)
      .def_readonly("chi2_per_dof", &MonteCarloResult::chi2_per_dof)
      .def_property_readonly("samples", [](const MonteCarloResult& r) { return r.plan.samples; });

  m.def(
      "mcubes",
      [](const py::object& f, int d, double n, int iterations, int skip, std::uint64_t seed,
         unsigned workers, bool deterministic) {
        const Integrand in = to_integrand(f, d);
        McubesConfig cfg;
        cfg.iterations = iterations;
        cfg.skip = skip;
        cfg.seed = seed;
        py::gil_scoped_release nogil;
        return run(in, n, cfg, make_exec(workers, deterministic));
      },
      py::arg("f"), py::arg("d"), py::arg("n") = 1e6, py::arg("iterations") = 10,
      py::arg("skip") = 0, py::arg("seed") = 1, py::arg("workers") = 0,
      py::arg("deterministic") = true);

  m.def(
      "make_plan",
      [](double n, int d) {
        const auto p = make_plan(n, d);
        return py::dict(py::arg("g") = p.g, py::arg("m") = p.m, py::arg("p") = p.p,
                        py::arg("s") = p.s, py::arg("samples") = p.samples);
      },
      py::arg("n"), py::arg("d"));

  m.def(
      "reference",
      [](const std::string& id, int d) {
        const auto r = reference_for(id, d);
        if (!r) throw ArgumentError("unknown integrand '" + id + "'");
        return py::make_tuple(r->value, std::string(to_string(r->method)), r->claimed_abs_error);
      },
      py::arg("id"), py::arg("d"));

  m.def("integrand_ids", &integrand_ids);
}
