#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ontopt/certificates.hpp"
#include "ontopt/classify.hpp"
#include "ontopt/errors.hpp"
#include "ontopt/report.hpp"
#include "ontopt/solvers.hpp"
#include "ontopt/transforms.hpp"

namespace py = pybind11;
using namespace ontopt;

namespace {

// One shape for single rewrites and composed chains.
struct PyTransform {
  std::string rule;
  std::string certificate;
  Problem problem;
  std::optional<PointMap> forward;
  std::optional<PointMap> backward;
  ValueMap value_map;
};

PyTransform wrap(const TransformResult& r) {
  return {r.rule, r.certificate, r.transformed, r.forward, r.backward, r.value_map};
}

PyTransform wrap(const TransformChain& c) {
  PyTransform t{"", "", c.result, c.forward, c.backward, c.value_map};
  for (const TransformResult& s : c.steps) {
    t.rule += (t.rule.empty() ? "" : "+") + s.rule;
    t.certificate += (t.certificate.empty() ? "" : "; ") + s.certificate;
  }
  return t;
}

Vec apply_map(const std::optional<PointMap>& m, const Vec& x, const char* which) {
  if (!m) throw InapplicableError("NotApplicable", std::string("rewrite has no ") + which + " point map");
  return m->apply(x);
}

py::dict classification_dict(const Classification& c) {
  py::dict d;
  d["class"] = class_name(c.problem_class);
  d["convexity"] = convexity_name(c.convexity);
  d["verdict"] = verdict_summary(c);
  d["chain_summary"] = chain_summary(c);
  py::list chain;
  for (const ChainLink& l : c.chain) chain.append(py::make_tuple(l.node, l.justification));
  d["chain"] = chain;
  d["flags"] = c.flags;
  d["min_eigenvalue"] = c.evidence.min_eigenvalue ? py::cast(*c.evidence.min_eigenvalue) : py::none();
  return d;
}

py::dict solution_dict(const Solution& s) {
  py::dict d;
  d["status"] = status_name(s.status);
  d["point"] = s.point ? py::cast(*s.point) : py::none();
  d["value"] = s.value;
  d["multipliers"] = s.multipliers ? py::cast(*s.multipliers) : py::none();
  d["iterations"] = s.iterations;
  d["method"] = s.method;
  d["history"] = s.history;
  return d;
}

Solution solve(const Problem& p, const std::string& method, std::optional<double> tol, std::optional<int> max_iter,
               std::optional<Vec> start, std::optional<Vec> lo, std::optional<Vec> hi, double step, int threads) {
  SolverConfig cfg;
  if (max_iter) cfg.max_iterations = *max_iter;
  cfg.start = std::move(start);
  cfg.grid_threads = threads;
  if (method == "simplex") {
    if (tol) cfg.simplex_tol = *tol;
    return solve_simplex(p, cfg);
  }
  if (method == "newton") {
    if (tol) cfg.newton_grad_tol = *tol;
    return solve_newton(p, cfg);
  }
  if (method == "barrier") {
    if (tol) cfg.barrier_gap = *tol;
    return solve_barrier(p, cfg);
  }
  if (method == "grid") {
    if (!lo || !hi) throw DomainError("grid needs lo and hi");
    return solve_grid_oracle(p, {*lo, *hi, step}, cfg);
  }
  if (method == "auto") return solve_auto(p, cfg);
  throw DomainError("unknown method " + method + " (simplex, newton, barrier, grid, auto)");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Classify, transform, solve and certify small optimization problems";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<UnboundError>(m, "UnboundError", error.ptr());
  py::register_exception<NondifferentiableError>(m, "NondifferentiableError", error.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<InapplicableError>(m, "InapplicableError", error.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", error.ptr());

  m.def("version", &tool_version);

  py::class_<Problem>(m, "Problem")
      .def_property_readonly("dimension", &Problem::dimension)
      .def_property_readonly("sense", [](const Problem& p) { return p.sense == Sense::kMinimize ? "minimize" : "maximize"; })
      .def_property_readonly("parameters", [](const Problem& p) { return p.parameters; })
      .def_property_readonly("constraint_count", [](const Problem& p) { return p.constraints.size(); })
      .def("validate",
           [](const Problem& p) {
             std::vector<std::pair<std::string, std::string>> out;
             for (const Violation& v : validate(p)) out.emplace_back(v.code, v.message);
             return out;
           },
           "List of (code, message); empty when the problem is valid.")
      .def("with_parameter", &Problem::with_parameter, py::arg("name"), py::arg("value"))
      .def("objective_value", [](const Problem& p, const Vec& x) { return objective_value(p, x); }, py::arg("x"))
      .def("is_feasible", [](const Problem& p, const Vec& x, double tol) { return is_feasible(p, x, tol); },
           py::arg("x"), py::arg("tol") = 1e-9)
      .def("to_json", [](const Problem& p) { return serialize_problem(p); })
      .def("__repr__", [](const Problem& p) {
        return "<Problem " + std::string(p.sense == Sense::kMinimize ? "minimize" : "maximize") + ", " +
               std::to_string(p.dimension()) + " vars, " + std::to_string(p.constraints.size()) + " constraints>";
      });

  m.def("parse", [](const std::string& text) { return parse_problem(text); }, py::arg("text"),
        "Problem from .optproblem.json text.");
  m.def("load", &load_problem, py::arg("path"), "Problem from an .optproblem.json file.");
  m.def("classify", [](const Problem& p) { return classification_dict(classify(p)); }, py::arg("problem"));

  py::class_<PyTransform>(m, "Transform")
      .def_readonly("rule", &PyTransform::rule)
      .def_readonly("certificate", &PyTransform::certificate)
      .def_readonly("problem", &PyTransform::problem)
      .def_property_readonly("value_map", [](const PyTransform& t) { return t.value_map.describe(); })
      .def_property_readonly("comparable", [](const PyTransform& t) { return t.value_map.comparable; })
      .def("forward", [](const PyTransform& t, const Vec& x) { return apply_map(t.forward, x, "forward"); })
      .def("backward", [](const PyTransform& t, const Vec& y) { return apply_map(t.backward, y, "backward"); })
      .def("map_value", [](const PyTransform& t, double v) { return t.value_map.apply(v); },
           "Source objective value for a transformed objective value.");

  m.def("eq_to_ineq", [](const Problem& p) { return wrap(eq_to_ineq_pair(p)); });
  m.def("socp_to_lp", [](const Problem& p) { return wrap(socp_to_lp(p)); });
  m.def("gp_log", [](const Problem& p) { return wrap(gp_log_transform(p)); });
  m.def("lp_dual", [](const Problem& p) { return wrap(lp_dual(p)); });
  m.def("phase1", [](const Problem& p) { return wrap(phase1_slack(p)); });
  m.def("to_convex_min", [](const Problem& p) { return wrap(to_convex_min(p)); });

  m.def(
      "solve",
      [](const Problem& p, const std::string& method, std::optional<double> tol, std::optional<int> max_iter,
         std::optional<Vec> start, std::optional<Vec> lo, std::optional<Vec> hi, double step, int threads) {
        return solution_dict(solve(p, method, tol, max_iter, std::move(start), std::move(lo), std::move(hi), step, threads));
      },
      py::arg("problem"), py::arg("method") = "auto", py::arg("tol") = py::none(), py::arg("max_iter") = py::none(),
      py::arg("start") = py::none(), py::arg("lo") = py::none(), py::arg("hi") = py::none(), py::arg("step") = 1e-2,
      py::arg("threads") = 1);

  m.def("check_stationarity", &check_stationarity, py::arg("problem"), py::arg("x"), py::arg("tol") = 1e-9);
  m.def(
      "check_kkt",
      [](const Problem& p, const Vec& x, const Vec& lambdas, double lambda0, double tol) {
        const KktReport r = check_kkt(p, x, {lambda0, lambdas}, tol);
        py::dict d;
        d["accepted"] = r.accepted;
        d["failed_clause"] = r.failed_clause;
        d["stationarity_residual"] = r.stationarity_residual;
        d["multiplier_signs_ok"] = r.multiplier_signs_ok;
        d["complementary_slackness_residual"] = r.complementary_slackness_residual;
        d["primal_violation"] = r.primal_violation;
        d["lambda0"] = r.lambda0;
        d["strictly_feasible_point"] = r.strictly_feasible_point;
        return d;
      },
      py::arg("problem"), py::arg("x"), py::arg("lambdas"), py::arg("lambda0") = 1.0, py::arg("tol") = 1e-6);
  m.def(
      "check_local_optimum",
      [](const Problem& p, const Vec& x, double delta, int samples, std::optional<std::uint64_t> seed) {
        const LocalOptimumReport r = check_local_optimum(p, x, delta, samples, seed ? *seed : sampling_seed());
        py::dict d;
        d["refuted"] = r.refuted;
        d["value"] = r.value;
        d["witness"] = r.witness ? py::cast(*r.witness) : py::none();
        d["witness_value"] = r.witness ? py::cast(r.witness_value) : py::none();
        d["feasible_samples"] = r.feasible_samples;
        return d;
      },
      py::arg("problem"), py::arg("x"), py::arg("delta"), py::arg("samples") = 1000, py::arg("seed") = py::none());
  m.def(
      "envelope_sensitivity",
      [](const Problem& p, const std::string& parameter, double r0, double h) {
        const SensitivityReport r = envelope_sensitivity(p, parameter, r0, h);
        py::dict d;
        d["parameter"] = r.parameter;
        d["r0"] = r.r0;
        d["h"] = r.h;
        d["lhs"] = r.lhs;
        d["rhs"] = r.rhs;
        d["discrepancy"] = r.discrepancy;
        d["x_star"] = r.x_star;
        d["multipliers"] = r.lambdas;
        return d;
      },
      py::arg("problem"), py::arg("parameter"), py::arg("r0"), py::arg("h") = 1e-4);
}
