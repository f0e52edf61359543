#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mclp/io.hpp"

namespace py = pybind11;
using namespace mclp;

namespace {

std::vector<std::string> strs(const RatVector& v) {
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(x.str());
  return out;
}

std::vector<std::vector<std::string>> strs(const std::vector<RatVector>& vs) {
  std::vector<std::vector<std::string>> out;
  for (const auto& v : vs) out.push_back(strs(v));
  return out;
}

py::dict solve_text(const std::string& text, size_t max_insert) {
  ProblemFile p = parse_problem(text);
  SolveOptions o;
  o.initial = p.initial;
  o.max_insert = max_insert;
  SolveResult r = solve(p.data, p.rho, o);
  py::dict out;
  out["status"] = to_string(r.status);
  out["message"] = r.message;
  out["iterations"] = r.trace.size();
  out["restarts"] = r.restarts;
  out["trace"] = write_trace(r.trace);
  std::vector<std::string> seqs;
  for (const auto& rec : r.trace) seqs.push_back(to_string(rec.seq));
  out["sequences"] = seqs;
  if (r.status != SolveStatus::Optimal) return out;
  CompactSolution c = compact(p.data, r);
  out["objective"] = c.value.primal.str();
  out["dual_objective"] = c.value.dual.str();
  out["breakpoints"] = strs(c.breakpoints);
  out["u0"] = strs(c.u0);
  out["uN"] = strs(c.uN);
  out["p0"] = strs(c.p0);
  out["pN"] = strs(c.pN);
  out["x"] = strs(c.x);
  out["q"] = strs(c.q);
  std::vector<RatVector> u;
  for (const auto& rs : c.rates) u.push_back(rs.u);
  out["u"] = strs(u);
  out["report"] = format_report(p.data, r);
  return out;
}

py::dict oracle_text(const std::string& text, size_t steps) {
  ProblemFile p = parse_problem(text);
  OracleResult o = oracle(p.data, p.rho, uniform_grid(p.rho.T, steps));
  py::dict out;
  out["status"] = o.status == LpStatus::Optimal ? "optimal" : o.status == LpStatus::Infeasible ? "infeasible" : "unbounded";
  if (o.status == LpStatus::Optimal) out["objective"] = o.objective.str();
  return out;
}

std::string check_text(const std::string& text) {
  ProblemFile p = parse_problem(text);
  validate(p.data, p.rho);
  return to_string(feasibility_check(p.data, p.rho));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact parametric simplex solver for continuous linear programs";
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DegeneracyError>(m, "DegeneracyError", PyExc_ValueError);
  py::register_exception<SignError>(m, "SignError", PyExc_ValueError);
  m.def("solve", &solve_text, py::arg("text"), py::arg("max_insert") = 1,
        "Solve a problem given as JSON text; rationals are returned as strings.");
  m.def("oracle", &oracle_text, py::arg("text"), py::arg("steps"),
        "Objective of the time-discretized problem on a uniform grid.");
  m.def("check", &check_text, py::arg("text"), "Feasibility verdict of a problem given as JSON text.");
}
