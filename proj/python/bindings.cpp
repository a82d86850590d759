#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "pqm/circuit.hpp"
#include "pqm/decider.hpp"
#include "pqm/language.hpp"
#include "pqm/normalizer.hpp"
#include "pqm/oracles.hpp"
#include "pqm/serialize.hpp"
#include "pqm/structure.hpp"

namespace py = pybind11;
using namespace pqm;

namespace {

// Results cross the boundary as JSON text; the Python package decodes them.
std::string dumps(const Json& j) { return document(j).dump(); }

std::string decide_text(const std::string& text, std::uint64_t seed, bool trace) {
  const Problem p = parse_problem(text);
  const auto combo = normalize(*p.sentence, p.defs);
  const Verdict v = evaluate(*combo, p.defs.dim, seed);
  return dumps({{"command", "decide"}, {"dim", p.defs.dim}, {"verdict", to_json(v, trace)}});
}

std::string circuit_text(const std::string& text) {
  const CircuitDocument doc = parse_circuit_document(text);
  const Circuit c = circuit_from_document(doc);
  const auto trace = run_circuit_traced(c, input_from_document(doc));
  return dumps({{"command", "circuit"},
                {"dim", c.dim()},
                {"final", to_json(trace.back().value)},
                {"impossible", trace.back().value.is_bottom()},
                {"trace", trace_json(c, trace)}});
}

std::string model_check_text(const std::string& text) {
  return dumps(to_json(check_characterization(load_structure(text))));
}

}  // namespace

PYBIND11_MODULE(_pqm, m) {
  m.doc() = "Subspace lattice, decision procedure and finite structure checks";

  static py::exception<Error> error(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", error.ptr());
  py::register_exception<NotUnitary>(m, "NotUnitary", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", error.ptr());

  py::class_<Tolerance>(m, "Tolerance")
      .def(py::init<>())
      .def_readwrite("rank_tol", &Tolerance::rank_tol)
      .def_readwrite("eq_tol", &Tolerance::eq_tol);

  py::class_<Subspace>(m, "Subspace")
      .def_static("bottom", &Subspace::bottom)
      .def_static("top", &Subspace::top)
      .def_static("span", [](const Matrix& vectors) { return span_of(vectors); }, py::arg("vectors"),
                  "Span of the columns of a d x k complex matrix")
      .def_property_readonly("dim", &Subspace::dim)
      .def_property_readonly("rank", &Subspace::rank)
      .def_property_readonly("basis", &Subspace::basis)
      .def("projector", &Subspace::projector)
      .def("is_bottom", &Subspace::is_bottom)
      .def("is_top", &Subspace::is_top)
      .def("__repr__", [](const Subspace& p) { return to_text(p); })
      .def("__eq__", [](const Subspace& p, const Subspace& q) { return eq(p, q); });

  py::class_<UnitaryOp>(m, "Unitary")
      .def(py::init<Matrix>(), py::arg("matrix"))
      .def_property_readonly("dim", &UnitaryOp::dim)
      .def_property_readonly("matrix", &UnitaryOp::matrix)
      .def("inverse", &UnitaryOp::inverse);

  const Tolerance tol;
  m.def("ortho", &ortho);
  m.def("join", &join, py::arg("p"), py::arg("q"), py::arg("tol") = tol);
  m.def("meet", &meet, py::arg("p"), py::arg("q"), py::arg("tol") = tol);
  m.def("leq", &leq, py::arg("p"), py::arg("q"), py::arg("tol") = tol);
  m.def("sasaki_and", &sasaki_and, py::arg("p"), py::arg("q"), py::arg("tol") = tol);
  m.def("sasaki_hook", &sasaki_hook, py::arg("p"), py::arg("q"), py::arg("tol") = tol);
  m.def("compatible", &compatible, py::arg("p"), py::arg("q"), py::arg("tol") = tol);
  m.def("apply_unitary", &apply_unitary, py::arg("u"), py::arg("p"), py::arg("tol") = tol);

  m.def("decide_json", &decide_text, py::arg("text"), py::arg("seed") = 0, py::arg("trace") = false);
  m.def("circuit_json", &circuit_text, py::arg("text"));
  m.def("model_check_json", &model_check_text, py::arg("text"));
  m.def("axiom_suite_json",
        [](int dim, std::size_t samples, std::uint64_t seed) { return dumps(to_json(check_axiom_suite(dim, samples, seed))); },
        py::arg("dim"), py::arg("samples") = 500, py::arg("seed") = 0);
  m.def("rule_suite_json",
        [](int dim, std::size_t samples, std::uint64_t seed) { return dumps(to_json(check_rule_suite(dim, samples, seed))); },
        py::arg("dim"), py::arg("samples") = 500, py::arg("seed") = 0);

  m.def("f_step", &f_step);
  m.def("steps_to_one", &steps_to_one);
  m.def("step_chain", &step_chain);
}
