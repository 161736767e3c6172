// Python bindings: the command runner plus spec parsing helpers.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jetsym/errors.hpp"
#include "jetsym/report.hpp"

namespace py = pybind11;

namespace {

py::tuple run_command(const std::string& command, const std::vector<std::string>& args,
                      const std::string& spec_text, std::optional<int> depth,
                      std::optional<double> s, std::optional<int> steps,
                      std::optional<std::string> ic, std::optional<double> tol,
                      std::optional<double> h, std::optional<double> t_end,
                      std::optional<std::string> csv, std::optional<std::string> splitting) {
  jetsym::RunFlags flags{depth, s, steps, ic, tol, h, t_end, csv, splitting};
  jetsym::RunResult res;
  {
    py::gil_scoped_release release;
    res = jetsym::run(command, args, spec_text, flags);
  }
  return py::make_tuple(res.exit_code, res.document.dump(), res.text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of jetsym";
  m.attr("__version__") = jetsym::kToolVersion;
  m.attr("SCHEMA_VERSION") = jetsym::kSchemaVersion;

  // Later registrations are tried first, so the subclass goes last.
  auto error = py::register_exception<jetsym::Error>(m, "JetsymError");
  py::register_exception<jetsym::SyntaxError>(m, "SpecSyntaxError", error.ptr());

  m.def("run", &run_command, py::arg("command"), py::arg("args"), py::arg("spec_text"),
        py::kw_only(), py::arg("depth") = py::none(), py::arg("s") = py::none(),
        py::arg("steps") = py::none(), py::arg("ic") = py::none(), py::arg("tol") = py::none(),
        py::arg("h") = py::none(), py::arg("t_end") = py::none(), py::arg("csv") = py::none(),
        py::arg("splitting") = py::none(),
        "Run one command; returns (exit_code, json_document, text).");

  m.def(
      "normalize_spec",
      [](const std::string& text) { return jetsym::render_spec(jetsym::parse_spec(text)); },
      py::arg("spec_text"), "Parse a specification and print it back in canonical form.");

  m.def(
      "normalize_expression",
      [](const std::string& expr, const std::string& spec_text) {
        const auto spec = jetsym::parse_spec(spec_text);
        return jetsym::render(jetsym::parse_expression(expr, spec), spec.space);
      },
      py::arg("expression"), py::arg("spec_text"),
      "Canonical rendering of an expression over the spec's variables.");

  m.def("sha256_hex", &jetsym::sha256_hex, py::arg("data"));
}
