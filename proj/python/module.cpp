// Python bindings for the main library operations. Grammars, views, logs and
// view labels cross the boundary in their file formats (JSON text); data
// labels cross as their encoded bytes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "provlab/decode.hpp"
#include "provlab/errors.hpp"
#include "provlab/model_json.hpp"
#include "provlab/oracle.hpp"
#include "provlab/synthgen.hpp"

namespace py = pybind11;
using namespace provlab;

namespace {

struct PyGrammar {
  GrammarFile file;
  AnalysisResult analysis;

  static PyGrammar parse(const std::string &text) {
    PyGrammar g;
    g.file = parse_grammar(text);
    g.analysis = analyze(g.file.grammar, g.file.lambda);
    return g;
  }

  std::vector<std::string> validate() const {
    std::vector<std::string> out;
    for (const auto &v : validate_grammar(file.grammar, file.lambda))
      out.push_back(v.code + ": " + v.message);
    return out;
  }

  View view_from(const py::object &view_text) const {
    if (view_text.is_none()) return default_view(file.grammar, file.lambda);
    return parse_view(file.grammar, view_text.cast<std::string>());
  }
};

struct PyRun {
  std::shared_ptr<RunState> run;

  static PyRun replay(const PyGrammar &g, const std::string &log_text) {
    return {std::make_shared<RunState>(RunState::replay(
        g.file.grammar, g.analysis.classification, parse_log(log_text)))};
  }

  py::dict labels() const {
    py::dict out;
    for (const auto &[id, label] : run->all_labels()) {
      auto bytes = encode_label(label);
      out[py::int_(id)] =
          py::bytes(reinterpret_cast<const char *>(bytes.data()), bytes.size());
    }
    return out;
  }
};

DataLabel label_from_bytes(const py::bytes &b) {
  std::string s = b;
  return decode_label(std::vector<uint8_t>(s.begin(), s.end()));
}

struct PyViewLabel {
  ViewLabel vl;

  static PyViewLabel build(const PyGrammar &g, const py::object &view_text,
                           const std::string &variant) {
    return {label_view(g.file.grammar, g.analysis.classification,
                       g.view_from(view_text), variant_from_name(variant))};
  }

  py::dict query(const py::bytes &a, const py::bytes &b) const {
    QueryVerdict v = decode(label_from_bytes(a), label_from_bytes(b), vl);
    py::dict out;
    out["reachable"] = v.reachable;
    out["matrices_multiplied"] = v.matrices_multiplied;
    return out;
  }
};

} // namespace

PYBIND11_MODULE(_provlab, m) {
  m.doc() = "view-adaptive reachability labeling for workflow provenance";

  // Base first: pybind runs the newest translator first, so the derived
  // exceptions must be registered after the catch-all.
  py::register_exception<Error>(m, "ProvlabError");
  py::register_exception<NotVisibleError>(m, "NotVisibleError");
  py::register_exception<MismatchError>(m, "MismatchError");

  py::class_<PyGrammar>(m, "Grammar")
      .def_static("parse", &PyGrammar::parse, py::arg("text"))
      .def("validate", &PyGrammar::validate)
      .def("serialize", [](const PyGrammar &g) { return serialize_grammar(g.file); })
      .def_property_readonly("recursion_class",
                             [](const PyGrammar &g) {
                               return std::string(
                                   recursion_class_name(g.analysis.classification.cls));
                             })
      .def_property_readonly("safe",
                             [](const PyGrammar &g) { return g.analysis.assignment.safe; })
      .def_property_readonly("start", [](const PyGrammar &g) {
        return g.file.grammar.mod(g.file.grammar.start).name;
      });

  py::class_<PyRun>(m, "Run")
      .def_static("replay", &PyRun::replay, py::arg("grammar"), py::arg("log"))
      .def_property_readonly("item_count",
                             [](const PyRun &r) { return r.run->item_count(); })
      .def_property_readonly("max_depth",
                             [](const PyRun &r) { return r.run->max_depth(); })
      .def("labels", &PyRun::labels)
      .def("item_label", [](const PyRun &r, int id) {
        auto bytes = encode_label(r.run->item_label(id));
        return py::bytes(reinterpret_cast<const char *>(bytes.data()), bytes.size());
      });

  py::class_<PyViewLabel>(m, "ViewLabel")
      .def_static("build", &PyViewLabel::build, py::arg("grammar"),
                  py::arg("view") = py::none(), py::arg("variant") = "default")
      .def_static("parse",
                  [](const std::string &text) {
                    return PyViewLabel{parse_view_label(text)};
                  })
      .def("serialize",
           [](const PyViewLabel &v) { return serialize_view_label(v.vl); })
      .def_property_readonly("variant",
                             [](const PyViewLabel &v) {
                               return std::string(variant_name(v.vl.variant));
                             })
      .def("query", &PyViewLabel::query, py::arg("from_label"), py::arg("to_label"));

  m.def(
      "generate_grammar",
      [](int workflow_size, int module_degree, int nesting_depth, int recursion_length,
         std::uint64_t seed) {
        GenParams p{workflow_size, module_degree, nesting_depth, recursion_length, seed};
        GeneratedGrammar g = gen_grammar(p);
        return serialize_grammar({g.grammar, g.lambda});
      },
      py::arg("workflow_size") = 40, py::arg("module_degree") = 4,
      py::arg("nesting_depth") = 4, py::arg("recursion_length") = 2, py::arg("seed") = 1);

  m.def(
      "generate_run",
      [](const PyGrammar &g, int target_items, std::uint64_t seed) {
        return serialize_log(
            gen_run(g.file.grammar, g.analysis.classification, target_items, seed));
      },
      py::arg("grammar"), py::arg("target_items"), py::arg("seed") = 1);

  m.def(
      "generate_view",
      [](const PyGrammar &g, int size, bool grey, std::uint64_t seed) {
        return serialize_view(g.file.grammar,
                              gen_safe_view(g.file.grammar, g.file.lambda, size, grey, seed));
      },
      py::arg("grammar"), py::arg("size"), py::arg("grey") = false, py::arg("seed") = 1);
}
