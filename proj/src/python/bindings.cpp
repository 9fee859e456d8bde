// Python bindings.  Structures cross the boundary as literal strings.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rose/error.hpp"
#include "rose/fitness.hpp"
#include "rose/flex.hpp"
#include "rose/harness.hpp"
#include "rose/repair.hpp"

namespace py = pybind11;
using namespace rose;

namespace {

struct PyParser {
  std::shared_ptr<const Grammar> grammar;
  std::shared_ptr<const InterlinguaSpec> spec;
  std::shared_ptr<const RobustParser> parser;

  PyParser(const std::string& grammar_text, std::optional<std::string> spec_text) {
    grammar = std::make_shared<const Grammar>(Grammar::parse(grammar_text));
    if (spec_text) spec = std::make_shared<const InterlinguaSpec>(InterlinguaSpec::parse(*spec_text));
    parser = std::make_shared<const RobustParser>(grammar, spec);
  }

  std::string literal(const Value& v) const { return spec ? to_literal(v, *spec) : to_literal(v); }

  py::dict analysis(const Analysis& a) const {
    py::dict d;
    d["value"] = literal(a.value);
    d["category"] = a.category;
    d["begin"] = a.begin;
    d["end"] = a.end;
    d["skipped"] = a.skipped;
    py::list ins;
    for (const auto& i : a.inserted) ins.append(py::make_tuple(i.nonterminal, i.penalty));
    d["inserted"] = ins;
    d["penalty"] = a.deviation_penalty;
    return d;
  }

  py::list parse(const std::string& sentence, const std::string& mode, std::size_t max_penalty,
                 std::size_t beam_width) const {
    FlexConfig c;
    c.mode = parse_flex_mode(mode);
    c.max_penalty = max_penalty;
    c.beam_width = beam_width;
    c.spec = spec.get();
    py::list out;
    for (const auto& a : parser->parse(tokenize(sentence), c)) out.append(analysis(a));
    return out;
  }

  py::dict chunks(const std::string& sentence) const {
    const ChunkSet cs = parser->chunks(tokenize(sentence));
    py::list list;
    for (const auto& a : cs.chunks) list.append(analysis(a));
    py::dict d;
    d["chunks"] = list;
    d["uncovered"] = cs.uncovered;
    return d;
  }
};

std::vector<FsPtr> structures(const std::vector<std::string>& literals) {
  std::vector<FsPtr> out;
  for (const auto& l : literals) out.push_back(parse_fs(l));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust GLR parsing with genetic-programming repair";

  static py::exception<Error> error(m, "RoseError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("tokenize", &tokenize);

  py::class_<InterlinguaSpec, std::shared_ptr<InterlinguaSpec>>(m, "Spec")
      .def_static("parse", [](const std::string& t) { return std::make_shared<InterlinguaSpec>(InterlinguaSpec::parse(t)); })
      .def_static("load", [](const std::string& p) { return std::make_shared<InterlinguaSpec>(InterlinguaSpec::load(p)); })
      .def("is_valid", [](const InterlinguaSpec& s, const std::string& lit) { return is_valid(*parse_fs(lit), s); })
      .def("serialize", &InterlinguaSpec::serialize);

  py::class_<StatModel>(m, "StatModel")
      .def_static("parse", &StatModel::parse)
      .def_static("load", &StatModel::load)
      .def("mi", &StatModel::mi)
      .def("serialize", &StatModel::serialize);

  py::class_<FitnessExpression>(m, "Fitness")
      .def_static("parse", &FitnessExpression::parse)
      .def_static("load", &FitnessExpression::load)
      .def("evaluate", [](const FitnessExpression& f, double x1, double x2, double x3) { return f.evaluate({x1, x2, x3}); })
      .def("__str__", &FitnessExpression::to_string);

  py::class_<PyParser>(m, "Parser")
      .def(py::init<const std::string&, std::optional<std::string>>(), py::arg("grammar"), py::arg("spec") = py::none())
      .def("parse", &PyParser::parse, py::arg("sentence"), py::arg("mode") = "mdp", py::arg("max_penalty") = 1,
           py::arg("beam_width") = 256)
      .def("chunks", &PyParser::chunks, py::arg("sentence"));

  m.def(
      "repair",
      [](const std::vector<std::string>& chunks, const InterlinguaSpec& spec, const FitnessExpression& fitness,
         const StatModel& stats, std::uint64_t seed) {
        GpParams params;
        params.seed = seed;
        py::list out;
        for (const auto& h : evolve(structures(chunks), spec, fitness, stats, params))
          out.append(py::make_tuple(to_literal(*h.result, spec), h.fitness, h.program.key()));
        return out;
      },
      py::arg("chunks"), py::arg("spec"), py::arg("fitness"), py::arg("stats"), py::arg("seed") = 1);

  m.def("train_mi", [](const std::vector<std::string>& gold, const InterlinguaSpec& spec) {
    return train_mi(structures(gold), spec);
  });
  m.def("similarity", [](const std::string& candidate, const std::string& gold) {
    const Similarity s = similarity(*parse_fs(candidate), *parse_fs(gold));
    return py::make_tuple(s.precision, s.recall, s.f1);
  });
  m.def(
      "grade",
      [](std::optional<std::string> result, const std::string& gold) {
        return std::string(to_string(grade(result ? parse_fs(*result) : nullptr, *parse_fs(gold))));
      },
      py::arg("result"), py::arg("gold"));
  m.def("size", [](const std::string& lit) { return size(*parse_fs(lit)); });
  m.def("canonical", [](const std::string& lit, const InterlinguaSpec& spec) { return to_literal(*parse_fs(lit), spec); });
}
