// Python bindings: matrices in and out as NumPy arrays, structured results as dicts.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "membed/io.hpp"

namespace py = pybind11;
using namespace membed;

namespace {

py::object to_py(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Tolerances tolerances(const py::dict& kw) {
  Tolerances t;
  for (auto [k, v] : kw) {
    auto key = k.cast<std::string>();
    double x = v.cast<double>();
    if (key == "spec_cluster") t.spec_cluster = x;
    else if (key == "nonneg") t.nonneg = x;
    else if (key == "rowsum") t.rowsum = x;
    else if (key == "residual") t.residual = x;
    else if (key == "rank") t.rank = x;
    else throw py::key_error("unknown tolerance " + key);
  }
  t.validate();
  return t;
}

Schedule schedule_of(const py::list& segments) {
  Schedule s;
  for (auto item : segments) {
    auto seg = item.cast<py::tuple>();
    s.segments.push_back(ConstantSegment{seg[0].cast<Mat>(), seg[1].cast<double>()});
  }
  s.validate();
  return s;
}

}  // namespace

PYBIND11_MODULE(_membed, m) {
  m.doc() = "Markov matrix embedding toolkit";

  // a raw handle, never destroyed, so interpreter shutdown does not touch it
  static PyObject* error = PyErr_NewException("membed.MembedError", PyExc_ValueError, nullptr);
  m.add_object("MembedError", py::reinterpret_borrow<py::object>(error));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    } catch (const InputError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("mat_exp", &mat_exp, py::arg("a"));
  m.def(
      "principal_log", [](const Mat& a, const py::kwargs& kw) { return principal_log(a, tolerances(kw)); },
      py::arg("m"));
  m.def(
      "is_markov", [](const Mat& a, const py::kwargs& kw) { return is_markov(a, tolerances(kw)); }, py::arg("m"));
  m.def(
      "is_generator", [](const Mat& a, const py::kwargs& kw) { return is_generator(a, tolerances(kw)); },
      py::arg("q"));

  m.def(
      "classify",
      [](const Mat& a, const py::kwargs& kw) {
        Tolerances t = tolerances(kw);
        MatrixDocument doc{a, std::nullopt, t};
        return to_py(classify_document(doc, classify(a, t), necessary_checks(a, t), model_recognize(a, t)));
      },
      py::arg("m"));
  m.def(
      "decide",
      [](const Mat& a, bool all_branches, const py::kwargs& kw) {
        DecideOptions opt;
        opt.all_branches = all_branches;
        return to_py(result_json(decide(a, tolerances(kw), opt)));
      },
      py::arg("m"), py::arg("all_branches") = false);

  m.def("delta_min", &delta_min, py::arg("c1"), py::arg("c2"), py::arg("c3"));
  m.def("eq_input_extremal_generators", &eq_input_extremal_generators, py::arg("c1"), py::arg("c2"), py::arg("c3"));

  m.def(
      "equal_input", [](const std::vector<double>& c) { return to_py(result_json(embed_equal_input({c}, static_cast<int>(c.size())))); },
      py::arg("c"));
  m.def("equal_input_matrix", [](const std::vector<double>& c) { return equal_input_matrix({c}); }, py::arg("c"));
  m.def(
      "tn",
      [](double a1, double a2, double a3, double a4, double k1, double k2) {
        return to_py(result_json(embed_tn({a1, a2, a3, a4, k1, k2})));
      },
      py::arg("a1"), py::arg("a2"), py::arg("a3"), py::arg("a4"), py::arg("kappa1"), py::arg("kappa2"));
  m.def(
      "tn_matrix",
      [](double a1, double a2, double a3, double a4, double k1, double k2) { return tn_matrix({a1, a2, a3, a4, k1, k2}); },
      py::arg("a1"), py::arg("a2"), py::arg("a3"), py::arg("a4"), py::arg("kappa1"), py::arg("kappa2"));
  m.def(
      "k3st", [](double x, double y, double z) { return to_py(result_json(embed_k3st({x, y, z}))); }, py::arg("x"),
      py::arg("y"), py::arg("z"));
  m.def(
      "k3st_matrix", [](double x, double y, double z) { return k3st_matrix({x, y, z}); }, py::arg("x"), py::arg("y"),
      py::arg("z"));

  m.def(
      "evolve", [](const py::list& segs) { return evolve(schedule_of(segs)); }, py::arg("segments"),
      "Product of exponentials for a list of (Q, duration) pairs in time order.");
  m.def(
      "peano_baker", [](const py::list& segs, double t) { return peano_baker(schedule_of(segs), t); },
      py::arg("segments"), py::arg("t"));
  m.def(
      "liouville_det", [](const py::list& segs, double t) { return liouville_det(schedule_of(segs), t); },
      py::arg("segments"), py::arg("t"));
  m.def(
      "gcheck", [](const Mat& a) { return to_py(greport_json(g_embed_d3(a))); }, py::arg("m"));
  m.def("b_quantity", &b_quantity, py::arg("m"));
  m.def("star_point", &star_point, py::arg("dim"));
}
