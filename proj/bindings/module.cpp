// Python bindings for the core operations: sampling, distances, block
// classification, certificates, and the experiment harness.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lrp/harness.hpp"
#include "lrp/metric.hpp"
#include "lrp/renorm.hpp"

namespace py = pybind11;
using namespace lrp;

namespace {

Params make_params(int d, double s, double beta, const std::string& norm,
                   const std::string& boundary, bool force_nn) {
  Params p{d, s, beta, norm_from_string(norm), boundary_from_string(boundary), force_nn};
  p.validate();
  return p;
}

py::object json_to_py(const nlohmann::json& j) {
  const auto mod = py::module_::import("json");
  return mod.attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "long-range percolation simulation and verification toolkit";

  py::class_<Params>(m, "Params")
      .def(py::init(&make_params), py::arg("d"), py::arg("s"), py::arg("beta"),
           py::arg("norm") = "euclidean", py::arg("boundary") = "free",
           py::arg("force_nn") = false)
      .def_readonly("d", &Params::d)
      .def_readonly("s", &Params::s)
      .def_readonly("beta", &Params::beta)
      .def_readonly("force_nn", &Params::force_nn)
      .def("to_json", [](const Params& p) { return params_to_json(p).dump(); })
      .def_static("from_json",
                  [](const std::string& text) {
                    return params_from_json(nlohmann::json::parse(text));
                  })
      .def("__repr__", [](const Params& p) {
        return "Params(" + params_to_json(p).dump() + ")";
      });

  py::class_<Box>(m, "Box")
      .def(py::init([](Point lo, Coord side) { return make_box(std::move(lo), side); }),
           py::arg("lo"), py::arg("side"))
      .def_readonly("lo", &Box::lo)
      .def_readonly("side", &Box::side);

  py::class_<Configuration>(m, "Configuration")
      .def_property_readonly("edge_count", &Configuration::edge_count)
      .def_property_readonly("params", &Configuration::params)
      .def_property_readonly("halo", &Configuration::halo)
      .def("edges",
           [](const Configuration& c) {
             std::vector<std::pair<Point, Point>> out;
             out.reserve(c.edge_count());
             for (const auto& [u, v] : c.edges()) {
               out.emplace_back(c.point_of(u), c.point_of(v));
             }
             return out;
           })
      .def("save", [](const Configuration& c, const std::string& path) { save_bundle(c, path); });

  m.def("connection_probability", &connection_probability, py::arg("params"), py::arg("k"));

  m.def(
      "sample_configuration",
      [](const Params& params, const Box& box, Coord halo, std::uint64_t seed,
         const std::string& backend, std::uint64_t max_edges) {
        SampleOptions opts;
        opts.max_edges = max_edges;
        return sample_configuration(params, box, halo, seed, backend_from_string(backend), opts);
      },
      py::arg("params"), py::arg("box"), py::arg("halo"), py::arg("seed"),
      py::arg("backend") = "skip", py::arg("max_edges") = 100'000'000ULL);

  m.def("load_bundle", [](const std::string& path) { return load_bundle(path); });

  m.def(
      "chemical_distance",
      [](const Configuration& config, const Point& x, const Point& y, bool want_witness) {
        const auto res = chemical_distance(config, x, y, want_witness);
        py::dict out;
        out["reachable"] = res.reachable();
        out["distance"] = res.value ? py::object(py::int_(*res.value)) : py::none();
        if (res.witness) {
          py::list verts;
          for (const Point& v : res.witness->vertices) verts.append(v);
          out["witness"] = verts;
        }
        return out;
      },
      py::arg("config"), py::arg("x"), py::arg("y"), py::arg("want_witness") = false);

  m.def(
      "classify_block",
      [](const Configuration& config, Coord M, int level, const Point& corner) {
        return json_to_py(status_to_json(classify_block(config, BlockHierarchy(M),
                                                        Block{level, corner})));
      },
      py::arg("config"), py::arg("M"), py::arg("level"), py::arg("corner"));

  m.def("block_side",
        [](Coord M, int level) { return BlockHierarchy(M).block_side(level); });

  m.def(
      "check_inequalities",
      [](int d, double s, double s_prime, double beta, double lnM, std::int64_t kmax) {
        const ConstantsSpec spec{d, s, s_prime, beta, lnM};
        return json_to_py(certificate_to_json(check_inequalities(spec, kmax, kmax), spec));
      },
      py::arg("d"), py::arg("s"), py::arg("s_prime"), py::arg("beta"), py::arg("lnM"),
      py::arg("kmax") = 200);

  m.def("find_min_lnM", &find_min_lnM, py::arg("d"), py::arg("s"), py::arg("s_prime"),
        py::arg("beta"), py::arg("kmax") = 200);

  m.def(
      "iterate_recursion",
      [](int d, std::int64_t kmax) {
        const auto table = iterate_recursion(d, kmax);
        py::dict out;
        out["d"] = table.d;
        out["inductive_ok"] = table.inductive_ok;
        out["sum_pk"] = table.sum_pk;
        py::list rows;
        for (const auto& row : table.rows) {
          py::dict r;
          r["k"] = row.k;
          r["ln_pk"] = row.ln_pk;
          r["ln_bound"] = row.ln_bound;
          r["ok"] = row.ok;
          rows.append(r);
        }
        out["rows"] = rows;
        return out;
      },
      py::arg("d"), py::arg("kmax") = 200);

  m.def(
      "empirical_p0",
      [](const Params& params, Coord M, std::int64_t trials, std::uint64_t seed) {
        const auto est = empirical_p0(params, M, trials, seed);
        py::dict out;
        out["empirical"] = est.empirical;
        out["exact"] = est.exact;
        out["trials"] = est.trials;
        out["bad"] = est.bad;
        return out;
      },
      py::arg("params"), py::arg("M"), py::arg("trials"), py::arg("seed"));

  m.def(
      "run_ratio_experiment",
      [](const Params& params, const std::vector<Coord>& distances,
         const std::vector<double>& direction, std::int64_t trials, std::uint64_t seed,
         Coord margin) {
        ExperimentPlan plan{params, distances, direction, trials, seed, margin};
        const auto result = run_ratio_experiment(plan);
        py::dict out;
        out["csv"] = result_to_csv(result);
        out["metadata"] = json_to_py(result_metadata(result));
        py::list records;
        for (const auto& rec : result.records) {
          py::dict r;
          r["x_norm"] = rec.x_norm;
          r["n_finite"] = rec.n_finite;
          r["n_unreachable"] = rec.n_unreachable;
          r["d_mean"] = rec.d_mean;
          r["d_median"] = rec.d_median;
          r["d_q05"] = rec.d_q05;
          r["d_q95"] = rec.d_q95;
          r["ratio_mean"] = rec.ratio_mean;
          r["ratio_median"] = rec.ratio_median;
          r["ratio_q05"] = rec.ratio_q05;
          r["ratio_q95"] = rec.ratio_q95;
          records.append(r);
        }
        out["records"] = records;
        return out;
      },
      py::arg("params"), py::arg("distances"), py::arg("direction"), py::arg("trials"),
      py::arg("seed"), py::arg("margin") = 16);

  m.def(
      "estimate_block_goodness",
      [](const Params& params, Coord M, int level, std::int64_t trials, std::uint64_t seed) {
        py::list rows;
        for (const auto& row : estimate_block_goodness(params, M, level, trials, seed)) {
          py::dict r;
          r["level"] = row.level;
          r["trials"] = row.trials;
          r["bad"] = row.bad;
          r["p_hat"] = row.p_hat;
          r["std_error"] = row.std_error;
          r["exact"] = row.exact ? py::object(py::float_(*row.exact)) : py::none();
          rows.append(r);
        }
        return rows;
      },
      py::arg("params"), py::arg("M"), py::arg("level"), py::arg("trials"), py::arg("seed"));

  py::register_exception<BudgetError>(m, "BudgetError");
  py::register_exception<BundleError>(m, "BundleError");

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
