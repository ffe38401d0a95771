#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stratsel/allocation.hpp"
#include "stratsel/baselines.hpp"
#include "stratsel/cli.hpp"
#include "stratsel/error.hpp"
#include "stratsel/eval_harness.hpp"
#include "stratsel/frame.hpp"
#include "stratsel/kmeans.hpp"
#include "stratsel/serialize.hpp"
#include "stratsel/stats.hpp"
#include "stratsel/subset_search.hpp"
#include "stratsel/synthgen.hpp"
#include "stratsel/variance.hpp"

namespace py = pybind11;
using namespace stratsel;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<Label, py::array::c_style | py::array::forcecast>;

py::object to_python(const Json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

PopulationFrame make_frame(DoubleArray x, DoubleArray y, std::vector<std::string> names,
                           std::string outcome_name) {
  require(x.ndim() == 2, ErrorCode::kLengthMismatch, "X must be two-dimensional");
  require(y.ndim() == 1, ErrorCode::kLengthMismatch, "y must be one-dimensional");
  const auto n = static_cast<std::size_t>(x.shape(0));
  const auto p = static_cast<std::size_t>(x.shape(1));
  if (names.empty())
    for (std::size_t j = 0; j < p; ++j) names.push_back("X" + std::to_string(j + 1));
  return PopulationFrame(std::vector<double>(x.data(), x.data() + n * p),
                         std::vector<double>(y.data(), y.data() + y.size()), std::move(names),
                         std::move(outcome_name));
}

py::array_t<double> frame_x(const PopulationFrame& f) {
  py::array_t<double> out({f.rows(), f.cols()});
  std::copy(f.covariates().begin(), f.covariates().end(), out.mutable_data());
  return out;
}

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v) {
  py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

AllocationMethod allocator_of(const std::string& name) { return parse_allocation_method(name); }

SynthConfig synth_config(std::size_t n, const std::string& beta, std::size_t p, double snr, double rho,
                         std::uint64_t seed) {
  SynthConfig c;
  c.n = n;
  c.beta = beta_pattern(parse_beta_kind(beta), p);
  c.snr = snr;
  c.rho = rho;
  c.seed = seed;
  return c;
}

}  // namespace

PYBIND11_MODULE(_stratsel, m) {
  m.doc() = "Stratification variable selection and stratified sampling";
  m.attr("__version__") = STRATSEL_VERSION;

  static py::exception<Error> error_type(m, "StratselError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr ptr) {
    try {
      if (ptr) std::rethrow_exception(ptr);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      err.attr("code") = std::string(error_code_name(e.code()));
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  py::class_<PopulationFrame>(m, "Frame")
      .def(py::init(&make_frame), py::arg("X"), py::arg("y"), py::arg("names") = std::vector<std::string>{},
           py::arg("outcome_name") = "Y")
      .def_property_readonly("X", &frame_x)
      .def_property_readonly("y", [](const PopulationFrame& f) {
        return to_array(std::vector<double>(f.outcome().begin(), f.outcome().end()));
      })
      .def_property_readonly("names", &PopulationFrame::covariate_names)
      .def_property_readonly("outcome_name", &PopulationFrame::outcome_name)
      .def_property_readonly("shape", [](const PopulationFrame& f) { return py::make_tuple(f.rows(), f.cols()); })
      .def("__len__", &PopulationFrame::rows);

  m.def("beta_pattern", [](const std::string& kind, std::size_t p) { return beta_pattern(parse_beta_kind(kind), p); },
        py::arg("kind"), py::arg("p") = 20);
  m.def(
      "generate",
      [](std::size_t n, const std::string& beta, std::size_t p, double snr, double rho, std::uint64_t seed) {
        return generate(synth_config(n, beta, p, snr, rho, seed));
      },
      py::arg("n"), py::arg("beta") = "type1", py::arg("p") = 20, py::arg("snr") = 1.0, py::arg("rho") = 0.35,
      py::arg("seed") = 0);
  m.def(
      "generate_train_test",
      [](std::size_t n, const std::string& beta, std::size_t p, double snr, double rho, std::uint64_t seed) {
        return generate_train_test(synth_config(n, beta, p, snr, rho, seed));
      },
      py::arg("n"), py::arg("beta") = "type1", py::arg("p") = 20, py::arg("snr") = 1.0, py::arg("rho") = 0.35,
      py::arg("seed") = 0);

  py::class_<StratumStats>(m, "StratumStats")
      .def_static("from_moments", &StratumStats::from_moments, py::arg("sizes"), py::arg("means"),
                  py::arg("variances"))
      .def_readonly("sizes", &StratumStats::sizes)
      .def_readonly("means", &StratumStats::means)
      .def_readonly("variances", &StratumStats::variances)
      .def_readonly("labels", &StratumStats::labels)
      .def_readonly("overall_mean", &StratumStats::overall_mean)
      .def_readonly("overall_variance", &StratumStats::overall_variance)
      .def_property_readonly("strata", &StratumStats::strata)
      .def_property_readonly("population", &StratumStats::population)
      .def("to_dict", [](const StratumStats& s) { return to_python(to_json(s)); });

  m.def(
      "stratum_stats",
      [](DoubleArray y, LabelArray labels) {
        return stratum_stats(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                             std::span<const Label>(labels.data(), static_cast<std::size_t>(labels.size())));
      },
      py::arg("y"), py::arg("labels"));

  m.def("proportional", [](const StratumStats& s, std::int64_t n) { return proportional(s, n).sizes; },
        py::arg("stats"), py::arg("n"));
  m.def(
      "optimal",
      [](const StratumStats& s, std::int64_t n, std::optional<std::vector<std::int64_t>> lower,
         std::optional<std::vector<std::int64_t>> upper) {
        AllocationBounds b = default_bounds(s, n);
        if (lower) b.lower = *lower;
        if (upper) b.upper = *upper;
        return optimal(s, n, b).sizes;
      },
      py::arg("stats"), py::arg("n"), py::arg("lower") = py::none(), py::arg("upper") = py::none());
  m.def(
      "brute_force_optimal",
      [](const StratumStats& s, std::int64_t n, std::vector<std::int64_t> lower, std::vector<std::int64_t> upper) {
        return brute_force_optimal(s, n, AllocationBounds{std::move(lower), std::move(upper)}).sizes;
      },
      py::arg("stats"), py::arg("n"), py::arg("lower"), py::arg("upper"));
  m.def("allocation_objective",
        [](const StratumStats& s, const std::vector<std::int64_t>& sizes) { return allocation_objective(s, sizes); },
        py::arg("stats"), py::arg("sizes"));
  m.def("stratified_variance",
        [](const StratumStats& s, const std::vector<double>& sizes) { return stratified_variance(s, sizes); },
        py::arg("stats"), py::arg("sizes"));
  m.def("srs_variance", &srs_variance, py::arg("stats"), py::arg("n"));
  m.def("srs_gap", &srs_gap, py::arg("stats"), py::arg("n"));

  py::class_<KMeansOptions>(m, "KMeansOptions")
      .def(py::init<>())
      .def_readwrite("tolerance", &KMeansOptions::tolerance)
      .def_readwrite("max_iterations", &KMeansOptions::max_iterations)
      .def_readwrite("restarts", &KMeansOptions::restarts);

  py::class_<StratumPartition>(m, "Partition")
      .def_readonly("features", &StratumPartition::features)
      .def_readonly("k", &StratumPartition::k)
      .def_readonly("seed", &StratumPartition::seed)
      .def_readonly("iterations", &StratumPartition::iterations)
      .def_readonly("converged", &StratumPartition::converged)
      .def_property_readonly("labels", [](const StratumPartition& p) { return to_array(p.train_labels); })
      .def_property_readonly("centroids",
                             [](const StratumPartition& p) {
                               py::array_t<double> out({static_cast<std::size_t>(p.k), p.dims()});
                               std::copy(p.centroids.begin(), p.centroids.end(), out.mutable_data());
                               return out;
                             })
      .def("assign", [](const StratumPartition& p, const PopulationFrame& f) { return to_array(kmeans_assign(p, f)); })
      .def("wcss", &wcss)
      .def("to_dict", [](const StratumPartition& p) { return to_python(to_json(p)); });

  m.def("kmeans_fit", &kmeans_fit, py::arg("frame"), py::arg("features"), py::arg("k"), py::arg("seed") = 0,
        py::arg("options") = KMeansOptions{});

  m.def(
      "select",
      [](const PopulationFrame& frame, int k, std::size_t theta, std::int64_t n, const std::string& allocator,
         const std::string& metric, std::uint64_t seed, unsigned threads) {
        SearchConfig c;
        c.k = k;
        c.theta = theta;
        c.n = n;
        c.allocator = allocator_of(allocator);
        c.seed = seed;
        c.threads = threads;
        SelectionResult r;
        {
          py::gil_scoped_release release;
          if (metric == "variance")
            r = sfs_variance_reduction(frame, c);
          else if (metric == "wcss")
            r = sfs_wcss(frame, c);
          else
            throw Error(ErrorCode::kBadConfig, "metric must be 'variance' or 'wcss'");
        }
        return to_python(to_json(r, &frame.covariate_names()));
      },
      py::arg("frame"), py::arg("k") = 6, py::arg("theta") = 5, py::arg("n") = 0,
      py::arg("allocator") = "proportional", py::arg("metric") = "variance", py::arg("seed") = 0,
      py::arg("threads") = 1);

  m.def("pick_covariate", &pick_covariate, py::arg("frame"));

  m.def(
      "evaluate",
      [](const PopulationFrame& train, const PopulationFrame& test, const std::vector<std::string>& methods,
         const std::vector<std::string>& allocators, int k, std::size_t theta, std::int64_t n,
         std::size_t replications, std::uint64_t seed, unsigned threads) {
        ExperimentSpec spec;
        for (const auto& name : methods) spec.methods.push_back(parse_method(name));
        spec.allocators.clear();
        for (const auto& name : allocators) spec.allocators.push_back(allocator_of(name));
        spec.k = k;
        spec.theta = theta;
        spec.n = n;
        spec.replications = replications;
        spec.seed = seed;
        spec.threads = threads;
        EvaluationReport report;
        {
          py::gil_scoped_release release;
          report = run_experiment(train, test, spec);
        }
        return to_python(to_json(report));
      },
      py::arg("train"), py::arg("test"),
      py::arg("methods") = std::vector<std::string>{"SRS", "CUPED", "COSS", "K-means", "SFS-KM", "SFS-KM-V"},
      py::arg("allocators") = std::vector<std::string>{"proportional"}, py::arg("k") = 6, py::arg("theta") = 5,
      py::arg("n") = 1000, py::arg("replications") = 10000, py::arg("seed") = 0, py::arg("threads") = 1);

  m.def(
      "cli_main",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        py::print(out.str(), py::arg("end") = "");
        if (!err.str().empty())
          py::print(err.str(), py::arg("end") = "", py::arg("file") = py::module_::import("sys").attr("stderr"));
        return code;
      },
      py::arg("args"));
}
