#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clustersync/errors.hpp"
#include "clustersync/io.hpp"
#include "clustersync/metrics.hpp"
#include "clustersync/model.hpp"
#include "clustersync/pipeline.hpp"

namespace py = pybind11;
using namespace clustersync;

namespace {

SparseBlockMatrix from_dense(const Matrix& dense, int d) {
  if (d <= 0 || dense.rows() != dense.cols() || dense.rows() % d != 0)
    throw Error(ErrorKind::InvalidParams, "from_dense: expected a square matrix with side divisible by d");
  const int n = static_cast<int>(dense.rows() / d);
  SparseBlockMatrix a(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Matrix block = dense.block(i * d, j * d, d, d);
      if (!block.isZero(0.0)) a.set_block(i, j, block);
    }
  return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Joint clustering and synchronization over orthogonal groups";

  static py::exception<Error> error(m, "ClusterSyncError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<SparseBlockMatrix>(m, "BlockMatrix")
      .def(py::init<int, int>(), py::arg("n"), py::arg("d"))
      .def_property_readonly("n", &SparseBlockMatrix::n)
      .def_property_readonly("d", &SparseBlockMatrix::d)
      .def_property_readonly("block_count", &SparseBlockMatrix::block_count)
      .def("set_block", [](SparseBlockMatrix& a, int i, int j, const Matrix& b) { a.set_block(i, j, b); })
      .def("block", &SparseBlockMatrix::block)
      .def("multiply", [](const SparseBlockMatrix& a, const Matrix& x) { return a.multiply(x); })
      .def("to_dense", &SparseBlockMatrix::to_dense)
      .def_static("from_dense", &from_dense, py::arg("dense"), py::arg("d"));

  py::class_<GroundTruth>(m, "GroundTruth")
      .def_readonly("n", &GroundTruth::n)
      .def_readonly("K", &GroundTruth::K)
      .def_readonly("d", &GroundTruth::d)
      .def_readonly("labels", &GroundTruth::labels)
      .def_readonly("transforms", &GroundTruth::transforms)
      .def_readonly("sizes", &GroundTruth::sizes);

  m.def(
      "generate",
      [](int n, int K, int d, double p, double q, double sigma, std::uint64_t seed, std::vector<int> sizes) {
        ModelParams params;
        params.n = n;
        params.K = K;
        params.d = d;
        params.p = p;
        params.q = q;
        params.sigma = sigma;
        params.seed = seed;
        params.sizes = std::move(sizes);
        params.validate();
        const GroundTruth gt = generate_ground_truth(params);
        SparseBlockMatrix a = generate_observation(gt, p, q, seed);
        if (sigma > 0.0) a = add_gaussian_noise(a, sigma, seed);
        return py::make_tuple(gt, a);
      },
      py::arg("n"), py::arg("K"), py::arg("d"), py::arg("p"), py::arg("q"), py::arg("sigma") = 0.0,
      py::arg("seed") = 0, py::arg("sizes") = std::vector<int>{},
      "Returns (ground_truth, observation).");

  m.def(
      "recover",
      [](const SparseBlockMatrix& a, int K, const std::string& refine, double refine_fraction, std::uint64_t seed,
         double tolerance) {
        PipelineOptions opt;
        opt.refine = parse_refine_mode(refine);
        opt.refine_fraction = refine_fraction;
        opt.solver.seed = seed;
        opt.solver.tolerance = tolerance;
        PipelineResult run;
        {
          py::gil_scoped_release release;
          run = run_pipeline(a, K, opt);
        }
        py::dict out;
        out["labels"] = run.result.labels;
        out["transforms"] = run.result.transforms;
        out["confidence"] = run.result.confidence;
        out["eigenvalues"] = run.basis.values;
        out["pivots"] = run.factors.pivots;
        out["no_convergence"] = run.no_convergence;
        out["timings_ms"] = py::dict(py::arg("eigen") = run.timings.eigen_ms, py::arg("cpqr") = run.timings.cpqr_ms,
                                     py::arg("recover") = run.timings.recover_ms,
                                     py::arg("refine") = run.timings.refine_ms);
        return out;
      },
      py::arg("a"), py::arg("K"), py::arg("refine") = "none", py::arg("refine_fraction") = 0.10,
      py::arg("seed") = 0, py::arg("tolerance") = 1e-8);

  m.def("exact_recovery", [](const std::vector<int>& est, const std::vector<int>& truth, int K) {
    return exact_recovery(est, truth, K);
  });
  m.def("sync_error", [](const std::vector<Matrix>& est, const GroundTruth& gt) { return sync_error(est, gt); });
  m.def("eta", &eta, py::arg("n"), py::arg("p"), py::arg("q"), py::arg("d"));
  m.def("load_observation", [](const std::string& path) { return io::load_observation(path); });
  m.def("save_observation", [](const std::string& path, const SparseBlockMatrix& a, int K) {
    io::save_observation(path, a, K);
  });
}
