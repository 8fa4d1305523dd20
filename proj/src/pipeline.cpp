#include "clustersync/pipeline.hpp"

#include <chrono>

#include "clustersync/errors.hpp"

namespace clustersync {

RefineMode parse_refine_mode(const std::string& text) {
  if (text == "none") return RefineMode::None;
  if (text == "clusters") return RefineMode::Clusters;
  if (text == "transforms") return RefineMode::Transforms;
  if (text == "both") return RefineMode::Both;
  throw Error(ErrorKind::ValidationError, "refine must be one of none|clusters|transforms|both, got '" + text + "'");
}

const char* to_string(RefineMode mode) {
  switch (mode) {
    case RefineMode::None: return "none";
    case RefineMode::Clusters: return "clusters";
    case RefineMode::Transforms: return "transforms";
    case RefineMode::Both: return "both";
  }
  return "none";
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

PipelineResult run_pipeline(const SparseBlockMatrix& a, int K, const PipelineOptions& options) {
  const int d = a.d();
  if (K < 1 || K > a.n()) throw Error(ErrorKind::InvalidParams, "run_pipeline needs 1 <= K <= n");
  PipelineResult out;

  auto start = Clock::now();
  try {
    out.basis = top_eigenpairs(a, K * d, options.solver);
  } catch (const NoConvergence& e) {
    out.basis = e.best();
    out.no_convergence = true;
  }
  out.timings.eigen_ms = elapsed_ms(start);

  start = Clock::now();
  out.factors = blockwise_cpqr(out.basis.vectors.transpose(), d);
  out.timings.cpqr_ms = elapsed_ms(start);

  start = Clock::now();
  out.initial = assign_and_extract(out.factors, K, d);
  out.timings.recover_ms = elapsed_ms(start);

  start = Clock::now();
  out.result = out.initial;
  if (options.refine == RefineMode::Clusters || options.refine == RefineMode::Both)
    out.result = refine_clusters(out.factors, out.result, options.refine_fraction);
  if (options.refine == RefineMode::Transforms || options.refine == RefineMode::Both)
    out.result = refine_transforms(a, out.result, options.solver);
  out.timings.refine_ms = options.refine == RefineMode::None ? 0.0 : elapsed_ms(start);
  return out;
}

}  // namespace clustersync
