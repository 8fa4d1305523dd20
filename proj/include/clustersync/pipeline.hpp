#pragma once

#include <string>
#include <vector>

#include "clustersync/block_matrix.hpp"
#include "clustersync/cpqr.hpp"
#include "clustersync/eigensolver.hpp"
#include "clustersync/recovery.hpp"

namespace clustersync {

enum class RefineMode { None, Clusters, Transforms, Both };

RefineMode parse_refine_mode(const std::string& text);
const char* to_string(RefineMode mode);

struct PipelineOptions {
  RefineMode refine = RefineMode::None;
  double refine_fraction = 0.10;
  SolverConfig solver;
};

struct PhaseTimings {
  double eigen_ms = 0.0;
  double cpqr_ms = 0.0;
  double recover_ms = 0.0;
  double refine_ms = 0.0;
};

struct PipelineResult {
  EigenBasis basis;
  BlockCpqrFactors factors;
  RecoveryResult initial;  // straight out of assign_and_extract
  RecoveryResult result;   // after the requested refinements
  PhaseTimings timings;
  bool no_convergence = false;
};

/// Spectral decomposition, blockwise CPQR of Phi^T, assignment, then the
/// optional refinements (clusters first, then transforms on the refined
/// labels). A non-converged eigensolve proceeds with the best iterate and is
/// flagged.
PipelineResult run_pipeline(const SparseBlockMatrix& a, int K, const PipelineOptions& options = {});

}  // namespace clustersync
