#pragma once

#include <cstdint>
#include <span>

#include "clustersync/block_matrix.hpp"
#include "clustersync/errors.hpp"
#include "clustersync/linalg.hpp"

namespace clustersync {

struct SolverConfig {
  /// Convergence when ||A Phi - Phi Lambda||_F <= tolerance * ||A||_est.
  double tolerance = 1e-8;
  /// Cap on block matrix-vector products.
  int max_iterations = 5000;
  /// Width of each Krylov block; 0 selects the number of wanted pairs.
  int block_size = 0;
  /// Seed of the random starting block.
  std::uint64_t seed = 0;

  void validate() const;
};

struct EigenBasis {
  Matrix vectors;   // (n d) x k, orthonormal columns
  Vector values;    // k values, non-increasing
  double residual = 0.0;
  double norm_estimate = 0.0;
  int iterations = 0;
  /// |lambda_k - lambda_{k+1}| < 1e-10 |lambda_1|: the basis is not unique.
  bool degenerate_gap = false;
};

/// Raised when the residual bound is not met; carries the best iterate.
class NoConvergence : public Error {
 public:
  NoConvergence(EigenBasis best, const std::string& what)
      : Error(ErrorKind::NoConvergence, what), best_(std::move(best)) {}
  const EigenBasis& best() const noexcept { return best_; }

 private:
  EigenBasis best_;
};

/// The k eigenpairs of largest algebraic eigenvalue. The matrix is touched only
/// through SparseBlockMatrix::multiply.
EigenBasis top_eigenpairs(const SparseBlockMatrix& a, int k, const SolverConfig& cfg = {});

/// top_eigenpairs of the principal block submatrix on `nodes`; row block t of
/// the result belongs to nodes[t].
EigenBasis restricted_top_eigenpairs(const SparseBlockMatrix& a, std::span<const int> nodes, int k,
                                     const SolverConfig& cfg = {});

}  // namespace clustersync
