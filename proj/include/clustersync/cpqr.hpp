#pragma once

#include <span>
#include <vector>

#include "clustersync/linalg.hpp"

namespace clustersync {

/// Result of the blockwise column-pivoted QR  X (Pi_n kron I_d) = Q R.
///
/// `r` is stored permuted back (R Pi^T), so block column j of `r` belongs to
/// block column j of the input. `perm[t]` is the input block column that ended
/// up in position t; the first K entries are the pivots in selection order.
struct BlockCpqrFactors {
  Matrix q;  // Kd x Kd orthogonal
  Matrix r;  // Kd x nd
  std::vector<int> pivots;
  std::vector<int> perm;
  int block_dim = 0;
  /// Some reflector acted on a numerically zero residual column.
  bool rank_deficient = false;

  int clusters() const { return block_dim > 0 ? static_cast<int>(q.rows()) / block_dim : 0; }
  int nodes() const { return block_dim > 0 ? static_cast<int>(r.cols()) / block_dim : 0; }
  /// d x d block R_{k i} of the stored (permuted-back) r.
  auto block(int k, int i) const {
    return r.block(static_cast<Eigen::Index>(k) * block_dim, static_cast<Eigen::Index>(i) * block_dim,
                   block_dim, block_dim);
  }
  auto block_column(int i) const {
    return r.middleCols(static_cast<Eigen::Index>(i) * block_dim, block_dim);
  }
};

/// Blockwise CPQR of a Kd x nd matrix with n >= K. K rounds; in round t the
/// block column with the largest Frobenius norm over block rows t..K-1 is
/// pivoted into position t (smallest index on ties), then d Householder
/// reflections clear the subdiagonal of its columns in their original order.
BlockCpqrFactors blockwise_cpqr(const Eigen::Ref<const Matrix>& x, int d);

/// Block column j of the result is block column perm[j] of m.
/// Throws BadPermutation when perm is not a permutation of 0..n-1.
Matrix apply_block_permutation(const Eigen::Ref<const Matrix>& m, std::span<const int> perm, int d);

/// Inverse of apply_block_permutation: block column perm[j] of the result is
/// block column j of m.
Matrix apply_inverse_block_permutation(const Eigen::Ref<const Matrix>& m, std::span<const int> perm,
                                       int d);

}  // namespace clustersync
