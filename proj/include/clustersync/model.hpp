#pragma once

// Random instances of the joint clustering / synchronization problem.
//
// Labels are 0-based: node i belongs to cluster labels[i] in [0, K). Every
// random quantity is drawn from a counter-based stream keyed by the seed and
// the object it belongs to (node i, or pair (i, j)), so generation does not
// depend on iteration order.

#include <cstdint>
#include <span>
#include <vector>

#include "clustersync/block_matrix.hpp"
#include "clustersync/linalg.hpp"

namespace clustersync {

struct ModelParams {
  int n = 0;
  int K = 0;
  int d = 0;
  double p = 0.0;
  double q = 0.0;
  std::vector<int> sizes;  // empty means equal_sizes(n, K)
  double sigma = 0.0;
  std::uint64_t seed = 0;

  /// Throws InvalidParams naming the violated invariant.
  void validate() const;

  /// sizes, or the equal split when sizes is empty.
  std::vector<int> resolved_sizes() const;
};

/// Splits n into K sizes differing by at most one; larger clusters first.
std::vector<int> equal_sizes(int n, int K);

struct GroundTruth {
  int n = 0;
  int K = 0;
  int d = 0;
  std::vector<int> labels;
  std::vector<Matrix> transforms;
  std::vector<int> sizes;

  void validate() const;

  /// Node indices of cluster k in increasing order.
  std::vector<int> members(int k) const;
};

/// Contiguous labels (first sizes[0] nodes in cluster 0, ...) and i.i.d. Haar
/// transforms drawn from params.seed.
GroundTruth generate_ground_truth(const ModelParams& params);

/// Relabels nodes: node t of the result is node perm[t] of `gt`.
GroundTruth permute_nodes(const GroundTruth& gt, std::span<const int> perm);

/// Uniformly random permutation of 0..n-1 derived from seed.
std::vector<int> random_permutation(int n, std::uint64_t seed);

/// Pairs i < j: same cluster -> O_i O_j^T with probability p, different
/// clusters -> an independent Haar block with probability q, else absent.
SparseBlockMatrix generate_observation(const GroundTruth& gt, double p, double q,
                                       std::uint64_t seed);

/// O_i O_j^T for every same-cluster pair i != j.
SparseBlockMatrix clean_observation(const GroundTruth& gt);

/// Adds W_ij with i.i.d. N(0, sigma^2) entries to every pair i < j (absent
/// blocks included, so the result is dense in blocks); W_ji = W_ij^T.
/// sigma == 0 returns the input unchanged.
SparseBlockMatrix add_gaussian_noise(const SparseBlockMatrix& a, double sigma, std::uint64_t seed);

}  // namespace clustersync
