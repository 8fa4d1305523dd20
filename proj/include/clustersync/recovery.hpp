#pragma once

#include <span>
#include <vector>

#include "clustersync/block_matrix.hpp"
#include "clustersync/cpqr.hpp"
#include "clustersync/eigensolver.hpp"

namespace clustersync {

struct RecoveryResult {
  std::vector<int> labels;           // 0-based cluster per node
  std::vector<Matrix> transforms;    // orthogonal d x d per node
  std::vector<double> confidence;    // max_k ||R_ki||_F / ||R_.i||_F, 0 for zero columns
  bool rank_deficient = false;
  std::vector<int> zero_columns;     // nodes whose block column of R vanished
  bool empty_cluster = false;        // refine_clusters: some cluster had no members
  bool disconnected_cluster = false; // refine_transforms: some cluster graph split
  std::vector<int> refined_nodes;    // refine_clusters: the low-confidence set
};

/// Cluster of node i = argmax_k ||R_ki||_F (smallest k on ties) and
/// O_i = P(R_{label, i})^T.
RecoveryResult assign_and_extract(const BlockCpqrFactors& factors, int K, int d);

/// (1/sqrt|C_k|) sum_{j in C_k} ||R_.i^T R_.j||_F for every k, with the
/// clusters C_k taken from `labels`. Zero for empty clusters.
Vector cluster_similarity(const BlockCpqrFactors& factors, std::span<const int> labels, int K, int node);

/// Reassigns the round(fraction * n) least confident nodes (ties broken by
/// index) to their most similar cluster. Every reassignment is scored against
/// the input clusters; transforms are left untouched.
RecoveryResult refine_clusters(const BlockCpqrFactors& factors, const RecoveryResult& result,
                               double fraction = 0.10);

/// Per estimated cluster (per connected component of its observed graph),
/// O_i = P(Phi_i) from the top-d eigenvectors of A restricted to it.
RecoveryResult refine_transforms(const SparseBlockMatrix& a, const RecoveryResult& result,
                                 const SolverConfig& cfg = {});

struct Connectivity {
  bool connected = true;
  int components = 0;
  std::vector<int> component;  // component id per entry of `nodes`, numbered by first appearance
};

/// Union-find over the observed blocks among `nodes`.
Connectivity connectivity_check(const SparseBlockMatrix& a, std::span<const int> nodes);

}  // namespace clustersync
