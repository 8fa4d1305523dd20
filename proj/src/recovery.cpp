#include "clustersync/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/pending/disjoint_sets.hpp>

#include "clustersync/errors.hpp"

namespace clustersync {

namespace {

constexpr double kZeroColumn = 1e-12;

void check_factors(const BlockCpqrFactors& factors, int K, int d) {
  if (d < 1 || factors.block_dim != d || factors.clusters() != K || K < 1)
    throw Error(ErrorKind::InvalidParams, "factors do not match the requested K and d");
}

}  // namespace

RecoveryResult assign_and_extract(const BlockCpqrFactors& factors, int K, int d) {
  check_factors(factors, K, d);
  const int n = factors.nodes();
  RecoveryResult out;
  out.rank_deficient = factors.rank_deficient;
  out.labels.assign(static_cast<std::size_t>(n), 0);
  out.confidence.assign(static_cast<std::size_t>(n), 0.0);
  out.transforms.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double column_norm = factors.block_column(i).norm();
    if (column_norm < kZeroColumn) {
      out.zero_columns.push_back(i);
      out.transforms.push_back(Matrix::Identity(d, d));
      continue;
    }
    int best = 0;
    double best_norm = -1.0;
    for (int k = 0; k < K; ++k) {
      const double norm = factors.block(k, i).norm();
      if (norm > best_norm) {
        best_norm = norm;
        best = k;
      }
    }
    out.labels[i] = best;
    out.confidence[i] = best_norm / column_norm;
    out.transforms.push_back(polar_factor(factors.block(best, i)).transpose());
  }
  return out;
}

Vector cluster_similarity(const BlockCpqrFactors& factors, std::span<const int> labels, int K, int node) {
  Vector score = Vector::Zero(K);
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  const auto ri = factors.block_column(node);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const int k = labels[j];
    if (k < 0 || k >= K) throw Error(ErrorKind::InvalidParams, "label out of range");
    score(k) += (ri.transpose() * factors.block_column(static_cast<int>(j))).norm();
    ++counts[k];
  }
  for (int k = 0; k < K; ++k) score(k) = counts[k] > 0 ? score(k) / std::sqrt(counts[k]) : 0.0;
  return score;
}

RecoveryResult refine_clusters(const BlockCpqrFactors& factors, const RecoveryResult& result,
                               double fraction) {
  const int n = factors.nodes();
  const int K = factors.clusters();
  if (static_cast<int>(result.labels.size()) != n || static_cast<int>(result.confidence.size()) != n)
    throw Error(ErrorKind::InvalidParams, "recovery result does not match the factors");
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw Error(ErrorKind::InvalidParams, "refinement fraction must lie in [0, 1]");

  RecoveryResult out = result;
  out.refined_nodes.clear();
  const auto count = static_cast<std::size_t>(std::lround(fraction * n));
  if (count == 0) return out;

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return result.confidence[a] < result.confidence[b]; });
  order.resize(count);
  std::sort(order.begin(), order.end());

  std::vector<int> sizes(static_cast<std::size_t>(K), 0);
  for (int label : result.labels) ++sizes[label];
  out.empty_cluster = std::any_of(sizes.begin(), sizes.end(), [](int m) { return m == 0; });

  for (int i : order) {
    const Vector score = cluster_similarity(factors, result.labels, K, i);
    int best = 0;
    for (int k = 1; k < K; ++k)
      if (sizes[k] > 0 && (sizes[best] == 0 || score(k) > score(best))) best = k;
    out.labels[i] = best;
  }
  out.refined_nodes = std::move(order);
  return out;
}

Connectivity connectivity_check(const SparseBlockMatrix& a, std::span<const int> nodes) {
  if (nodes.empty()) throw Error(ErrorKind::InvalidParams, "connectivity_check needs nodes");
  std::vector<int> position(static_cast<std::size_t>(a.n()), -1);
  for (std::size_t t = 0; t < nodes.size(); ++t) position.at(static_cast<std::size_t>(nodes[t])) = static_cast<int>(t);

  const auto m = nodes.size();
  std::vector<std::size_t> rank(m), parent(m);
  boost::disjoint_sets<std::size_t*, std::size_t*> sets(rank.data(), parent.data());
  for (std::size_t t = 0; t < m; ++t) sets.make_set(t);
  for (const auto& e : a.entries()) {
    const int u = position[e.row];
    const int v = position[e.col];
    if (u >= 0 && v >= 0) sets.union_set(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
  }

  Connectivity out;
  out.component.assign(m, -1);
  std::vector<int> id_of_root(m, -1);
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t root = sets.find_set(t);
    if (id_of_root[root] < 0) id_of_root[root] = out.components++;
    out.component[t] = id_of_root[root];
  }
  out.connected = out.components == 1;
  return out;
}

RecoveryResult refine_transforms(const SparseBlockMatrix& a, const RecoveryResult& result,
                                 const SolverConfig& cfg) {
  const int n = a.n();
  const int d = a.d();
  if (static_cast<int>(result.labels.size()) != n || static_cast<int>(result.transforms.size()) != n)
    throw Error(ErrorKind::InvalidParams, "recovery result does not match the matrix");
  RecoveryResult out = result;
  const int K = result.labels.empty() ? 0 : *std::max_element(result.labels.begin(), result.labels.end()) + 1;

  for (int k = 0; k < K; ++k) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (result.labels[i] == k) members.push_back(i);
    if (members.empty()) {
      out.empty_cluster = true;
      continue;
    }
    const Connectivity conn = connectivity_check(a, members);
    if (!conn.connected) out.disconnected_cluster = true;
    for (int c = 0; c < conn.components; ++c) {
      std::vector<int> part;
      for (std::size_t t = 0; t < members.size(); ++t)
        if (conn.component[t] == c) part.push_back(members[t]);
      const EigenBasis basis = restricted_top_eigenpairs(a, part, d, cfg);
      for (std::size_t t = 0; t < part.size(); ++t) {
        const auto row = basis.vectors.middleRows(static_cast<Eigen::Index>(t) * d, d);
        out.transforms[part[t]] = polar_factor(row);
      }
    }
  }
  return out;
}

}  // namespace clustersync
