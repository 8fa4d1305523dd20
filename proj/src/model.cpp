#include "clustersync/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "clustersync/errors.hpp"

namespace clustersync {

namespace {

void invalid(const std::string& what) { throw Error(ErrorKind::InvalidParams, what); }

}  // namespace

std::vector<int> equal_sizes(int n, int K) {
  if (K < 1 || n < K) invalid("equal_sizes needs 1 <= K <= n");
  std::vector<int> sizes(static_cast<std::size_t>(K), n / K);
  for (int k = 0; k < n % K; ++k) ++sizes[k];
  return sizes;
}

std::vector<int> ModelParams::resolved_sizes() const {
  return sizes.empty() ? equal_sizes(n, K) : sizes;
}

void ModelParams::validate() const {
  if (n < 1) invalid("n must be >= 1");
  if (K < 1) invalid("K must be >= 1");
  if (K > n) invalid("K must not exceed n");
  if (d < 1) invalid("d must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) invalid("p must lie in [0, 1]");
  if (!(q >= 0.0 && q <= 1.0)) invalid("q must lie in [0, 1]");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) invalid("sigma must be finite and >= 0");
  if (!sizes.empty()) {
    if (static_cast<int>(sizes.size()) != K) invalid("sizes must have K entries");
    if (std::any_of(sizes.begin(), sizes.end(), [](int m) { return m < 1; }))
      invalid("every cluster size must be >= 1");
    if (std::accumulate(sizes.begin(), sizes.end(), 0) != n) invalid("sizes must sum to n");
  }
}

void GroundTruth::validate() const {
  if (n < 1 || K < 1 || d < 1) invalid("ground truth dimensions must be positive");
  if (static_cast<int>(labels.size()) != n || static_cast<int>(transforms.size()) != n)
    invalid("ground truth arrays must have n entries");
  if (static_cast<int>(sizes.size()) != K) invalid("ground truth sizes must have K entries");
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (int label : labels) {
    if (label < 0 || label >= K) invalid("label out of range");
    ++counts[label];
  }
  for (int k = 0; k < K; ++k) {
    if (counts[k] == 0) invalid("cluster " + std::to_string(k) + " is empty");
    if (counts[k] != sizes[k]) invalid("sizes disagree with label counts");
  }
  for (const auto& o : transforms) {
    if (o.rows() != d || o.cols() != d) invalid("transform has wrong shape");
  }
}

std::vector<int> GroundTruth::members(int k) const {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (labels[i] == k) out.push_back(i);
  return out;
}

GroundTruth generate_ground_truth(const ModelParams& params) {
  params.validate();
  GroundTruth gt;
  gt.n = params.n;
  gt.K = params.K;
  gt.d = params.d;
  gt.sizes = params.resolved_sizes();
  gt.labels.reserve(static_cast<std::size_t>(gt.n));
  for (int k = 0; k < gt.K; ++k) gt.labels.insert(gt.labels.end(), gt.sizes[k], k);
  gt.transforms.reserve(static_cast<std::size_t>(gt.n));
  for (int i = 0; i < gt.n; ++i) {
    Rng rng(params.seed, StreamTag::Transforms, static_cast<std::uint64_t>(i));
    gt.transforms.push_back(sample_haar_orthogonal(gt.d, rng));
  }
  return gt;
}

std::vector<int> random_permutation(int n, std::uint64_t seed) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed, StreamTag::Permutation);
  // Fisher-Yates; std::shuffle's exact draws are implementation-defined.
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

GroundTruth permute_nodes(const GroundTruth& gt, std::span<const int> perm) {
  if (static_cast<int>(perm.size()) != gt.n) throw Error(ErrorKind::BadPermutation, "length mismatch");
  std::vector<char> seen(perm.size(), 0);
  for (int v : perm) {
    if (v < 0 || v >= gt.n || seen[v]) throw Error(ErrorKind::BadPermutation, "not a permutation");
    seen[v] = 1;
  }
  GroundTruth out = gt;
  for (int t = 0; t < gt.n; ++t) {
    out.labels[t] = gt.labels[perm[t]];
    out.transforms[t] = gt.transforms[perm[t]];
  }
  return out;
}

SparseBlockMatrix generate_observation(const GroundTruth& gt, double p, double q,
                                       std::uint64_t seed) {
  gt.validate();
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
    invalid("edge probabilities must lie in [0, 1]");
  SparseBlockMatrix a(gt.n, gt.d);
  for (int i = 0; i < gt.n; ++i) {
    for (int j = i + 1; j < gt.n; ++j) {
      const bool same = gt.labels[i] == gt.labels[j];
      const double prob = same ? p : q;
      if (prob <= 0.0) continue;
      Rng rng(seed, StreamTag::Edges, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      if (!rng.bernoulli(prob)) continue;
      if (same) {
        a.set_block(i, j, gt.transforms[i] * gt.transforms[j].transpose());
      } else {
        a.set_block(i, j, sample_haar_orthogonal(gt.d, rng));
      }
    }
  }
  return a;
}

SparseBlockMatrix clean_observation(const GroundTruth& gt) {
  gt.validate();
  SparseBlockMatrix a(gt.n, gt.d);
  for (int i = 0; i < gt.n; ++i)
    for (int j = i + 1; j < gt.n; ++j)
      if (gt.labels[i] == gt.labels[j]) a.set_block(i, j, gt.transforms[i] * gt.transforms[j].transpose());
  return a;
}

SparseBlockMatrix add_gaussian_noise(const SparseBlockMatrix& a, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) invalid("sigma must be finite and >= 0");
  if (sigma == 0.0) return a;
  const int n = a.n();
  const int d = a.d();
  SparseBlockMatrix out(n, d);
  Matrix w(d, d);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Rng rng(seed, StreamTag::Noise, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) w(r, c) = sigma * rng.normal();
      if (auto b = a.block(i, j)) w += *b;
      out.set_block(i, j, w);
    }
  }
  return out;
}

}  // namespace clustersync
