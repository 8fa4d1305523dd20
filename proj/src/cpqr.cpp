#include "clustersync/cpqr.hpp"

#include <numeric>
#include <string>
#include <utility>

#include "clustersync/errors.hpp"

namespace clustersync {

namespace {

void check_permutation(std::span<const int> perm, Eigen::Index cols, int d) {
  if (d < 1 || cols % d != 0) throw Error(ErrorKind::InvalidParams, "column count is not a multiple of d");
  const auto n = static_cast<std::size_t>(cols / d);
  if (perm.size() != n) throw Error(ErrorKind::BadPermutation, "permutation length differs from block count");
  std::vector<char> seen(n, 0);
  for (int v : perm) {
    if (v < 0 || static_cast<std::size_t>(v) >= n || seen[v])
      throw Error(ErrorKind::BadPermutation, "not a bijection on block indices");
    seen[v] = 1;
  }
}

}  // namespace

Matrix apply_block_permutation(const Eigen::Ref<const Matrix>& m, std::span<const int> perm, int d) {
  check_permutation(perm, m.cols(), d);
  Matrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < perm.size(); ++j)
    out.middleCols(static_cast<Eigen::Index>(j) * d, d) = m.middleCols(static_cast<Eigen::Index>(perm[j]) * d, d);
  return out;
}

Matrix apply_inverse_block_permutation(const Eigen::Ref<const Matrix>& m, std::span<const int> perm,
                                       int d) {
  check_permutation(perm, m.cols(), d);
  Matrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < perm.size(); ++j)
    out.middleCols(static_cast<Eigen::Index>(perm[j]) * d, d) = m.middleCols(static_cast<Eigen::Index>(j) * d, d);
  return out;
}

BlockCpqrFactors blockwise_cpqr(const Eigen::Ref<const Matrix>& x, int d) {
  if (d < 1) throw Error(ErrorKind::InvalidParams, "block dimension must be >= 1");
  require_finite(x, "blockwise_cpqr input");
  const Eigen::Index kd = x.rows();
  if (kd % d != 0 || x.cols() % d != 0)
    throw Error(ErrorKind::InvalidParams, "matrix dimensions must be multiples of d");
  const int K = static_cast<int>(kd / d);
  const int n = static_cast<int>(x.cols() / d);
  if (K < 1 || n < K) throw Error(ErrorKind::InvalidParams, "blockwise_cpqr needs 1 <= K <= n");

  BlockCpqrFactors f;
  f.block_dim = d;
  f.q = Matrix::Identity(kd, kd);
  f.perm.resize(static_cast<std::size_t>(n));
  std::iota(f.perm.begin(), f.perm.end(), 0);
  Matrix r = x;

  Vector v;
  for (int t = 0; t < K; ++t) {
    const Eigen::Index row0 = static_cast<Eigen::Index>(t) * d;
    int pivot = t;
    double best = -1.0;
    for (int j = t; j < n; ++j) {
      const double rho = r.block(row0, static_cast<Eigen::Index>(j) * d, kd - row0, d).norm();
      if (rho > best) {
        best = rho;
        pivot = j;
      }
    }
    if (pivot != t) {
      r.middleCols(row0, d).swap(r.middleCols(static_cast<Eigen::Index>(pivot) * d, d));
      std::swap(f.perm[t], f.perm[pivot]);
    }
    f.pivots.push_back(f.perm[t]);

    for (int c = 0; c < d; ++c) {
      const Eigen::Index l = row0 + c;
      const Eigen::Index len = kd - l;
      double alpha = 0.0;
      if (!householder_vector(r.col(l).tail(len), v, alpha)) {
        f.rank_deficient = true;
        continue;
      }
      // R <- (I - 2 v v^T) R on rows l.., Q <- Q (I - 2 v v^T) on columns l..
      auto rows = r.bottomRows(len);
      const Eigen::RowVectorXd vr = v.transpose() * rows;
      rows.noalias() -= 2.0 * v * vr;
      auto cols = f.q.rightCols(len);
      const Vector qv = cols * v;
      cols.noalias() -= 2.0 * qv * v.transpose();
      r(l, l) = alpha;
      r.col(l).tail(len - 1).setZero();
    }
  }

  f.r = apply_inverse_block_permutation(r, f.perm, d);
  return f;
}

}  // namespace clustersync
