#include "clustersync/block_matrix.hpp"

#include <string>

#include "clustersync/errors.hpp"

namespace clustersync {

SparseBlockMatrix::SparseBlockMatrix(int n, int d) : n_(n), d_(d) {
  if (n < 1 || d < 1) throw Error(ErrorKind::InvalidParams, "block matrix needs n >= 1 and d >= 1");
}

void SparseBlockMatrix::check_index(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_)
    throw Error(ErrorKind::InvalidParams,
                "block index (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
}

void SparseBlockMatrix::set_block(int i, int j, const Eigen::Ref<const Matrix>& block) {
  check_index(i, j);
  if (i == j) throw Error(ErrorKind::InvalidParams, "diagonal blocks are fixed at zero");
  if (block.rows() != d_ || block.cols() != d_)
    throw Error(ErrorKind::InvalidParams, "block has wrong shape");
  const bool flip = i > j;
  const auto key = flip ? std::make_pair(j, i) : std::make_pair(i, j);
  std::size_t slot;
  if (auto it = index_.find(key); it != index_.end()) {
    slot = it->second;
  } else {
    slot = entries_.size();
    entries_.push_back({key.first, key.second});
    values_.resize(values_.size() + block_size());
    index_.emplace(key, slot);
  }
  Eigen::Map<Matrix> dst(values_.data() + slot * block_size(), d_, d_);
  if (flip) {
    dst = block.transpose();
  } else {
    dst = block;
  }
}

bool SparseBlockMatrix::has_block(int i, int j) const {
  check_index(i, j);
  if (i == j) return false;
  return index_.count(i < j ? std::make_pair(i, j) : std::make_pair(j, i)) > 0;
}

std::optional<Matrix> SparseBlockMatrix::block(int i, int j) const {
  check_index(i, j);
  if (i == j) return std::nullopt;
  const auto it = index_.find(i < j ? std::make_pair(i, j) : std::make_pair(j, i));
  if (it == index_.end()) return std::nullopt;
  if (i < j) return Matrix(stored_block(it->second));
  return Matrix(stored_block(it->second).transpose());
}

Matrix SparseBlockMatrix::block_or_zero(int i, int j) const {
  if (auto b = block(i, j)) return *b;
  return Matrix::Zero(d_, d_);
}

Matrix SparseBlockMatrix::multiply(const Eigen::Ref<const Matrix>& x) const {
  if (x.rows() != dim()) throw Error(ErrorKind::InvalidParams, "multiply: row count mismatch");
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    const auto b = stored_block(e);
    const Eigen::Index ri = static_cast<Eigen::Index>(entries_[e].row) * d_;
    const Eigen::Index rj = static_cast<Eigen::Index>(entries_[e].col) * d_;
    y.middleRows(ri, d_).noalias() += b * x.middleRows(rj, d_);
    y.middleRows(rj, d_).noalias() += b.transpose() * x.middleRows(ri, d_);
  }
  return y;
}

SparseBlockMatrix SparseBlockMatrix::restrict_to(std::span<const int> nodes) const {
  if (nodes.empty()) throw Error(ErrorKind::InvalidParams, "restrict_to needs a non-empty node set");
  std::vector<int> position(static_cast<std::size_t>(n_), -1);
  for (std::size_t t = 0; t < nodes.size(); ++t) {
    check_index(nodes[t], nodes[t]);
    if (position[nodes[t]] != -1) throw Error(ErrorKind::InvalidParams, "restrict_to: repeated node");
    position[nodes[t]] = static_cast<int>(t);
  }
  SparseBlockMatrix sub(static_cast<int>(nodes.size()), d_);
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    const int a = position[entries_[e].row];
    const int b = position[entries_[e].col];
    if (a >= 0 && b >= 0) sub.set_block(a, b, stored_block(e));
  }
  return sub;
}

Matrix SparseBlockMatrix::to_dense() const {
  Matrix dense = Matrix::Zero(dim(), dim());
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    const auto b = stored_block(e);
    const Eigen::Index ri = static_cast<Eigen::Index>(entries_[e].row) * d_;
    const Eigen::Index rj = static_cast<Eigen::Index>(entries_[e].col) * d_;
    dense.block(ri, rj, d_, d_) = b;
    dense.block(rj, ri, d_, d_) = b.transpose();
  }
  return dense;
}

bool SparseBlockMatrix::operator==(const SparseBlockMatrix& other) const {
  if (n_ != other.n_ || d_ != other.d_ || entries_.size() != other.entries_.size()) return false;
  for (const auto& [key, slot] : index_) {
    const auto it = other.index_.find(key);
    if (it == other.index_.end()) return false;
    if (stored_block(slot) != other.stored_block(it->second)) return false;
  }
  return true;
}

}  // namespace clustersync
