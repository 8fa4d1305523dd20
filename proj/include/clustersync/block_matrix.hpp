#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "clustersync/linalg.hpp"

namespace clustersync {

/// Symmetric n x n block matrix of d x d blocks. Only blocks (i, j) with
/// i < j are stored; block (j, i) reads as the transpose and diagonal blocks
/// are identically zero.
class SparseBlockMatrix {
 public:
  struct Entry {
    int row;
    int col;
  };

  SparseBlockMatrix() = default;
  SparseBlockMatrix(int n, int d);

  int n() const noexcept { return n_; }
  int d() const noexcept { return d_; }
  Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(n_) * d_; }
  std::size_t block_count() const noexcept { return entries_.size(); }

  /// Stores block (i, j); for i > j the transpose is stored at (j, i).
  /// Overwrites an existing block. Throws InvalidParams for i == j.
  void set_block(int i, int j, const Eigen::Ref<const Matrix>& block);

  bool has_block(int i, int j) const;

  /// Block (i, j), or nullopt when absent (including the diagonal).
  std::optional<Matrix> block(int i, int j) const;

  /// Block (i, j) or a zero d x d matrix.
  Matrix block_or_zero(int i, int j) const;

  /// Stored upper blocks in insertion order; view of the d*d column-major values.
  std::span<const Entry> entries() const noexcept { return entries_; }
  Eigen::Map<const Matrix> stored_block(std::size_t index) const {
    return Eigen::Map<const Matrix>(values_.data() + index * block_size(), d_, d_);
  }

  /// Y = A X for an (n d) x b block of vectors, touching each stored block twice.
  Matrix multiply(const Eigen::Ref<const Matrix>& x) const;

  /// Principal block submatrix on `nodes`; node nodes[t] becomes index t.
  SparseBlockMatrix restrict_to(std::span<const int> nodes) const;

  /// Dense (n d) x (n d) copy. Intended for tests and small instances.
  Matrix to_dense() const;

  /// Same dimensions and identical block set with identical values.
  bool operator==(const SparseBlockMatrix& other) const;

 private:
  std::size_t block_size() const noexcept { return static_cast<std::size_t>(d_) * d_; }
  void check_index(int i, int j) const;

  int n_ = 0;
  int d_ = 0;
  std::vector<Entry> entries_;
  std::vector<double> values_;
  std::map<std::pair<int, int>, std::size_t> index_;
};

}  // namespace clustersync
