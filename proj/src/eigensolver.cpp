#include "clustersync/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace clustersync {

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw Error(ErrorKind::InvalidParams, "solver tolerance must be > 0");
  if (max_iterations < 1) throw Error(ErrorKind::InvalidParams, "max_iterations must be >= 1");
  if (block_size < 0) throw Error(ErrorKind::InvalidParams, "block_size must be >= 0");
}

namespace {

// Krylov basis V with the products AV kept alongside, so Rayleigh-Ritz and
// restarts never need extra matrix-vector products.
class KrylovBasis {
 public:
  KrylovBasis(Eigen::Index rows, Eigen::Index capacity) : v_(rows, capacity), av_(rows, capacity) {}

  Eigen::Index size() const { return cols_; }
  Eigen::Index capacity() const { return v_.cols(); }
  auto v() const { return v_.leftCols(cols_); }
  auto av() const { return av_.leftCols(cols_); }

  void append(const Matrix& block, const Matrix& a_block) {
    v_.middleCols(cols_, block.cols()) = block;
    av_.middleCols(cols_, block.cols()) = a_block;
    cols_ += block.cols();
  }

  /// Replaces the basis by V Y (and AV by AV Y).
  void rotate(const Matrix& y) {
    const Matrix nv = v() * y;
    const Matrix nav = av() * y;
    cols_ = y.cols();
    v_.leftCols(cols_) = nv;
    av_.leftCols(cols_) = nav;
  }

 private:
  Matrix v_;
  Matrix av_;
  Eigen::Index cols_ = 0;
};

Matrix gaussian_block(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) g(r, c) = rng.normal();
  return g;
}

void project_out(const KrylovBasis& basis, Matrix& s) {
  if (basis.size() == 0) return;
  // Classical Gram-Schmidt, applied twice.
  for (int pass = 0; pass < 2; ++pass) s.noalias() -= basis.v() * (basis.v().transpose() * s);
}

Matrix thin_q(const Matrix& s) {
  Eigen::HouseholderQR<Matrix> qr(s);
  return qr.householderQ() * Matrix::Identity(s.rows(), s.cols());
}

// Orthonormal block of `width` columns, orthogonal to the basis, spanning the
// numerically significant directions of `source`; missing directions (when
// `source` is rank deficient relative to the basis) are filled at random.
Matrix next_block(const KrylovBasis& basis, Matrix source, Eigen::Index width, Rng& rng,
                  double scale) {
  const Eigen::Index rows = source.rows();
  project_out(basis, source);
  Matrix taken(rows, 0);
  if (source.cols() > 0) {
    Eigen::ColPivHouseholderQR<Matrix> qr(source);
    const double cutoff = 1e-10 * std::max(scale, 1e-300);
    const Matrix& r = qr.matrixQR();
    Eigen::Index rank = 0;
    const Eigen::Index diag = std::min(r.rows(), r.cols());
    while (rank < diag && rank < width && std::abs(r(rank, rank)) > cutoff) ++rank;
    if (rank > 0) taken = qr.householderQ() * Matrix::Identity(rows, rank);
  }
  Matrix block(rows, width);
  block.leftCols(taken.cols()) = taken;
  if (taken.cols() < width) {
    Matrix fill = gaussian_block(rows, width - taken.cols(), rng);
    project_out(basis, fill);
    fill.noalias() -= taken * (taken.transpose() * fill);
    block.rightCols(fill.cols()) = fill;
  }
  project_out(basis, block);
  return thin_q(block);
}

struct RitzPairs {
  Vector values;   // non-increasing
  Matrix vectors;  // in basis coordinates
};

RitzPairs rayleigh_ritz(const KrylovBasis& basis) {
  Matrix t = basis.v().transpose() * basis.av();
  t = 0.5 * (t + t.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(t);
  const Eigen::Index m = t.rows();
  RitzPairs out{Vector(m), Matrix(m, m)};
  for (Eigen::Index c = 0; c < m; ++c) {
    out.values(c) = es.eigenvalues()(m - 1 - c);
    out.vectors.col(c) = es.eigenvectors().col(m - 1 - c);
  }
  return out;
}

}  // namespace

EigenBasis top_eigenpairs(const SparseBlockMatrix& a, int k, const SolverConfig& cfg) {
  cfg.validate();
  const Eigen::Index nd = a.dim();
  if (k < 1 || k > nd)
    throw Error(ErrorKind::InvalidParams, "top_eigenpairs needs 1 <= k <= n d, got k = " + std::to_string(k));

  const Eigen::Index b = cfg.block_size > 0 ? std::min<Eigen::Index>(cfg.block_size, nd) : k;
  const Eigen::Index capacity = std::min<Eigen::Index>(nd, std::max<Eigen::Index>(4 * b, k + 2 * b));
  const Eigen::Index keep = std::min<Eigen::Index>(k + b, capacity - b);

  Rng rng(cfg.seed, StreamTag::Solver);
  KrylovBasis basis(nd, capacity);
  Matrix source = gaussian_block(nd, b, rng);
  double norm_estimate = 0.0;
  int iterations = 0;

  EigenBasis best;
  best.residual = std::numeric_limits<double>::infinity();

  for (;;) {
    while (basis.size() < capacity) {
      const Eigen::Index width = std::min(b, capacity - basis.size());
      const Matrix block = next_block(basis, std::move(source), width, rng,
                                      basis.size() == 0 ? 1.0 : norm_estimate);
      Matrix a_block = a.multiply(block);
      ++iterations;
      basis.append(block, a_block);
      source = std::move(a_block);
    }

    const RitzPairs ritz = rayleigh_ritz(basis);
    norm_estimate = std::max(std::abs(ritz.values(0)), std::abs(ritz.values(ritz.values.size() - 1)));

    EigenBasis current;
    current.values = ritz.values.head(k);
    current.vectors = basis.v() * ritz.vectors.leftCols(k);
    const Matrix a_x = basis.av() * ritz.vectors.leftCols(k);
    current.residual = (a_x - current.vectors * current.values.asDiagonal()).norm();
    current.norm_estimate = norm_estimate;
    current.iterations = iterations;
    if (ritz.values.size() > k) {
      current.degenerate_gap =
          std::abs(ritz.values(k - 1) - ritz.values(k)) < 1e-10 * std::abs(ritz.values(0));
    }
    if (current.residual < best.residual) best = current;

    const bool exhausted = basis.size() == nd;
    if (current.residual <= cfg.tolerance * norm_estimate || exhausted) return current;
    if (iterations >= cfg.max_iterations)
      throw NoConvergence(best, "residual " + std::to_string(best.residual) + " after " +
                                    std::to_string(iterations) + " block products");

    // Thick restart: keep the leading Ritz vectors and continue from their
    // residual directions.
    basis.rotate(ritz.vectors.leftCols(keep));
    source = basis.av() - basis.v() * ritz.values.head(keep).asDiagonal();
  }
}

EigenBasis restricted_top_eigenpairs(const SparseBlockMatrix& a, std::span<const int> nodes, int k,
                                     const SolverConfig& cfg) {
  return top_eigenpairs(a.restrict_to(nodes), k, cfg);
}

}  // namespace clustersync
