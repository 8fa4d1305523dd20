#pragma once

// Small dense kernels shared by every other module: polar factors,
// Householder reflectors and Haar-distributed orthogonal matrices.

#include <Eigen/Dense>

#include "clustersync/rng.hpp"

namespace clustersync {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace tolerance {
inline constexpr double kReconstruction = 1e-8;
inline constexpr double kOrthogonality = 1e-10;
inline constexpr double kReflector = 1e-12;
inline constexpr double kZeroVector = 1e-14;
}  // namespace tolerance

struct PolarFactors {
  Matrix orthogonal;
  Matrix psd;
};

/// X = P W with P orthogonal and W symmetric PSD, computed from the SVD
/// X = U S V^T as P = U V^T, W = V S V^T. Total: rank-deficient inputs get the
/// (non-unique) U V^T from whatever SVD is computed. Throws NonFinite.
PolarFactors polar_decompose(const Eigen::Ref<const Matrix>& x);

/// Orthogonal part of polar_decompose(x).
Matrix polar_factor(const Eigen::Ref<const Matrix>& x);

/// Haar-distributed element of O(d): QR of a Gaussian matrix with the columns
/// of Q rescaled by the signs of diag(R).
Matrix sample_haar_orthogonal(int d, Rng& rng);

/// I - 2 v v^T mapping x onto alpha e_1 with alpha = -sign(x_1) ||x||,
/// sign(0) = +1. Throws ZeroVector when ||x|| < tolerance::kZeroVector.
Matrix householder_reflector(const Eigen::Ref<const Vector>& x);

/// Unit vector v of householder_reflector(x) and the image coefficient alpha.
/// Returns false (leaving outputs untouched) for a numerically zero x.
bool householder_vector(const Eigen::Ref<const Vector>& x, Vector& v, double& alpha);

/// ||Q^T Q - I||_F.
double orthogonality_defect(const Eigen::Ref<const Matrix>& q);

inline bool is_orthogonal(const Eigen::Ref<const Matrix>& q,
                          double tol = tolerance::kOrthogonality) {
  return q.rows() == q.cols() && orthogonality_defect(q) <= tol;
}

/// Throws NonFinite naming `what` if any entry is NaN or infinite.
void require_finite(const Eigen::Ref<const Matrix>& x, const char* what);

}  // namespace clustersync
