#include "clustersync/linalg.hpp"

#include <cmath>
#include <string>

#include "clustersync/errors.hpp"

namespace clustersync {

void require_finite(const Eigen::Ref<const Matrix>& x, const char* what) {
  if (!x.allFinite()) throw Error(ErrorKind::NonFinite, std::string(what) + " contains NaN or Inf");
}

PolarFactors polar_decompose(const Eigen::Ref<const Matrix>& x) {
  if (x.rows() != x.cols() || x.rows() < 1)
    throw Error(ErrorKind::InvalidParams, "polar_decompose expects a non-empty square matrix");
  require_finite(x, "polar_decompose input");
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  PolarFactors out;
  out.orthogonal = u * v.transpose();
  out.psd = v * svd.singularValues().asDiagonal() * v.transpose();
  out.psd = 0.5 * (out.psd + out.psd.transpose()).eval();
  return out;
}

Matrix polar_factor(const Eigen::Ref<const Matrix>& x) {
  if (x.rows() != x.cols() || x.rows() < 1)
    throw Error(ErrorKind::InvalidParams, "polar_factor expects a non-empty square matrix");
  require_finite(x, "polar_factor input");
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix sample_haar_orthogonal(int d, Rng& rng) {
  if (d < 1) throw Error(ErrorKind::InvalidParams, "sample_haar_orthogonal needs d >= 1");
  Matrix g(d, d);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) g(r, c) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& packed = qr.matrixQR();
  for (int c = 0; c < d; ++c) {
    if (packed(c, c) < 0.0) q.col(c) = -q.col(c);
  }
  return q;
}

bool householder_vector(const Eigen::Ref<const Vector>& x, Vector& v, double& alpha) {
  const double norm = x.norm();
  if (!(norm >= tolerance::kZeroVector)) return false;
  const double sign = x(0) >= 0.0 ? 1.0 : -1.0;
  alpha = -sign * norm;
  Vector u = x;
  u(0) -= alpha;
  // |u| >= |x| since u_0 = x_0 + sign(x_0)|x| never cancels.
  v = u / u.norm();
  return true;
}

Matrix householder_reflector(const Eigen::Ref<const Vector>& x) {
  require_finite(x, "householder_reflector input");
  Vector v;
  double alpha = 0.0;
  if (!householder_vector(x, v, alpha))
    throw Error(ErrorKind::ZeroVector, "reflector of a vector with norm below 1e-14");
  const auto n = x.size();
  return Matrix::Identity(n, n) - 2.0 * v * v.transpose();
}

double orthogonality_defect(const Eigen::Ref<const Matrix>& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm();
}

}  // namespace clustersync
