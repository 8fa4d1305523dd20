#include "clustersync/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "clustersync/errors.hpp"

namespace clustersync {

namespace {

// Clusters as sorted member lists, ordered by smallest member.
std::vector<std::vector<int>> canonical_partition(std::span<const int> labels, int K) {
  std::map<int, std::vector<int>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= K) throw Error(ErrorKind::InvalidParams, "label out of range");
    by_label[labels[i]].push_back(static_cast<int>(i));
  }
  std::vector<std::vector<int>> parts;
  for (auto& [label, members] : by_label) parts.push_back(std::move(members));
  std::sort(parts.begin(), parts.end());
  return parts;
}

}  // namespace

bool exact_recovery(std::span<const int> estimated, std::span<const int> truth, int K) {
  if (estimated.size() != truth.size())
    throw Error(ErrorKind::InvalidParams, "label arrays differ in length");
  return canonical_partition(estimated, K) == canonical_partition(truth, K);
}

double sync_error(std::span<const Matrix> estimated, const GroundTruth& gt) {
  if (static_cast<int>(estimated.size()) != gt.n)
    throw Error(ErrorKind::InvalidParams, "sync_error needs one estimate per node");
  const int d = gt.d;
  double worst = 0.0;
  for (int k = 0; k < gt.K; ++k) {
    Matrix cross = Matrix::Zero(d, d);  // (O^(k))^T Ohat^(k)
    for (int i = 0; i < gt.n; ++i)
      if (gt.labels[i] == k) cross.noalias() += gt.transforms[i].transpose() * estimated[i];
    const Matrix g = polar_factor(cross);
    for (int i = 0; i < gt.n; ++i)
      if (gt.labels[i] == k) worst = std::max(worst, (estimated[i] - gt.transforms[i] * g).norm());
  }
  const double value = worst / std::sqrt(static_cast<double>(d));
  if (!(value > 0.0)) return kLogFloor;
  return std::max(std::log(value), kLogFloor);
}

double eta(int n, double p, double q, int d) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::DomainError, "eta needs 0 < p <= 1");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::DomainError, "eta needs 0 <= q <= 1");
  if (n < 2 || d < 1) throw Error(ErrorKind::DomainError, "eta needs n >= 2 and d >= 1");
  const double log_nd = std::log(static_cast<double>(n) * d);
  return std::sqrt((p * (1.0 - p) + q) * log_nd) / (p * std::sqrt(static_cast<double>(n)));
}

std::optional<double> q_for_eta(int n, double p, double target, int d) {
  if (!(p > 0.0 && p <= 1.0) || !(target >= 0.0)) return std::nullopt;
  const double log_nd = std::log(static_cast<double>(n) * d);
  const double scaled = target * p * std::sqrt(static_cast<double>(n));
  const double q = scaled * scaled / log_nd - p * (1.0 - p);
  // Absorb rounding at the boundary q = 0.
  if (q < 0.0 && q > -1e-15) return 0.0;
  if (q < 0.0 || q > 1.0) return std::nullopt;
  return q;
}

std::optional<double> p_for_eta(int n, double q, double target, int d) {
  if (!(q >= 0.0 && q <= 1.0) || !(target > 0.0)) return std::nullopt;
  // eta^2 n / log(nd) p^2 = p - p^2 + q  =>  (c + 1) p^2 - p - q = 0.
  const double c = target * target * n / std::log(static_cast<double>(n) * d);
  const double p = (1.0 + std::sqrt(1.0 + 4.0 * (c + 1.0) * q)) / (2.0 * (c + 1.0));
  if (!(p > 0.0 && p <= 1.0)) return std::nullopt;
  return p;
}

double snr_ratio(const BlockCpqrFactors& factors, std::span<const int> true_labels, int d) {
  if (factors.clusters() != 2) throw Error(ErrorKind::WrongK, "snr_ratio is defined for K = 2");
  if (factors.block_dim != d || static_cast<int>(true_labels.size()) != factors.nodes())
    throw Error(ErrorKind::InvalidParams, "snr_ratio inputs disagree in shape");
  const int signal_cluster = true_labels[factors.pivots.front()];
  double worst = kInfiniteRatio;
  for (int i = 0; i < factors.nodes(); ++i) {
    if (true_labels[i] != signal_cluster) continue;
    const double noise = factors.block(1, i).norm();
    const double ratio = noise < 1e-300 ? kInfiniteRatio : factors.block(0, i).norm() / noise;
    worst = std::min(worst, ratio);
  }
  return worst;
}

}  // namespace clustersync
