#pragma once

#include <limits>
#include <optional>
#include <span>

#include "clustersync/cpqr.hpp"
#include "clustersync/model.hpp"

namespace clustersync {

/// log(0) is reported as this floor so that CSV output stays numeric.
inline constexpr double kLogFloor = -746.0;
/// Stand-in for an infinite signal-to-noise ratio.
inline constexpr double kInfiniteRatio = std::numeric_limits<double>::max();

/// The estimated partition equals the true one as a set of sets (cluster
/// indices are irrelevant).
bool exact_recovery(std::span<const int> estimated, std::span<const int> truth, int K);

/// log((1/sqrt d) max_k max_{i in C_k} ||Ohat_i - O_i G_k||_F), natural log,
/// where G_k = P(O^(k)T Ohat^(k)) aligns each true cluster. Floored at kLogFloor.
double sync_error(std::span<const Matrix> estimated, const GroundTruth& gt);

/// sqrt((p(1-p) + q) log(n d)) / (p sqrt n). Throws DomainError for p == 0.
double eta(int n, double p, double q, int d);

/// q that gives eta(n, p, q, d) == target for fixed p; nullopt if outside [0, 1].
std::optional<double> q_for_eta(int n, double p, double target, int d);

/// p in (0, 1] that gives eta(n, p, q, d) == target for fixed q; nullopt if none.
std::optional<double> p_for_eta(int n, double q, double target, int d);

/// min over i in C of ||R_1i||_F / ||R_2i||_F, where C is the true cluster of
/// the first pivot and R_1 is the pivot's block row. Ratios with a vanishing
/// denominator count as kInfiniteRatio. Throws WrongK unless K == 2.
double snr_ratio(const BlockCpqrFactors& factors, std::span<const int> true_labels, int d);

}  // namespace clustersync
