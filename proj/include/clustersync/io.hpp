#pragma once

// JSYN binary container, little-endian throughout.
//
//   header  : magic "JSYN" (4 bytes), version u32 (= 1), n u32, K u32, d u32
//   records : until end of file, each (a u32, b u32, d*d f64 column-major)
//
// Observation files carry one record per stored block with a = i < b = j.
// Ground-truth files carry exactly n records (a = node, b = 0-based label,
// values = O_node), in node order.

#include <filesystem>

#include "clustersync/block_matrix.hpp"
#include "clustersync/model.hpp"

namespace clustersync::io {

inline constexpr std::uint32_t kFormatVersion = 1;

/// Header of a JSYN file; K is informational for observation files.
struct Header {
  std::uint32_t version = kFormatVersion;
  std::uint32_t n = 0;
  std::uint32_t K = 0;
  std::uint32_t d = 0;
};

void save_observation(const std::filesystem::path& path, const SparseBlockMatrix& a, int K);
SparseBlockMatrix load_observation(const std::filesystem::path& path, Header* header = nullptr);

void save_ground_truth(const std::filesystem::path& path, const GroundTruth& gt);
GroundTruth load_ground_truth(const std::filesystem::path& path);

Header read_header(const std::filesystem::path& path);

}  // namespace clustersync::io
