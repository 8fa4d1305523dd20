#include "clustersync/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "clustersync/errors.hpp"

namespace clustersync::io {

namespace {

static_assert(std::endian::native == std::endian::little,
              "JSYN I/O assumes a little-endian host");

constexpr std::array<char, 4> kMagic = {'J', 'S', 'Y', 'N'};

[[noreturn]] void io_error(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorKind::IoError, path.string() + ": " + what);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_error(path, "cannot open for writing");
  return out;
}

template <class T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
bool get(std::ifstream& in, T& value) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof(T)));
}

void write_header(std::ofstream& out, const Header& h) {
  out.write(kMagic.data(), kMagic.size());
  put(out, h.version);
  put(out, h.n);
  put(out, h.K);
  put(out, h.d);
}

Header parse_header(std::ifstream& in, const std::filesystem::path& path) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) io_error(path, "bad magic");
  Header h;
  if (!get(in, h.version) || !get(in, h.n) || !get(in, h.K) || !get(in, h.d))
    io_error(path, "truncated header");
  if (h.version != kFormatVersion) io_error(path, "unsupported version " + std::to_string(h.version));
  if (h.n == 0 || h.d == 0) io_error(path, "header has zero n or d");
  return h;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open for reading");
  return in;
}

void put_record(std::ofstream& out, std::uint32_t a, std::uint32_t b,
                const Eigen::Ref<const Matrix>& values) {
  put(out, a);
  put(out, b);
  for (Eigen::Index c = 0; c < values.cols(); ++c)
    for (Eigen::Index r = 0; r < values.rows(); ++r) put(out, values(r, c));
}

/// Reads the next record; false at a clean end of file.
bool get_record(std::ifstream& in, const std::filesystem::path& path, int d, std::uint32_t& a,
                std::uint32_t& b, Matrix& values) {
  if (!get(in, a)) {
    if (in.eof() && in.gcount() == 0) return false;
    io_error(path, "truncated record");
  }
  if (!get(in, b)) io_error(path, "truncated record");
  values.resize(d, d);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r)
      if (!get(in, values(r, c))) io_error(path, "truncated record");
  return true;
}

}  // namespace

Header read_header(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_header(in, path);
}

void save_observation(const std::filesystem::path& path, const SparseBlockMatrix& a, int K) {
  auto out = open_out(path);
  write_header(out, {kFormatVersion, static_cast<std::uint32_t>(a.n()), static_cast<std::uint32_t>(K),
                     static_cast<std::uint32_t>(a.d())});
  const auto entries = a.entries();
  for (std::size_t e = 0; e < entries.size(); ++e)
    put_record(out, static_cast<std::uint32_t>(entries[e].row),
               static_cast<std::uint32_t>(entries[e].col), a.stored_block(e));
  if (!out) io_error(path, "write failed");
}

SparseBlockMatrix load_observation(const std::filesystem::path& path, Header* header) {
  auto in = open_in(path);
  const Header h = parse_header(in, path);
  SparseBlockMatrix a(static_cast<int>(h.n), static_cast<int>(h.d));
  std::uint32_t i = 0, j = 0;
  Matrix block;
  while (get_record(in, path, static_cast<int>(h.d), i, j, block)) {
    if (i >= j || j >= h.n) io_error(path, "block record must satisfy i < j < n");
    if (!block.allFinite()) io_error(path, "block contains NaN or Inf");
    a.set_block(static_cast<int>(i), static_cast<int>(j), block);
  }
  if (header) *header = h;
  return a;
}

void save_ground_truth(const std::filesystem::path& path, const GroundTruth& gt) {
  gt.validate();
  auto out = open_out(path);
  write_header(out, {kFormatVersion, static_cast<std::uint32_t>(gt.n), static_cast<std::uint32_t>(gt.K),
                     static_cast<std::uint32_t>(gt.d)});
  for (int i = 0; i < gt.n; ++i)
    put_record(out, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(gt.labels[i]),
               gt.transforms[i]);
  if (!out) io_error(path, "write failed");
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  auto in = open_in(path);
  const Header h = parse_header(in, path);
  if (h.K == 0) io_error(path, "ground truth needs K >= 1");
  GroundTruth gt;
  gt.n = static_cast<int>(h.n);
  gt.K = static_cast<int>(h.K);
  gt.d = static_cast<int>(h.d);
  gt.sizes.assign(h.K, 0);
  std::uint32_t node = 0, label = 0;
  Matrix o;
  while (get_record(in, path, gt.d, node, label, o)) {
    if (node != gt.labels.size()) io_error(path, "ground truth records out of order");
    if (label >= h.K) io_error(path, "label out of range");
    gt.labels.push_back(static_cast<int>(label));
    gt.transforms.push_back(o);
    ++gt.sizes[label];
  }
  if (static_cast<int>(gt.labels.size()) != gt.n) io_error(path, "expected n ground truth records");
  try {
    gt.validate();
  } catch (const Error& e) {
    io_error(path, e.what());
  }
  return gt;
}

}  // namespace clustersync::io
