#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace clustersync {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a list of integers into a key. Order matters; the result is used as
/// the key of an independent random stream.
std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) noexcept;

/// Stream tags, so that e.g. the noise stream of pair (i,j) never collides
/// with its edge stream.
enum class StreamTag : std::uint64_t {
  Transforms = 0x7472616e73ULL,
  Edges = 0x6564676573ULL,
  Noise = 0x6e6f697365ULL,
  Solver = 0x736f6c766572ULL,
  Permutation = 0x7065726dULL,
};

/// Counter-based generator: the k-th output is mix64(key + k * golden gamma).
/// Satisfies UniformRandomBitGenerator, so std distributions work with it.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key) noexcept : key_(key) {}
  Rng(std::uint64_t seed, StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0) noexcept
      : key_(derive_key(seed, {static_cast<std::uint64_t>(tag), a, b})) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double normal() { return normal_(*this); }

  bool bernoulli(double probability) noexcept { return uniform() < probability; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace clustersync
