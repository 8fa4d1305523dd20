#include "clustersync/rng.hpp"

namespace clustersync {

std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t part : parts) h = mix64(h ^ mix64(part + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace clustersync
