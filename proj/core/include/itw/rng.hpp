#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace itw {

/// Independent noise streams consumed by one Monte Carlo path.
enum class StreamTag : std::uint64_t { wiener = 0, jumps = 1, marks = 2 };

/// SplitMix64 finalizer. Bijective on u64, so distinct inputs give
/// distinct outputs.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Splittable-counter seed derivation: the (path, stream) pair is packed
/// into a counter and pushed through the SplitMix64 finalizer on top of the
/// master seed. For a fixed master seed, distinct (path_index, tag) pairs
/// map to distinct seeds.
constexpr std::uint64_t derive_path_seed(std::uint64_t master_seed,
                                         std::uint64_t path_index,
                                         StreamTag tag) {
  const std::uint64_t counter = path_index * 4 + static_cast<std::uint64_t>(tag) + 1;
  return mix64(master_seed + 0x9E3779B97F4A7C15ULL * counter);
}

/// Engine used for all sampling. One engine per (path, stream), constructed
/// from a derived seed; never shared across threads.
using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine{seed}; }

/// FNV-1a 64-bit hash, used for scenario fingerprints.
constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace itw
