#pragma once

#include <cstdint>
#include <random>

namespace pcascade {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for replicate `index` under `master_seed`. The state is a
/// pure function of the pair, so results do not depend on which worker runs
/// which replicate or in what order.
inline Rng derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

/// Seed for a named sub-run (one per suite or per tree) under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag) {
  return splitmix64(master_seed * 0x9e3779b97f4a7c15ULL + splitmix64(tag));
}

}  // namespace pcascade
