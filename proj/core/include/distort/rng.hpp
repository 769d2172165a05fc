#pragma once

#include <cstdint>
#include <random>

namespace distort {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic stream splitting: identical (seed, a, b) gives an identical
// engine seed regardless of how many draws other streams consumed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a = 0,
                                 std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(seed ^ 0x6a09e667f3bcc908ULL);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return s;
}

// Uniform draw in the open interval (0,1) with 53-bit resolution; never
// returns an exact endpoint.
inline double uniform01(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

// Samples are produced in fixed-size chunks, each chunk from its own derived
// engine, so parallel or partial generation reproduces the same stream.
constexpr std::size_t kSampleChunk = 1u << 16;

}  // namespace distort
