#pragma once
// Deterministic seed derivation. Every randomized routine in the library
// takes an explicit 64-bit seed; independent sub-streams are carved out of a
// parent seed by hashing it with a short purpose tag and any integer
// coordinates, so no two parts of a run ever share a generator state.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace maxq {

// splitmix64 finalizer: cheap, stable, good avalanche.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                                 std::initializer_list<std::int64_t> coords = {}) {
  std::uint64_t h = mix64(seed ^ 0x9e3779b97f4a7c15ULL);
  for (unsigned char c : tag) h = mix64(h ^ c);
  for (std::int64_t v : coords) h = mix64(h ^ static_cast<std::uint64_t>(v));
  return h;
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::string_view tag,
                    std::initializer_list<std::int64_t> coords = {}) {
  return Rng(derive_seed(seed, tag, coords));
}

}  // namespace maxq
