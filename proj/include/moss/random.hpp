#pragma once

#include <cstdint>
#include <random>

namespace moss {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream seed for worker `stream` of a run seeded with `master`.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream = 0) {
  return Rng(stream_seed(master, stream));
}

/// Uniform integer in [0, n). Rejects the low band of size 2^64 mod n so every
/// residue is equally likely. `n` must be positive.
template <class Engine>
std::uint64_t uniform_below(Engine& rng, std::uint64_t n) {
  static_assert(Engine::min() == 0 && Engine::max() == ~std::uint64_t{0},
                "engine must produce full 64-bit words");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

/// Uniform integer in [1, n].
template <class Engine>
std::uint64_t uniform_from_one(Engine& rng, std::uint64_t n) {
  return uniform_below(rng, n) + 1;
}

/// locate(x) for x uniform in [1, total]. `locate` must be non-decreasing in
/// x; every weighted draw goes through here so outcome enumeration can branch
/// once per located item instead of once per value.
template <class Engine, class Locate>
std::size_t draw_located(Engine& rng, std::uint64_t total, Locate&& locate) {
  return locate(uniform_from_one(rng, total));
}

}  // namespace moss
