#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace vsl {

// splitmix64 step (Steele et al.); used only to derive stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream-splitting rule: the seed of stream (seed; p0, p1, ...) is obtained by
// chaining splitmix64 over the path components. Generators derive one stream
// per vector index, so generation order (and any parallel chunking) cannot
// change the output.
inline std::uint64_t derive_stream(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = seed;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t part : path) {
    state = out ^ (part + 0x9e3779b97f4a7c15ULL);
    out = splitmix64(state);
  }
  return out;
}

inline std::mt19937_64 stream_rng(std::uint64_t seed,
                                  std::initializer_list<std::uint64_t> path) {
  return std::mt19937_64(derive_stream(seed, path));
}

}  // namespace vsl
