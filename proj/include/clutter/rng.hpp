#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "clutter/types.hpp"

namespace clutter {

// Deterministic stream derivation: FNV-1a over (root, replicate, purpose)
// bytes, finished with a splitmix64 avalanche. Documented so the streams can
// be reproduced outside this library: root and replicate enter as 8
// little-endian bytes each, then the purpose label bytes.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t seed_stream(std::uint64_t root, std::uint64_t replicate,
                                 std::string_view purpose) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto eat = [&h](std::uint64_t v, int nbytes) {
    for (int i = 0; i < nbytes; ++i) {
      h ^= (v >> (8 * i)) & 0xffULL;
      h *= 0x100000001b3ULL;
    }
  };
  eat(root, 8);
  eat(replicate, 8);
  for (unsigned char c : purpose) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

using Rng = std::mt19937_64;

// Circular-symmetric complex Gaussian with precision lambda:
// real and imaginary parts are independent N(0, 1/(2 lambda)) about the mean.
inline Complex draw_complex_gaussian(Rng& rng, Complex mean, double lambda) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0 * lambda);
  const double re = n01(rng);
  const double im = n01(rng);
  return mean + Complex(re * s, im * s);
}

}  // namespace clutter
