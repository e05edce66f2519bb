#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace damf {

// mt19937_64 outputs are specified by the standard; the distributions below
// are hand-rolled so streams are reproducible across standard libraries.
using Rng = std::mt19937_64;

inline double rand_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
inline std::uint64_t rand_index(Rng& rng, std::uint64_t n) {
  std::uint64_t bound = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= bound);
  return x % n;
}

inline double rand_gaussian(Rng& rng) {
  // Box-Muller; rejects u1 == 0 to keep log finite.
  double u1;
  do {
    u1 = rand_unit(rng);
  } while (u1 <= 0.0);
  double u2 = rand_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace damf
