#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace crosskerr {

/// Standard-normal draw built on raw engine bits; identical sequences across
/// standard libraries, which keeps seeded outputs byte-reproducible.
inline double normal_draw(std::mt19937_64& rng) {
  const double u1 = (double(rng() >> 11) + 0.5) / 9007199254740992.0;
  const double u2 = (double(rng() >> 11) + 0.5) / 9007199254740992.0;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline double uniform_draw(std::mt19937_64& rng) {
  return (double(rng() >> 11) + 0.5) / 9007199254740992.0;
}

/// Index draw in [0, n) without modulo bias (n is tiny here).
inline std::uint64_t index_draw(std::mt19937_64& rng, std::uint64_t n) {
  return std::uint64_t(uniform_draw(rng) * double(n)) % n;
}

}  // namespace crosskerr
