#pragma once

// Seeded random ring elements for the property suites.

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <vector>

#include "fakelens/ring.hpp"

namespace fakelens {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'f00d'2024ULL;

inline mpz_class random_int(std::mt19937_64& rng, long bound) {
  std::uniform_int_distribution<long> dist(-bound, bound);
  return mpz_class(dist(rng));
}

inline RingElement random_integral(int level, std::mt19937_64& rng, long bound = 9) {
  std::vector<mpz_class> c((std::size_t{1} << level) - 1);
  for (auto& x : c) x = random_int(rng, bound);
  return RingElement::from_integers(level, c);
}

/// Random element with a random denominator 2^s * u (u in {1, 3, 5}).
inline RingElement random_element(int level, std::mt19937_64& rng, long bound = 9) {
  std::uniform_int_distribution<int> shift(0, 4);
  std::uniform_int_distribution<int> odd(0, 2);
  mpz_class den = mpz_class(1) << shift(rng);
  den *= 2 * odd(rng) + 1;
  std::vector<mpz_class> c((std::size_t{1} << level) - 1);
  for (auto& x : c) x = random_int(rng, bound);
  return RingElement::from_fraction(level, c, den);
}

}  // namespace fakelens
