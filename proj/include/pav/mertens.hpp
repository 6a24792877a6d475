// Mertens-type products sigma(z) = prod_{p<=z}(1-1/p) and the restricted
// sigma(u,z) over u < p <= z. Exact rationals up to a threshold, 192-bit
// float product beyond (numerators grow super-exponentially).

#pragma once

#include <cstdint>
#include <optional>

#include "pav/bignum.hpp"

namespace pav {

inline constexpr uint64_t kSigmaExactThreshold = 10000;

struct SigmaValue {
  uint64_t lo = 0;                  // product over lo < p <= hi
  uint64_t hi = 0;
  std::optional<Rational> exact;    // present iff computed exactly
  double value = 1.0;               // float rendering
  bool exact_mode = true;
};

// sigma over (lo, hi]; lo = 0 gives the full sigma(hi). Empty ranges yield 1.
SigmaValue mertens_sigma_range(uint64_t lo, uint64_t hi,
                               uint64_t exact_threshold = kSigmaExactThreshold);

inline SigmaValue mertens_sigma(uint64_t z,
                                uint64_t exact_threshold = kSigmaExactThreshold) {
  return mertens_sigma_range(0, z, exact_threshold);
}

// Exact rational product over an explicit prime list (always exact).
Rational sigma_exact_over(const std::vector<uint64_t>& primes);

}  // namespace pav
