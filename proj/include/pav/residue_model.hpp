// Probabilistic model around the two shifted sieved sets S' = S_z - b and
// S'' = S_z - N + b: uniform per-prime sampling of b, window materialization,
// the small/mid prime split at H^M, exact CRT membership probabilities, and
// the correlation-error function E_A.
//
// b stays in CRT form throughout; membership tests are per-prime. The one
// place a big integer appears is certificate reconstruction (pipeline).

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include <json.hpp>

#include "pav/bignum.hpp"
#include "pav/residue.hpp"
#include "pav/sieve_system.hpp"

namespace pav {

// Independent uniform residue mod each prime p <= z, deterministic in seed.
ResidueVector sample_b(uint64_t z, uint64_t seed);

struct ShiftedPair {
  uint64_t z = 0;
  BigNat N;
  ResidueVector b;        // over primes <= z
  int64_t y = 0;
  WindowMask mask_prime;  // S'  over [-y, y]: n with n + b != 0 mod p for all p <= z
  WindowMask mask_dual;   // S'' over [-y, y]: n with n + N - b != 0 mod p for all p <= z

  nlohmann::json to_json() const;
};

ShiftedPair window_pair(const ResidueVector& b, const BigNat& N, int64_t y);

// Masks for arbitrary windows and prime sub-ranges (the weight engine needs
// windows wider than [-y, y] and the split ranges).
// Keeps n iff (n + b) != 0 mod p for every prime p of b with lo < p <= hi.
WindowMask shifted_window(const ResidueVector& b, int64_t wlo, int64_t whi,
                          uint64_t prime_lo, uint64_t prime_hi);
// Dual variant: keeps n iff (n + N - b) != 0 mod p.
WindowMask shifted_window_dual(const ResidueVector& b, const BigNat& N, int64_t wlo,
                               int64_t whi, uint64_t prime_lo, uint64_t prime_hi);

struct SplitShift {
  double H = 0.0;
  double M = 0.0;
  double hm = 0.0;        // the split point H^M
  uint64_t z = 0;
  BigNat N;               // dual-side shift (0 when unused)
  ResidueVector b1;       // primes <= H^M
  ResidueVector b2;       // primes in (H^M, z]
  Rational sigma1;        // prod over b1 primes of (1 - 1/p), exact
  Rational sigma2;        // prod over b2 primes of (1 - 1/p), exact
  bool regime_ok = true;  // 10 < H < z^(1/M)
  std::vector<std::string> warnings;
};

// Partition pair.b at H^M. Outside the 10 < H < z^(1/M) regime the split is
// still produced, with a "regime violated" warning (toy mode).
SplitShift split_shift(const ShiftedPair& pair, double H, double M);
SplitShift split_shift(const ResidueVector& b, uint64_t z, double H, double M);

// Exact probability over uniform b2 (per-prime) that U + shift avoids 0 mod
// every prime in (prime_lo, prime_hi]: prod (1 - |U mod p| / p). The optional
// shift exercises the S''-side change of variables; the value is identical.
Rational exact_membership_probability(const std::vector<int64_t>& U, uint64_t prime_lo,
                                      uint64_t prime_hi,
                                      const std::optional<BigNat>& N_shift = std::nullopt);

// E_A(m; H) = sum over squarefree d != 1 with prime factors in (H^M, z] that
// divide m of A^omega(d)/d, computed in closed form as
// prod_{p | m, H^M < p <= z} (1 + A/p) - 1. Symmetric in the sign of m;
// m = 0 is an error. The exact-rational form backs the float one.
Rational correlation_error_exact(const BigNat& m, double H, double M, uint64_t z,
                                 const Rational& A);
double correlation_error(const BigNat& m, double H, double M, uint64_t z, double A);

// In-range primes dividing m (trial division by the range's prime table only).
std::vector<uint64_t> prime_factors_in_range(const BigNat& m, uint64_t lo, uint64_t hi);

}  // namespace pav
