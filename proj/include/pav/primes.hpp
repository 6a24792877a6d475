// Prime tables, primality, prime gaps, avoidance distance, primorials.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pav/bignum.hpp"

namespace pav {

struct PrimeTable {
  uint64_t limit = 0;                // all primes <= limit, ascending
  std::vector<uint64_t> primes;

  std::size_t count() const { return primes.size(); }
  bool contains(uint64_t n) const;   // binary search
};

// Every prime <= limit (simple odd-wheel Eratosthenes; limit < 2 gives an
// empty table, no error).
PrimeTable primes_up_to(uint64_t limit);

// Primes in the half-open interval (lo, hi], by segmented sieve.
std::vector<uint64_t> primes_in_range(uint64_t lo, uint64_t hi);

// Deterministic Miller-Rabin over the 12-witness set proven exact for the
// full 64-bit range.
bool is_prime_u64(uint64_t n);

struct PrimalityResult {
  bool is_prime = false;
  bool deterministic = true;  // false above 2^64: Miller-Rabin, error < 2^-128
  int rounds = 0;             // probabilistic rounds used (0 on the exact path)
  explicit operator bool() const { return is_prime; }
};

PrimalityResult is_prime(const BigNat& n);

// Distance from n to the nearest prime (0 iff n itself is prime). Outward
// alternating scan; n >= 1.
uint64_t avoidance_distance(const BigNat& n);

// Largest gap p_{k+1} - p_k over consecutive primes with p_{k+1} <= X.
// Throws for X < 3 (no complete gap below X).
uint64_t max_gap(uint64_t X);

// Product of all primes <= x, exact. x >= 2.
BigNat primorial(uint64_t x);

// Flat binary serialization: magic "PVT1", u64 limit, u64 count,
// then count u16 deltas (first delta is the first prime itself).
void save_prime_table(const PrimeTable& t, const std::string& path);
PrimeTable load_prime_table(const std::string& path);

}  // namespace pav
