// Residue-vector (CRT form) representation of classes modulo a primorial.
// Shifts b never materialize as one big integer in the probability model;
// reconstruction happens only at certificate time.

#pragma once

#include <cstdint>
#include <vector>

#include "pav/bignum.hpp"

namespace pav {

struct ResidueVector {
  std::vector<uint64_t> moduli;    // strictly increasing distinct primes
  std::vector<uint64_t> residues;  // residues[i] in [0, moduli[i])

  std::size_t size() const { return moduli.size(); }
  bool empty() const { return moduli.empty(); }

  // Throws if invariants are violated.
  void validate() const;

  BigNat modulus() const;  // product of moduli

  void push(uint64_t p, uint64_t r);

  // Residue for a given prime; throws if p is not a modulus.
  uint64_t residue_of(uint64_t p) const;
  bool has_modulus(uint64_t p) const;
};

// Unique representative in [0, prod(moduli)).
BigNat crt_reconstruct(const ResidueVector& b);

// Unique representative in [lo, lo + window_len) with window_len >= prod;
// uniqueness needs window_len == prod, longer windows return the smallest.
// Throws if the window is shorter than the modulus product.
BigNat crt_reconstruct_in_window(const ResidueVector& b, const BigNat& lo,
                                 const BigNat& window_len);

}  // namespace pav
