#include "pav/residue.hpp"

#include <algorithm>
#include <stdexcept>

#include "pav/primes.hpp"

namespace pav {

void ResidueVector::validate() const {
  if (moduli.size() != residues.size())
    throw std::invalid_argument("ResidueVector: moduli/residues size mismatch");
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    if (i > 0 && moduli[i] <= moduli[i - 1])
      throw std::invalid_argument("ResidueVector: moduli not strictly increasing");
    if (residues[i] >= moduli[i])
      throw std::invalid_argument("ResidueVector: residue out of range");
    if (!is_prime_u64(moduli[i]))
      throw std::invalid_argument("ResidueVector: modulus is not prime");
  }
}

BigNat ResidueVector::modulus() const {
  BigNat prod = 1;
  for (uint64_t p : moduli) prod *= static_cast<unsigned long>(p);
  return prod;
}

void ResidueVector::push(uint64_t p, uint64_t r) {
  if (!moduli.empty() && p <= moduli.back())
    throw std::invalid_argument("ResidueVector::push: moduli must stay increasing");
  if (r >= p) throw std::invalid_argument("ResidueVector::push: residue out of range");
  moduli.push_back(p);
  residues.push_back(r);
}

bool ResidueVector::has_modulus(uint64_t p) const {
  return std::binary_search(moduli.begin(), moduli.end(), p);
}

uint64_t ResidueVector::residue_of(uint64_t p) const {
  auto it = std::lower_bound(moduli.begin(), moduli.end(), p);
  if (it == moduli.end() || *it != p)
    throw std::invalid_argument("ResidueVector::residue_of: no such modulus");
  return residues[static_cast<std::size_t>(it - moduli.begin())];
}

BigNat crt_reconstruct(const ResidueVector& b) {
  b.validate();
  // Incremental Garner: x congruent to each residue, m the running modulus.
  BigNat x = 0;
  BigNat m = 1;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const unsigned long p = static_cast<unsigned long>(b.moduli[i]);
    const unsigned long r = static_cast<unsigned long>(b.residues[i]);
    const unsigned long m_mod_p = mpz_fdiv_ui(m.get_mpz_t(), p);
    const unsigned long x_mod_p = mpz_fdiv_ui(x.get_mpz_t(), p);
    BigNat inv;
    BigNat mp(m_mod_p);
    BigNat pp(p);
    if (mpz_invert(inv.get_mpz_t(), mp.get_mpz_t(), pp.get_mpz_t()) == 0)
      throw std::logic_error("crt_reconstruct: moduli not coprime");
    const unsigned long diff = (r + p - x_mod_p) % p;
    const unsigned long t =
        static_cast<unsigned long>((static_cast<unsigned __int128>(diff) * inv.get_ui()) % p);
    x += m * t;
    m *= p;
  }
  return x;
}

BigNat crt_reconstruct_in_window(const ResidueVector& b, const BigNat& lo,
                                 const BigNat& window_len) {
  const BigNat prod = b.modulus();
  if (window_len < prod)
    throw std::invalid_argument("crt_reconstruct_in_window: window shorter than modulus product");
  const BigNat r = crt_reconstruct(b);
  // Smallest representative >= lo: lo + ((r - lo) mod prod).
  BigNat off = r - lo;
  mpz_fdiv_r(off.get_mpz_t(), off.get_mpz_t(), prod.get_mpz_t());
  return lo + off;
}

}  // namespace pav
