#include "pav/residue_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pav/mertens.hpp"
#include "pav/primes.hpp"
#include "pav/rng.hpp"

namespace pav {

ResidueVector sample_b(uint64_t z, uint64_t seed) {
  if (z < 2) throw std::invalid_argument("sample_b: z must be >= 2");
  Rng rng(seed);
  ResidueVector b;
  for (uint64_t p : primes_up_to(z).primes) b.push(p, rng.below(p));
  return b;
}

namespace {

// Residue class of n-window positions killed by prime p for the S' side:
// n = -b (mod p).
uint64_t kill_class_prime(uint64_t p, uint64_t b_p) { return (p - b_p % p) % p; }

// For the S'' side: n = b - N (mod p).
uint64_t kill_class_dual(uint64_t p, uint64_t b_p, const BigNat& N) {
  const uint64_t n_mod = mpz_fdiv_ui(N.get_mpz_t(), static_cast<unsigned long>(p));
  return (b_p + p - n_mod) % p;
}

}  // namespace

WindowMask shifted_window(const ResidueVector& b, int64_t wlo, int64_t whi,
                          uint64_t prime_lo, uint64_t prime_hi) {
  WindowMask m(wlo, whi, true);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const uint64_t p = b.moduli[i];
    if (p <= prime_lo || p > prime_hi) continue;
    m.strike_class(p, kill_class_prime(p, b.residues[i]));
  }
  return m;
}

WindowMask shifted_window_dual(const ResidueVector& b, const BigNat& N, int64_t wlo,
                               int64_t whi, uint64_t prime_lo, uint64_t prime_hi) {
  WindowMask m(wlo, whi, true);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const uint64_t p = b.moduli[i];
    if (p <= prime_lo || p > prime_hi) continue;
    m.strike_class(p, kill_class_dual(p, b.residues[i], N));
  }
  return m;
}

ShiftedPair window_pair(const ResidueVector& b, const BigNat& N, int64_t y) {
  if (y < 1) throw std::invalid_argument("window_pair: y must be >= 1");
  b.validate();
  ShiftedPair pair;
  pair.z = b.moduli.empty() ? 0 : b.moduli.back();
  pair.N = N;
  pair.b = b;
  pair.y = y;
  pair.mask_prime = shifted_window(b, -y, y, 0, UINT64_MAX);
  pair.mask_dual = shifted_window_dual(b, N, -y, y, 0, UINT64_MAX);
  return pair;
}

nlohmann::json ShiftedPair::to_json() const {
  nlohmann::json j;
  j["z"] = z;
  j["N"] = to_decimal(N);
  j["y"] = y;
  j["survivors_prime"] = mask_prime.to_json("rle");
  j["survivors_dual"] = mask_dual.to_json("rle");
  j["count_prime"] = mask_prime.count();
  j["count_dual"] = mask_dual.count();
  return j;
}

SplitShift split_shift(const ResidueVector& b, uint64_t z, double H, double M) {
  SplitShift s;
  if (b.empty()) s.warnings.push_back("residue vector has no primes: sigma = 1");
  s.H = H;
  s.M = M;
  s.hm = std::pow(H, M);
  s.z = z;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const uint64_t p = b.moduli[i];
    if (static_cast<double>(p) <= s.hm)
      s.b1.push(p, b.residues[i]);
    else
      s.b2.push(p, b.residues[i]);
  }
  s.sigma1 = sigma_exact_over(s.b1.moduli);
  s.sigma2 = sigma_exact_over(s.b2.moduli);
  s.regime_ok = H > 10.0 && s.hm < static_cast<double>(z);
  if (!s.regime_ok) {
    std::ostringstream w;
    w << "regime violated: need 10 < H < z^(1/M), got H=" << H << ", H^M=" << s.hm
      << ", z=" << z;
    s.warnings.push_back(w.str());
  }
  if (s.b1.empty()) s.warnings.push_back("small-prime side empty: sigma1 = 1");
  if (s.b2.empty()) s.warnings.push_back("mid-prime side empty: sigma2 = 1");
  return s;
}

SplitShift split_shift(const ShiftedPair& pair, double H, double M) {
  SplitShift s = split_shift(pair.b, pair.z, H, M);
  s.N = pair.N;
  return s;
}

Rational exact_membership_probability(const std::vector<int64_t>& U, uint64_t prime_lo,
                                      uint64_t prime_hi,
                                      const std::optional<BigNat>& N_shift) {
  if (U.empty()) throw std::invalid_argument("exact_membership_probability: U empty");
  Rational prob(1);
  for (uint64_t p : primes_in_range(prime_lo, prime_hi)) {
    const int64_t pi = static_cast<int64_t>(p);
    uint64_t shift = 0;
    if (N_shift) shift = mpz_fdiv_ui(N_shift->get_mpz_t(), static_cast<unsigned long>(p));
    std::set<uint64_t> classes;
    for (int64_t u : U) {
      int64_t r = u % pi;
      if (r < 0) r += pi;
      classes.insert((static_cast<uint64_t>(r) + shift) % p);
    }
    if (classes.size() == p) return Rational(0);  // every class forbidden somewhere
    prob *= Rational(static_cast<unsigned long>(p - classes.size()),
                     static_cast<unsigned long>(p));
  }
  prob.canonicalize();
  return prob;
}

std::vector<uint64_t> prime_factors_in_range(const BigNat& m, uint64_t lo, uint64_t hi) {
  std::vector<uint64_t> out;
  BigNat abs_m = abs(m);
  for (uint64_t p : primes_in_range(lo, hi))
    if (mpz_divisible_ui_p(abs_m.get_mpz_t(), static_cast<unsigned long>(p))) out.push_back(p);
  return out;
}

Rational correlation_error_exact(const BigNat& m, double H, double M, uint64_t z,
                                 const Rational& A) {
  if (m == 0) throw std::domain_error("correlation_error: m = 0 (every d divides 0)");
  if (!(A > 0)) throw std::domain_error("correlation_error: A must be positive");
  const double hm = std::pow(H, M);
  const uint64_t lo = hm >= 1.0 ? static_cast<uint64_t>(std::floor(hm)) : 0;
  Rational prod(1);
  for (uint64_t p : prime_factors_in_range(m, lo, z)) {
    prod *= Rational(1) + A / Rational(static_cast<unsigned long>(p));
  }
  prod -= 1;
  prod.canonicalize();
  return prod;
}

double correlation_error(const BigNat& m, double H, double M, uint64_t z, double A) {
  // The double parameter converts exactly (dyadic), so both routes agree.
  Rational ar(A);
  ar.canonicalize();
  return correlation_error_exact(m, H, M, z, ar).get_d();
}

}  // namespace pav
