#include "pav/primes.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pav {

bool PrimeTable::contains(uint64_t n) const {
  return std::binary_search(primes.begin(), primes.end(), n);
}

PrimeTable primes_up_to(uint64_t limit) {
  PrimeTable t;
  t.limit = limit;
  if (limit < 2) return t;

  // Odd-only bitmap: bit i <-> 2i+3.
  const uint64_t nbits = limit >= 3 ? (limit - 3) / 2 + 1 : 0;
  std::vector<uint64_t> words((nbits + 63) / 64, ~0ULL);
  auto clear_bit = [&](uint64_t i) { words[i >> 6] &= ~(1ULL << (i & 63)); };
  auto test_bit = [&](uint64_t i) { return (words[i >> 6] >> (i & 63)) & 1ULL; };

  for (uint64_t n = 3; n * n <= limit; n += 2) {
    if (!test_bit((n - 3) / 2)) continue;
    for (uint64_t m = n * n; m <= limit; m += 2 * n) clear_bit((m - 3) / 2);
  }

  t.primes.reserve(limit > 10
                       ? static_cast<std::size_t>(1.2 * static_cast<double>(limit) /
                                                  std::log(static_cast<double>(limit)))
                       : 8);
  t.primes.push_back(2);
  for (uint64_t i = 0; i < nbits; ++i)
    if (test_bit(i)) t.primes.push_back(2 * i + 3);
  return t;
}

std::vector<uint64_t> primes_in_range(uint64_t lo, uint64_t hi) {
  std::vector<uint64_t> out;
  if (hi < 2 || hi <= lo) return out;
  const uint64_t root = static_cast<uint64_t>(std::sqrt(static_cast<double>(hi))) + 1;
  const PrimeTable base = primes_up_to(root);

  const uint64_t seg = 1u << 20;
  uint64_t start = std::max<uint64_t>(lo + 1, 2);
  std::vector<uint8_t> mark;
  while (start <= hi) {
    const uint64_t end = std::min(hi, start + seg - 1);
    mark.assign(end - start + 1, 1);
    for (uint64_t p : base.primes) {
      if (p * p > end) break;
      uint64_t first = std::max(p * p, ((start + p - 1) / p) * p);
      for (uint64_t m = first; m <= end; m += p) mark[m - start] = 0;
    }
    for (uint64_t n = start; n <= end; ++n)
      if (mark[n - start] && n >= 2) out.push_back(n);
    start = end + 1;
  }
  return out;
}

namespace {

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

bool mr_witness(uint64_t n, uint64_t a, uint64_t d, int r) {
  uint64_t x = powmod_u64(a % n, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < r; ++i) {
    x = mulmod_u64(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // Exact for all n < 3.3e24 (covers uint64_t).
  for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL})
    if (!mr_witness(n, a, d, r)) return false;
  return true;
}

PrimalityResult is_prime(const BigNat& n) {
  PrimalityResult res;
  if (n.fits_ulong_p() || mpz_sizeinbase(n.get_mpz_t(), 2) <= 64) {
    res.deterministic = true;
    res.rounds = 0;
    res.is_prime = is_prime_u64(mpz_get_ui(n.get_mpz_t()));
    return res;
  }
  // 64 rounds give error < 4^-64 = 2^-128 for a composite surviving the test.
  constexpr int kRounds = 64;
  res.deterministic = false;
  res.rounds = kRounds;
  res.is_prime = mpz_probab_prime_p(n.get_mpz_t(), kRounds) > 0;
  return res;
}

uint64_t avoidance_distance(const BigNat& n) {
  if (n < 1) throw std::domain_error("avoidance_distance: n must be >= 1");
  if (n == 1) return 1;  // nearest prime is 2
  for (uint64_t d = 0;; ++d) {
    if (is_prime(BigNat(n + d)).is_prime) return d;
    if (n - d >= 2 && is_prime(BigNat(n - d)).is_prime) return d;
  }
}

uint64_t max_gap(uint64_t X) {
  if (X < 3) throw std::domain_error("max_gap: no complete gap below X (need X >= 3)");
  const PrimeTable t = primes_up_to(X);
  uint64_t best = 0;
  for (std::size_t i = 1; i < t.primes.size(); ++i)
    best = std::max(best, t.primes[i] - t.primes[i - 1]);
  return best;
}

BigNat primorial(uint64_t x) {
  if (x < 2) throw std::domain_error("primorial: x must be >= 2");
  BigNat prod = 1;
  for (uint64_t p : primes_up_to(x).primes) prod *= static_cast<unsigned long>(p);
  return prod;
}

void save_prime_table(const PrimeTable& t, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_prime_table: cannot open " + path);
  f.write("PVT1", 4);
  auto put_u64 = [&](uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    f.write(reinterpret_cast<char*>(b), 8);
  };
  put_u64(t.limit);
  put_u64(t.primes.size());
  uint64_t prev = 0;
  for (uint64_t p : t.primes) {
    const uint64_t gap = p - prev;
    if (gap > 0xFFFF) throw std::runtime_error("save_prime_table: gap exceeds u16");
    unsigned char b[2] = {static_cast<unsigned char>(gap), static_cast<unsigned char>(gap >> 8)};
    f.write(reinterpret_cast<char*>(b), 2);
    prev = p;
  }
  if (!f) throw std::runtime_error("save_prime_table: write failed");
}

PrimeTable load_prime_table(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_prime_table: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::string(magic, 4) != "PVT1")
    throw std::runtime_error("load_prime_table: bad magic");
  auto get_u64 = [&]() {
    unsigned char b[8];
    f.read(reinterpret_cast<char*>(b), 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
  };
  PrimeTable t;
  t.limit = get_u64();
  const uint64_t count = get_u64();
  t.primes.reserve(count);
  uint64_t prev = 0;
  for (uint64_t i = 0; i < count; ++i) {
    unsigned char b[2];
    f.read(reinterpret_cast<char*>(b), 2);
    const uint64_t gap = static_cast<uint64_t>(b[0]) | (static_cast<uint64_t>(b[1]) << 8);
    prev += gap;
    t.primes.push_back(prev);
  }
  if (!f) throw std::runtime_error("load_prime_table: truncated file");
  return t;
}

}  // namespace pav
