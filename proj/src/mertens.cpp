#include "pav/mertens.hpp"

#include <cstdio>
#include <mutex>
#include <vector>

#include "pav/primes.hpp"

namespace pav {

Rational sigma_exact_over(const std::vector<uint64_t>& primes) {
  Rational prod(1);
  for (uint64_t p : primes) {
    prod *= Rational(static_cast<unsigned long>(p - 1), static_cast<unsigned long>(p));
  }
  prod.canonicalize();
  return prod;
}

SigmaValue mertens_sigma_range(uint64_t lo, uint64_t hi, uint64_t exact_threshold) {
  SigmaValue s;
  s.lo = lo;
  s.hi = hi;
  if (hi <= lo || hi < 2) {
    s.exact = Rational(1);
    s.value = 1.0;
    s.exact_mode = true;
    return s;
  }
  const std::vector<uint64_t> ps = primes_in_range(lo, hi);
  if (hi <= exact_threshold) {
    s.exact = sigma_exact_over(ps);
    s.value = s.exact->get_d();
    s.exact_mode = true;
    return s;
  }
  // Beyond the exact threshold: 192-bit product, double rendering. The
  // switch is a diagnostic, logged once per process on stderr.
  static std::once_flag logged;
  std::call_once(logged, [&] {
    std::fprintf(stderr,
                 "note: sigma product switched from exact rationals to 192-bit floats "
                 "(z=%llu beyond the exact threshold %llu)\n",
                 static_cast<unsigned long long>(hi),
                 static_cast<unsigned long long>(exact_threshold));
  });
  BigFloat prod(1.0);
  for (uint64_t p : ps) prod.mul_one_minus_inv(static_cast<unsigned long>(p));
  s.exact = std::nullopt;
  s.value = prod.to_double();
  s.exact_mode = false;
  return s;
}

}  // namespace pav
