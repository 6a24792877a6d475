// Arbitrary-precision integer/rational aliases (GMP) and a small RAII wrapper
// around mpfr_t for the extended-precision float paths (192-bit mantissa,
// comfortably above the 128 bits the sigma products need).

#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pav {

using BigNat = mpz_class;     // non-negative in all our uses; ops stay exact
using Rational = mpq_class;  // always canonicalized after arithmetic

inline std::string to_decimal(const BigNat& n) { return n.get_str(10); }

inline BigNat nat_from_decimal(const std::string& s) {
  BigNat n;
  if (n.set_str(s, 10) != 0) throw std::invalid_argument("not a decimal integer: " + s);
  if (n < 0) throw std::invalid_argument("negative value where a natural was expected: " + s);
  return n;
}

// Fixed-precision binary float. Value semantics, precision shared by all
// instances so mixed arithmetic never silently truncates.
class BigFloat {
 public:
  static constexpr mpfr_prec_t kPrecision = 192;

  BigFloat() { mpfr_init2(v_, kPrecision); mpfr_set_zero(v_, 1); }
  explicit BigFloat(double x) { mpfr_init2(v_, kPrecision); mpfr_set_d(v_, x, MPFR_RNDN); }
  explicit BigFloat(unsigned long x) { mpfr_init2(v_, kPrecision); mpfr_set_ui(v_, x, MPFR_RNDN); }
  explicit BigFloat(const Rational& q) {
    mpfr_init2(v_, kPrecision);
    mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
  }
  BigFloat(const BigFloat& o) { mpfr_init2(v_, kPrecision); mpfr_set(v_, o.v_, MPFR_RNDN); }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, kPrecision);
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(BigFloat o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  BigFloat& operator+=(const BigFloat& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator-=(const BigFloat& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator*=(const BigFloat& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator/=(const BigFloat& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

  friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
  friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
  friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }

  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) == 0; }

  static BigFloat log(const BigFloat& x) {
    BigFloat r;
    mpfr_log(r.v_, x.v_, MPFR_RNDN);
    return r;
  }
  static BigFloat exp(const BigFloat& x) {
    BigFloat r;
    mpfr_exp(r.v_, x.v_, MPFR_RNDN);
    return r;
  }
  // 10^x, exact-rounding path (mpfr_ui_pow keeps us off exp(x*log 10)).
  static BigFloat pow10(const BigFloat& x) {
    BigFloat r;
    mpfr_ui_pow(r.v_, 10, x.v_, MPFR_RNDN);
    return r;
  }

  // (1 - 1/p) folded in place; the sigma-product hot path.
  void mul_one_minus_inv(unsigned long p) {
    mpfr_t t;
    mpfr_init2(t, kPrecision);
    mpfr_set_ui(t, p - 1, MPFR_RNDN);
    mpfr_div_ui(t, t, p, MPFR_RNDN);
    mpfr_mul(v_, v_, t, MPFR_RNDN);
    mpfr_clear(t);
  }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  double to_double_down() const { return mpfr_get_d(v_, MPFR_RNDD); }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }

 private:
  mpfr_t v_;
};

}  // namespace pav
