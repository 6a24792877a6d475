// Scale set, prime classes mod 4, progression intersections AP'/AP'', the
// weights lambda = sigma2^{-|AP|} (zero unless the progression survives the
// mid-range sieve), their row/column sums, Monte Carlo moment experiments,
// and the exceptional-set extraction that feeds the covering stage.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pav/bignum.hpp"
#include "pav/residue.hpp"
#include "pav/residue_model.hpp"

namespace pav {

struct ScaleParams {
  uint64_t x = 0;
  double delta = 0.0;
  double xi = 0.0;
  double M = 0.0;
  long long K = 0;
  double eps = 0.0;

  int64_t y = 0;        // ceil(x * (log x)^delta)
  double z = 0.0;       // y * loglog x / sqrt(log x)
  uint64_t z_floor = 0; // sieving primes are p <= z_floor

  std::vector<double> scales;  // the H values in play
  bool toy_mode = false;
  std::vector<std::string> regime_warnings;

  nlohmann::json to_json() const;
};

// Genuine mode: scales = powers of xi inside [2y/x, y/(xi z)]; empty is an
// error. Toy mode: the caller supplies explicit H values and every regime
// check (scale window, 2(log x)^delta bound, 10 < H < z^(1/M)) becomes a
// warning carried in regime_warnings.
ScaleParams make_scales(uint64_t x, double delta, double xi, double M, long long K,
                        double eps, bool toy_mode = false,
                        const std::vector<double>& explicit_H = {});

struct PrimeClasses {
  double H = 0.0;
  uint64_t lo = 0, hi = 0;        // primes taken from (lo, hi]
  std::vector<uint64_t> q1;       // = 1 (mod 4)
  std::vector<uint64_t> q3;       // = 3 (mod 4)
};

// Primes of (y/(xi H), y/H] split by residue mod 4.
PrimeClasses prime_classes(const ScaleParams& params, double H);

// Everything a weight evaluation needs for one (b, H): the split at H^M,
// the sigma2 power table, and the four sieve masks over the evaluation
// window. Masks are immutable once built.
struct WeightContext {
  const ScaleParams* params = nullptr;
  double H = 0.0;
  int64_t kh = 0;           // floor(K*H), the progression length
  SplitShift split;
  double sigma2 = 1.0;
  std::vector<double> weight_pow;  // sigma2^{-k}, k = 0..kh
  int64_t wlo = 0, whi = 0;
  WindowMask s1p, s2p;      // S'_1, S'_2 over [wlo, whi]
  WindowMask s1d, s2d;      // S''_1, S''_2 over [wlo, whi]

  double weight_of_size(int64_t k) const { return weight_pow[static_cast<std::size_t>(k)]; }
  int64_t base_lo() const;  // n-range (-(K+1)y, y]: first base point
  int64_t base_hi() const;
  // Membership of n in S' (dual=false) or S'' (dual=true), both sieve halves.
  bool in_shifted_set(int64_t n, bool dual) const {
    return dual ? (s1d.test(n) && s2d.test(n)) : (s1p.test(n) && s2p.test(n));
  }
};

WeightContext make_weight_context(const ScaleParams& params, double H,
                                  const ResidueVector& b, const BigNat& N);

// AP'(KH; q, n) (dual=false) / AP''(KH; q, n) (dual=true): the progression
// points n+qh, 1 <= h <= floor(KH), lying in S'_1 resp. S''_1, evaluated
// point by point from the split's residues. The mask-based fast path inside
// WeightContext must agree with this exactly (tested).
std::vector<int64_t> ap_intersect(uint64_t q, int64_t n, long long K, double H,
                                  const SplitShift& split, bool dual);

// lambda(H; q, n) per the weight definition; q = 1 (mod 4) pairs with
// dual=false and q = 3 (mod 4) with dual=true, anything else is an error.
double lambda_weight(uint64_t q, int64_t n, const WeightContext& ctx, bool dual);

// Row sum over the base range (-(K+1)y, y].
double row_sum(uint64_t q, const WeightContext& ctx, bool dual);

// Column sum: over q in the class and 1 <= h <= floor(KH) of
// lambda(H; q, n - qh).
double col_sum(int64_t n, const WeightContext& ctx, const PrimeClasses& classes, bool dual);
// Same restricted to an explicit q subset (the F-set replay needs it).
double col_sum_over(int64_t n, const WeightContext& ctx,
                    const std::vector<uint64_t>& qs, bool dual);

enum class MomentKind { Row, Col };

struct MomentReport {
  double H = 0.0;
  int q_class = 1;           // 1 or 3 (dual side)
  int j = 0;
  MomentKind kind = MomentKind::Row;
  uint64_t samples = 0;
  double mean = 0.0;
  double se = 0.0;
  double main_term = 0.0;
  double ratio = 0.0;
  bool exact = false;        // j = 0 paths are closed-form, sampling-free
  std::vector<std::string> regime_flags;

  nlohmann::json to_json() const;
  std::string csv_row() const;
  static std::string csv_header();
};

// Seeded moment experiment. j=0 is exact: |Q_{H,i}| for rows, sigma(2y+1)
// for columns. Sampling uses derive_seed(seed, i) per trial; `threads`
// changes wall time only, never the numbers.
MomentReport moment_experiment(const ScaleParams& params, double H, int j,
                               MomentKind kind, bool dual, uint64_t samples,
                               uint64_t seed, const BigNat& N, int threads = 1);

struct ExceptionalThresholds {
  std::optional<double> row_dev;  // default y / H^(1+eps)
  std::optional<double> col_dev;  // default |Q| * floor(KH) / (sigma2 * H^(1+eps))
};

struct ExceptionalSets {
  double H = 0.0;
  // Primal side (q = 1 mod 4, S'):
  std::vector<uint64_t> q_good_primal, q_bad_primal;
  std::vector<int64_t> e_primal, f_primal;
  // Dual side (q = 3 mod 4, S''):
  std::vector<uint64_t> q_good_dual, q_bad_dual;
  std::vector<int64_t> e_dual, f_dual;

  double budget = 0.0;  // sigma * y / H^(1+eps)
  double row_threshold = 0.0;
  double col_threshold_primal = 0.0, col_threshold_dual = 0.0;
  bool within_budget = false;

  nlohmann::json to_json() const;
};

// Classify a fixed realization: good/bad primes by row-sum deviation, and
// the window elements whose column sums deviate (E) or draw too much weight
// from bad primes (F), on both sides.
ExceptionalSets exceptional_sets(const WeightContext& ctx, const PrimeClasses& classes,
                                 const ExceptionalThresholds& thresholds = {});

// The closed-form C2' approximation from the deduction (reported, never
// asserted): K(1-1/xi) log(1/(2 delta)) / (2 M (K+2) log xi).
double c2_closed_form(const ScaleParams& params);

}  // namespace pav
