// End-to-end constructors. prop1_construct is fully guaranteed (random stage
// + clean-up); theorem1_construct runs the three-stage pipeline best-effort
// and reports per-stage counts honestly — at desk scale a quantified
// failure report is an expected, first-class outcome.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pav/bignum.hpp"
#include "pav/residue.hpp"
#include "pav/weights.hpp"

namespace pav {

struct OffsetCheck {
  int64_t offset = 0;
  bool is_prime = false;
  bool deterministic = true;
};

struct AvoidanceCertificate {
  BigNat N, n1, n2;
  int64_t radius = 0;
  uint64_t x = 0;
  double z = 0.0;
  int64_t y = 0;
  std::string method;  // "prop1" | "theorem1" | "certify"
  std::vector<OffsetCheck> scan_n1, scan_n2;  // offsets within radius, all non-prime
  bool structural_ok = false;  // n_i in [N/4, 3N/4] and N/4 - x > radius
  std::vector<std::string> regime_flags;

  nlohmann::json to_json() const;
  static AvoidanceCertificate from_json(const nlohmann::json& j);
};

// Thrown when a certificate fails re-verification; carries the witness.
struct CertificateRefused : std::runtime_error {
  BigNat witness_prime;
  CertificateRefused(const std::string& msg, BigNat witness)
      : std::runtime_error(msg), witness_prime(std::move(witness)) {}
};

// Largest prime x with primorial(x) <= N/2 (compared as 2*P(x) <= N, exact).
uint64_t choose_x(const BigNat& N);

// Proposition-1 procedure: x = choose_x(N), z = x/2, y = floor(0.08 x);
// resample b' mod P(z) until the survivor budget 0.4x/log x holds; clean up
// with one prime of (z, x] per survivor; CRT into [N/4, 3N/4]; verify.
AvoidanceCertificate prop1_construct(const BigNat& N, uint64_t seed, int max_attempts = 50);

// Independent re-verification: primality scan of every offset within radius
// around both summands plus the structural record. Throws CertificateRefused
// with the witness prime on failure.
AvoidanceCertificate certify(const BigNat& n1, const BigNat& n2, const BigNat& N,
                             int64_t radius);

// Re-runs the scans of an existing certificate (the certify CLI path).
AvoidanceCertificate recertify(const AvoidanceCertificate& cert);

struct Stage1Report {
  int attempts = 0;
  bool event_achieved = false;   // (union <= 9 sigma y) and exceptional budgets
  uint64_t survivors_prime = 0;
  uint64_t survivors_dual = 0;
  uint64_t union_count = 0;
  double budget_union = 0.0;     // 9 sigma y
  std::vector<nlohmann::json> exceptional;  // per-H summaries
};

struct Stage2Side {
  uint64_t v_size = 0;
  uint64_t samplers = 0;
  uint64_t degenerate_skipped = 0;
  uint64_t regime_skipped_q = 0;  // q outside (z, x/2]
  uint64_t uncovered = 0;
  std::vector<std::pair<uint64_t, uint64_t>> assignments;  // (q, b_q) fixed here
  nlohmann::json cover_report;
};

struct Stage3Report {
  uint64_t final_survivors_prime = 0;
  uint64_t final_survivors_dual = 0;
  double budget = 0.0;            // (1/2 - eps) x / log x
  uint64_t cleanup_pool = 0;      // primes in (x/2, x]
  bool within_budget = false;
  bool within_pool = false;
};

struct Theorem1Report {
  nlohmann::json params;
  Stage1Report stage1;
  Stage2Side stage2_prime, stage2_dual;
  Stage3Report stage3;
  bool success = false;
  std::vector<std::string> regime_flags;

  nlohmann::json to_json() const;
};

struct Theorem1Result {
  std::optional<AvoidanceCertificate> certificate;
  Theorem1Report report;
};

Theorem1Result theorem1_construct(const BigNat& N, const ScaleParams& params, uint64_t seed,
                                  int stage1_attempts = 32);

// Clean-up core shared by both constructors: assign each survivor (value,
// dual flag) a distinct prime from the pool, fixing b = -m (primal) or
// b = m + N (dual) mod q. Returns the per-prime residues; nullopt when the
// pool is too small.
std::optional<std::vector<std::pair<uint64_t, uint64_t>>> cleanup_assign(
    const std::vector<int64_t>& survivors_primal, const std::vector<int64_t>& survivors_dual,
    const std::vector<uint64_t>& pool, const BigNat& N);

}  // namespace pav
