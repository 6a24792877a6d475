// General sieving systems: an assignment p -> I_p of forbidden residue sets,
// the sieved-set window computation, and empirical verifiers for the
// non-degeneracy / B-boundedness / one-dimensionality / rho-supportedness
// properties. One-dimensionality and rho are reported, never asserted.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pav {

// Membership bitmask over an inclusive integer interval [lo, hi].
struct WindowMask {
  int64_t lo = 0;
  int64_t hi = -1;
  std::vector<uint64_t> bits;

  WindowMask() = default;
  WindowMask(int64_t lo_, int64_t hi_, bool fill = true);

  int64_t length() const { return hi - lo + 1; }
  bool in_range(int64_t n) const { return n >= lo && n <= hi; }
  bool test(int64_t n) const {
    const uint64_t i = static_cast<uint64_t>(n - lo);
    return (bits[i >> 6] >> (i & 63)) & 1ULL;
  }
  void clear(int64_t n) {
    const uint64_t i = static_cast<uint64_t>(n - lo);
    bits[i >> 6] &= ~(1ULL << (i & 63));
  }
  void set(int64_t n) {
    const uint64_t i = static_cast<uint64_t>(n - lo);
    bits[i >> 6] |= 1ULL << (i & 63);
  }
  uint64_t count() const;
  std::vector<int64_t> members() const;

  // Strike every n in [lo, hi] with n = r (mod p).
  void strike_class(uint64_t p, uint64_t r);

  WindowMask and_with(const WindowMask& o) const;  // same [lo,hi] required
  WindowMask or_with(const WindowMask& o) const;

  // format: "rle" (runs of set positions) or "bitmap" (0/1 string).
  nlohmann::json to_json(const std::string& format = "rle") const;
};

struct SieveSystemSpec {
  std::string label;
  // Returns the forbidden residues mod p, each reduced into [0, p).
  std::function<std::vector<uint64_t>(uint64_t p)> rule;

  // Materialized, deduplicated, sorted, validated (|I_p| <= p).
  std::vector<uint64_t> forbidden(uint64_t p) const;
};

// Built-in catalog.
SieveSystemSpec eratosthenes_system();                      // I_p = {0}
SieveSystemSpec empty_system();                             // I_p = {}
SieveSystemSpec class_eratosthenes_system(uint64_t a, uint64_t m);  // {0} iff p = a (mod m)
SieveSystemSpec two_point_system();                         // {0, p-1} for p >= 3; {0} at 2
// Text file, lines "p: r1,r2,..."; unlisted primes get I_p = {}.
SieveSystemSpec system_from_file(const std::string& path);
// Catalog lookup by CLI name; throws on unknown names.
SieveSystemSpec system_by_name(const std::string& name);

// S_x restricted to [lo, hi]: bit set iff (lo+i) mod p not in I_p for all p <= x.
WindowMask sieved_window(const SieveSystemSpec& sys, uint64_t x, int64_t lo, int64_t hi);

// prod_{p<=x}(1 - |I_p|/p) * log x at each checkpoint. Throws if some
// |I_p| = p at or below the largest checkpoint (product vanishes).
std::vector<double> one_dim_estimate(const SieveSystemSpec& sys,
                                     const std::vector<uint64_t>& checkpoints);

// |{p <= x : |I_p| >= 1}| / (x / log x).
double rho_estimate(const SieveSystemSpec& sys, uint64_t x);

struct SystemReport {
  std::string label;
  uint64_t x = 0;
  bool nondegenerate = true;           // every checked p has |I_p| <= p-1
  uint64_t bound_B = 0;                // smallest valid B up to x (max |I_p|)
  std::vector<uint64_t> checkpoints;
  std::vector<double> one_dim;         // product * log x per checkpoint
  std::vector<double> rho;             // density estimate per checkpoint
  double one_dim_drift = 0.0;          // |last/prev - 1|
  bool one_dim_converged = false;      // drift below 2%; a signal, not a proof

  nlohmann::json to_json() const;
};

SystemReport validate_system(const SieveSystemSpec& sys, uint64_t x);

}  // namespace pav
