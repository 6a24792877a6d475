#include "pav/sieve_system.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "pav/bignum.hpp"
#include "pav/primes.hpp"

namespace pav {

WindowMask::WindowMask(int64_t lo_, int64_t hi_, bool fill) : lo(lo_), hi(hi_) {
  if (hi < lo) throw std::invalid_argument("WindowMask: hi < lo");
  const uint64_t n = static_cast<uint64_t>(hi - lo + 1);
  bits.assign((n + 63) / 64, fill ? ~0ULL : 0ULL);
  if (fill && (n & 63)) bits.back() = (1ULL << (n & 63)) - 1;  // mask tail bits
}

uint64_t WindowMask::count() const {
  uint64_t c = 0;
  for (uint64_t w : bits) c += static_cast<uint64_t>(std::popcount(w));
  return c;
}

std::vector<int64_t> WindowMask::members() const {
  std::vector<int64_t> out;
  out.reserve(count());
  for (int64_t n = lo; n <= hi; ++n)
    if (test(n)) out.push_back(n);
  return out;
}

void WindowMask::strike_class(uint64_t p, uint64_t r) {
  // First n >= lo with n = r (mod p).
  const int64_t pi = static_cast<int64_t>(p);
  int64_t rem = lo % pi;
  if (rem < 0) rem += pi;
  int64_t first = lo + (static_cast<int64_t>(r) - rem + pi) % pi;
  for (int64_t n = first; n <= hi; n += pi) clear(n);
}

WindowMask WindowMask::and_with(const WindowMask& o) const {
  if (lo != o.lo || hi != o.hi) throw std::invalid_argument("WindowMask: range mismatch");
  WindowMask r = *this;
  for (std::size_t i = 0; i < bits.size(); ++i) r.bits[i] &= o.bits[i];
  return r;
}

WindowMask WindowMask::or_with(const WindowMask& o) const {
  if (lo != o.lo || hi != o.hi) throw std::invalid_argument("WindowMask: range mismatch");
  WindowMask r = *this;
  for (std::size_t i = 0; i < bits.size(); ++i) r.bits[i] |= o.bits[i];
  return r;
}

nlohmann::json WindowMask::to_json(const std::string& format) const {
  nlohmann::json j;
  j["lo"] = lo;
  j["hi"] = hi;
  j["count"] = count();
  j["format"] = format;
  if (format == "rle") {
    // Runs of consecutive set positions: [start, length].
    nlohmann::json runs = nlohmann::json::array();
    int64_t n = lo;
    while (n <= hi) {
      if (!test(n)) {
        ++n;
        continue;
      }
      int64_t start = n;
      while (n <= hi && test(n)) ++n;
      runs.push_back({start, n - start});
    }
    j["runs"] = runs;
  } else if (format == "bitmap") {
    std::string s;
    s.reserve(static_cast<std::size_t>(length()));
    for (int64_t n = lo; n <= hi; ++n) s.push_back(test(n) ? '1' : '0');
    j["bits"] = s;
  } else {
    throw std::invalid_argument("WindowMask::to_json: unknown format " + format);
  }
  return j;
}

std::vector<uint64_t> SieveSystemSpec::forbidden(uint64_t p) const {
  std::vector<uint64_t> v = rule(p);
  for (auto& r : v) r %= p;
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

SieveSystemSpec eratosthenes_system() {
  return {"eratosthenes", [](uint64_t) { return std::vector<uint64_t>{0}; }};
}

SieveSystemSpec empty_system() {
  return {"empty", [](uint64_t) { return std::vector<uint64_t>{}; }};
}

SieveSystemSpec class_eratosthenes_system(uint64_t a, uint64_t m) {
  std::ostringstream name;
  name << "eratosthenes-" << a << "mod" << m;
  return {name.str(), [a, m](uint64_t p) {
            return p % m == a % m ? std::vector<uint64_t>{0} : std::vector<uint64_t>{};
          }};
}

SieveSystemSpec two_point_system() {
  return {"two-point", [](uint64_t p) {
            if (p == 2) return std::vector<uint64_t>{0};
            return std::vector<uint64_t>{0, p - 1};
          }};
}

SieveSystemSpec system_from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("system_from_file: cannot open " + path);
  auto table = std::make_shared<std::map<uint64_t, std::vector<uint64_t>>>();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("system_from_file: missing ':' on line " + std::to_string(lineno));
    uint64_t p = std::stoull(line.substr(0, colon));
    if (!is_prime_u64(p))
      throw std::runtime_error("system_from_file: " + std::to_string(p) + " is not prime");
    std::vector<uint64_t> rs;
    std::stringstream rest(line.substr(colon + 1));
    std::string tok;
    while (std::getline(rest, tok, ',')) {
      if (tok.find_first_not_of(" \t\r") == std::string::npos) continue;
      rs.push_back(std::stoull(tok) % p);
    }
    (*table)[p] = rs;
  }
  return {"file:" + path, [table](uint64_t p) {
            auto it = table->find(p);
            return it == table->end() ? std::vector<uint64_t>{} : it->second;
          }};
}

SieveSystemSpec system_by_name(const std::string& name) {
  if (name == "eratosthenes") return eratosthenes_system();
  if (name == "empty") return empty_system();
  if (name == "eratosthenes-1mod4") return class_eratosthenes_system(1, 4);
  if (name == "eratosthenes-3mod4") return class_eratosthenes_system(3, 4);
  if (name == "two-point") return two_point_system();
  if (name.rfind("file:", 0) == 0) return system_from_file(name.substr(5));
  throw std::invalid_argument("unknown sieve system: " + name);
}

WindowMask sieved_window(const SieveSystemSpec& sys, uint64_t x, int64_t lo, int64_t hi) {
  if (hi < lo) throw std::invalid_argument("sieved_window: hi < lo");
  if (x < 2) throw std::invalid_argument("sieved_window: x must be >= 2");
  WindowMask mask(lo, hi, true);
  for (uint64_t p : primes_up_to(x).primes)
    for (uint64_t r : sys.forbidden(p)) mask.strike_class(p, r);
  return mask;
}

std::vector<double> one_dim_estimate(const SieveSystemSpec& sys,
                                     const std::vector<uint64_t>& checkpoints) {
  if (checkpoints.empty()) return {};
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 100)
      throw std::invalid_argument("one_dim_estimate: checkpoints must be >= 100");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw std::invalid_argument("one_dim_estimate: checkpoints must ascend");
  }
  std::vector<double> out;
  out.reserve(checkpoints.size());
  BigFloat prod(1.0);
  std::size_t ci = 0;
  const auto primes = primes_up_to(checkpoints.back()).primes;
  for (std::size_t pi = 0; pi <= primes.size(); ++pi) {
    while (ci < checkpoints.size() &&
           (pi == primes.size() || primes[pi] > checkpoints[ci])) {
      out.push_back(prod.to_double() * std::log(static_cast<double>(checkpoints[ci])));
      ++ci;
    }
    if (pi == primes.size()) break;
    const uint64_t p = primes[pi];
    const uint64_t k = sys.forbidden(p).size();
    if (k == p) throw std::domain_error("one_dim_estimate: degenerate: product vanishes");
    if (k > 0) {
      BigFloat f(static_cast<unsigned long>(p - k));
      f /= BigFloat(static_cast<unsigned long>(p));
      prod *= f;
    }
  }
  return out;
}

double rho_estimate(const SieveSystemSpec& sys, uint64_t x) {
  if (x < 100) throw std::invalid_argument("rho_estimate: x must be >= 100");
  uint64_t supported = 0;
  for (uint64_t p : primes_up_to(x).primes)
    if (!sys.forbidden(p).empty()) ++supported;
  const double lx = std::log(static_cast<double>(x));
  return static_cast<double>(supported) / (static_cast<double>(x) / lx);
}

nlohmann::json SystemReport::to_json() const {
  nlohmann::json j;
  j["label"] = label;
  j["x"] = x;
  j["nondegenerate"] = nondegenerate;
  j["bound_B"] = bound_B;
  j["checkpoints"] = checkpoints;
  j["one_dim"] = one_dim;
  j["rho"] = rho;
  j["one_dim_drift"] = one_dim_drift;
  j["one_dim_converged"] = one_dim_converged;
  return j;
}

SystemReport validate_system(const SieveSystemSpec& sys, uint64_t x) {
  if (x < 2) throw std::invalid_argument("validate_system: x must be >= 2");
  SystemReport rep;
  rep.label = sys.label;
  rep.x = x;

  for (uint64_t p : primes_up_to(x).primes) {
    const auto ip = sys.forbidden(p);
    rep.bound_B = std::max<uint64_t>(rep.bound_B, ip.size());
    if (ip.size() >= p) rep.nondegenerate = false;
  }

  // Logarithmic checkpoints 100, 1000, ..., capped at x.
  for (uint64_t c = 100; c < x; c *= 10) rep.checkpoints.push_back(c);
  if (x >= 100 && (rep.checkpoints.empty() || rep.checkpoints.back() != x))
    rep.checkpoints.push_back(x);

  if (!rep.checkpoints.empty() && rep.nondegenerate) {
    rep.one_dim = one_dim_estimate(sys, rep.checkpoints);
    for (uint64_t c : rep.checkpoints) rep.rho.push_back(rho_estimate(sys, c));
    if (rep.one_dim.size() >= 2) {
      const double last = rep.one_dim.back();
      const double prev = rep.one_dim[rep.one_dim.size() - 2];
      rep.one_dim_drift = std::abs(last / prev - 1.0);
      rep.one_dim_converged = rep.one_dim_drift < 0.02;
    }
  }
  return rep;
}

}  // namespace pav
