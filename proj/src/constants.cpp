#include "pav/constants.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pav {

namespace {

BigFloat g_eval(const BigFloat& delta, double log_base) {
  const BigFloat half(0.5);
  const BigFloat zero(0.0);
  if (!(delta > zero) || !(delta < half))
    throw std::domain_error("g_of_delta: delta must lie in (0, 1/2)");
  // 6 * 10^(2 delta) / log(1/(2 delta)), with log in the requested base.
  const BigFloat two_delta = delta * BigFloat(2.0);
  BigFloat denom = BigFloat(0.0) - BigFloat::log(two_delta);  // ln(1/(2 delta))
  if (log_base > 0.0) denom /= BigFloat(std::log(log_base));
  return BigFloat(6.0) * BigFloat::pow10(two_delta) / denom;
}

}  // namespace

BigFloat g_of_delta_big(const BigFloat& delta, double log_base) {
  return g_eval(delta, log_base);
}

double g_of_delta(double delta, double log_base) {
  return g_eval(BigFloat(delta), log_base).to_double();
}

RhoSolution c_rho(double rho, double tol, int max_iter, double log_base) {
  if (!(rho > 0.0)) throw std::domain_error("c_rho: rho must be positive");
  if (!(tol > 0.0)) throw std::domain_error("c_rho: tol must be positive");

  const BigFloat target(rho);

  // Upper end: g explodes as delta -> 1/2 (denominator -> 0).
  BigFloat hi = BigFloat(0.5) - BigFloat(1e-30);
  if (!(g_eval(hi, log_base) > target))
    throw std::domain_error("c_rho: rho above attainable range of g");

  // Lower end: walk down by squaring until g < rho (g -> 0 only
  // logarithmically, so plain doubling of the exponent is needed).
  BigFloat lo(1e-9);
  int guard = 0;
  while (!(g_eval(lo, log_base) < target)) {
    lo *= lo;
    if (!(lo > BigFloat(0.0)) || ++guard > 60)
      throw std::domain_error("c_rho: rho below g's infimum sample");
  }

  // Spot-check monotonicity across the bracket before trusting bisection.
  {
    const int kGrid = 32;
    BigFloat prev = g_eval(lo, log_base);
    for (int i = 1; i <= kGrid; ++i) {
      // Geometric interpolation keeps samples spread over tiny lo values.
      BigFloat t(static_cast<double>(i) / kGrid);
      BigFloat point = BigFloat::exp(BigFloat::log(lo) +
                                     (BigFloat::log(hi) - BigFloat::log(lo)) * t);
      const BigFloat val = g_eval(point, log_base);
      if (!(val > prev)) {
        std::ostringstream msg;
        msg << "c_rho: non-monotone bracket detected near delta="
            << point.to_double();
        throw std::runtime_error(msg.str());
      }
      prev = val;
    }
  }

  int iters = 0;
  while (iters < max_iter) {
    BigFloat mid = (lo + hi) / BigFloat(2.0);
    if (!(mid > lo) || !(mid < hi)) break;  // precision exhausted
    ++iters;
    if (g_eval(mid, log_base) < target)
      lo = mid;
    else
      hi = mid;
  }

  if (hi - lo > BigFloat(tol))
    throw std::runtime_error("c_rho: bracket failed to shrink below tol");

  // The double the caller sees must satisfy the strict membership
  // g(delta) < rho at double rendering too; back off by ulps as needed
  // (each step moves g by far less than the tol budget).
  double delta = lo.to_double_down();
  int guard2 = 0;
  while (delta > 0.0 && !(g_eval(BigFloat(delta), log_base).to_double() < rho)) {
    delta = std::nextafter(delta, 0.0);
    if (++guard2 > 100000)
      throw std::runtime_error("c_rho: could not realize strict membership in doubles");
  }
  if (!(delta > 0.0)) throw std::runtime_error("c_rho: delta underflows double");

  RhoSolution sol;
  sol.rho = rho;
  sol.delta = delta;
  sol.iterations = iters;
  sol.residual = std::abs(g_eval(BigFloat(delta), log_base).to_double() - rho);
  return sol;
}

ParamReport validate_params(double delta, double xi, double M, long long K, double eps) {
  ParamReport rep;
  auto add = [&](const std::string& name, bool ok, const std::string& detail) {
    rep.checks.push_back({name, ok, detail});
  };

  bool g_ok = false;
  std::ostringstream gd;
  if (delta > 0.0 && delta < 0.5) {
    const double g = g_of_delta(delta);
    g_ok = g < 0.5;
    gd << "g(delta)=" << g;
  } else {
    gd << "delta outside (0, 1/2)";
  }
  add("g(delta) < 1/2", g_ok, gd.str());
  add("6 < M <= 7", M > 6.0 && M <= 7.0, "M=" + std::to_string(M));
  add("xi > 1", xi > 1.0, "xi=" + std::to_string(xi));
  add("K >= 1 integer", K >= 1, "K=" + std::to_string(K));
  add("0 < eps < (M-6)/6", eps > 0.0 && eps < (M - 6.0) / 6.0,
      "eps=" + std::to_string(eps) + ", limit=" + std::to_string((M - 6.0) / 6.0));

  rep.all_ok = true;
  for (const auto& c : rep.checks) rep.all_ok = rep.all_ok && c.ok;
  return rep;
}

}  // namespace pav
