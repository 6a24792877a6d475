// The exponent constant C(rho): the supremum of delta > 0 with
// 6*10^(2*delta) / log(1/(2*delta)) < rho, found as the root of the
// strictly increasing left-hand side. "log" defaults to natural log;
// base 10 is selectable (the choice is checked against the known
// C(1/2) > 1/325565 inequality by the tests).

#pragma once

#include <string>
#include <vector>

#include "pav/bignum.hpp"

namespace pav {

struct RhoSolution {
  double rho = 0.0;
  double delta = 0.0;     // lower bracket end, so g(delta) < rho strictly
  double residual = 0.0;  // |g(delta) - rho|
  int iterations = 0;
};

// g(delta) = 6 * 10^(2 delta) / log_base(1/(2 delta)), at 192-bit precision.
// Domain (0, 1/2); throws outside.
BigFloat g_of_delta_big(const BigFloat& delta, double log_base = 0.0 /* 0 = natural */);
double g_of_delta(double delta, double log_base = 0.0);

// Root of g(delta) = rho in (0, 1/2) by bisection. The bracket is shrunk
// until the extended-precision midpoint collapses (or max_iter); tol is a
// required bound on the final bracket width, and failing it is an error.
// Monotonicity of g across the initial bracket is spot-checked first.
RhoSolution c_rho(double rho, double tol = 1e-12, int max_iter = 400,
                  double log_base = 0.0);

struct ParamCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct ParamReport {
  std::vector<ParamCheck> checks;
  bool all_ok = false;
};

// g(delta) < 1/2;  6 < M <= 7;  xi > 1;  K >= 1 integer;  0 < eps < (M-6)/6.
ParamReport validate_params(double delta, double xi, double M, long long K, double eps);

}  // namespace pav
