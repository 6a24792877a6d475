#include "pav/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pav/constants.hpp"
#include "pav/mertens.hpp"
#include "pav/parallel.hpp"
#include "pav/primes.hpp"
#include "pav/rng.hpp"

namespace pav {

nlohmann::json ScaleParams::to_json() const {
  nlohmann::json j;
  j["x"] = x;
  j["delta"] = delta;
  j["xi"] = xi;
  j["M"] = M;
  j["K"] = K;
  j["eps"] = eps;
  j["y"] = y;
  j["z"] = z;
  j["z_floor"] = z_floor;
  j["scales"] = scales;
  j["toy_mode"] = toy_mode;
  j["regime_warnings"] = regime_warnings;
  return j;
}

ScaleParams make_scales(uint64_t x, double delta, double xi, double M, long long K,
                        double eps, bool toy_mode, const std::vector<double>& explicit_H) {
  if (x < 3) throw std::invalid_argument("make_scales: x must be >= 3");
  ScaleParams p;
  p.x = x;
  p.delta = delta;
  p.xi = xi;
  p.M = M;
  p.K = K;
  p.eps = eps;
  p.toy_mode = toy_mode;

  const ParamReport report = validate_params(delta, xi, M, K, eps);
  if (!report.all_ok) {
    std::string bad;
    for (const auto& c : report.checks)
      if (!c.ok) bad += (bad.empty() ? "" : "; ") + c.name + " (" + c.detail + ")";
    if (!toy_mode) throw std::invalid_argument("make_scales: invalid parameters: " + bad);
    p.regime_warnings.push_back("parameter check failed: " + bad);
  }

  const double lx = std::log(static_cast<double>(x));
  p.y = static_cast<int64_t>(std::ceil(static_cast<double>(x) * std::pow(lx, delta)));
  p.z = static_cast<double>(p.y) * std::log(lx) / std::sqrt(lx);
  p.z_floor = p.z >= 2.0 ? static_cast<uint64_t>(std::floor(p.z)) : 0;
  if (p.z_floor < 2) {
    if (!toy_mode) throw std::invalid_argument("make_scales: z below 2, no sieving primes");
    p.regime_warnings.push_back("z below 2: no sieving primes at all");
  }

  const double h_lo = 2.0 * static_cast<double>(p.y) / static_cast<double>(x);
  const double h_hi = static_cast<double>(p.y) / (xi * p.z);

  if (toy_mode) {
    if (explicit_H.empty())
      throw std::invalid_argument("make_scales: toy mode needs an explicit H list");
    p.scales = explicit_H;
    for (double H : p.scales) {
      if (!(H > 0)) throw std::invalid_argument("make_scales: H must be positive");
      std::ostringstream w;
      if (H < h_lo || H > h_hi) {
        w << "H=" << H << " outside the scale window [" << h_lo << ", " << h_hi << "]";
        p.regime_warnings.push_back(w.str());
      }
      if (!(H > 10.0) || !(std::pow(H, M) < p.z)) {
        std::ostringstream w2;
        w2 << "H=" << H << " violates 10 < H < z^(1/M)";
        p.regime_warnings.push_back(w2.str());
      }
    }
  } else {
    for (double H = 1.0; H <= h_hi; H *= xi)
      if (H >= h_lo) p.scales.push_back(H);
    if (p.scales.empty())
      throw std::invalid_argument("make_scales: empty scale set (bounds cross) outside toy mode");
    // Post-check of the derived bound: every H <= (log x)^(1/2) / loglog x.
    const double cap = std::sqrt(lx) / std::log(lx);
    for (double H : p.scales)
      if (H > cap * (1 + 1e-12))
        throw std::logic_error("make_scales: scale exceeds the (log x)^(1/2)/loglog x cap");
  }
  return p;
}

PrimeClasses prime_classes(const ScaleParams& params, double H) {
  if (std::find(params.scales.begin(), params.scales.end(), H) == params.scales.end())
    throw std::invalid_argument("prime_classes: H is not one of the configured scales");
  PrimeClasses c;
  c.H = H;
  const double yd = static_cast<double>(params.y);
  c.lo = static_cast<uint64_t>(std::floor(yd / (params.xi * H)));
  c.hi = static_cast<uint64_t>(std::floor(yd / H));
  for (uint64_t q : primes_in_range(c.lo, c.hi)) {
    if (q % 4 == 1)
      c.q1.push_back(q);
    else if (q % 4 == 3)
      c.q3.push_back(q);
    // q = 2 belongs to neither class.
  }
  return c;
}

int64_t WeightContext::base_lo() const {
  return -(params->K + 1) * params->y + 1;
}

int64_t WeightContext::base_hi() const { return params->y; }

WeightContext make_weight_context(const ScaleParams& params, double H,
                                  const ResidueVector& b, const BigNat& N) {
  WeightContext ctx;
  ctx.params = &params;
  ctx.H = H;
  ctx.kh = static_cast<int64_t>(std::floor(static_cast<double>(params.K) * H));
  if (ctx.kh < 1) throw std::invalid_argument("make_weight_context: floor(KH) < 1");
  ctx.split = split_shift(b, params.z_floor, H, params.M);
  ctx.split.N = N;
  ctx.sigma2 = ctx.split.sigma2.get_d();

  ctx.weight_pow.resize(static_cast<std::size_t>(ctx.kh) + 1);
  const double inv = 1.0 / ctx.sigma2;
  double w = 1.0;
  for (auto& slot : ctx.weight_pow) {
    slot = w;
    w *= inv;
  }

  // Window wide enough for every base point and every progression point
  // reachable from row and column sums.
  const double yd = static_cast<double>(params.y);
  const uint64_t qmax = static_cast<uint64_t>(std::floor(yd / H));
  const int64_t reach = static_cast<int64_t>(qmax) * ctx.kh;
  ctx.wlo = -(params.K + 1) * params.y - reach;
  ctx.whi = params.y + reach;

  const uint64_t hm_floor =
      ctx.split.hm >= 1.0 ? static_cast<uint64_t>(std::floor(ctx.split.hm)) : 0;
  ctx.s1p = shifted_window(b, ctx.wlo, ctx.whi, 0, hm_floor);
  ctx.s2p = shifted_window(b, ctx.wlo, ctx.whi, hm_floor, params.z_floor);
  ctx.s1d = shifted_window_dual(b, N, ctx.wlo, ctx.whi, 0, hm_floor);
  ctx.s2d = shifted_window_dual(b, N, ctx.wlo, ctx.whi, hm_floor, params.z_floor);
  return ctx;
}

std::vector<int64_t> ap_intersect(uint64_t q, int64_t n, long long K, double H,
                                  const SplitShift& split, bool dual) {
  if (!is_prime_u64(q)) throw std::invalid_argument("ap_intersect: q must be prime");
  if (K < 1) throw std::invalid_argument("ap_intersect: K must be >= 1");
  const int64_t kh = static_cast<int64_t>(std::floor(static_cast<double>(K) * H));
  std::vector<int64_t> out;
  const ResidueVector& b1 = split.b1;
  for (int64_t h = 1; h <= kh; ++h) {
    const int64_t point = n + static_cast<int64_t>(q) * h;
    bool member = true;
    for (std::size_t i = 0; i < b1.size() && member; ++i) {
      const int64_t p = static_cast<int64_t>(b1.moduli[i]);
      int64_t shifted;
      if (!dual) {
        shifted = (point + static_cast<int64_t>(b1.residues[i])) % p;
      } else {
        const uint64_t n_mod = mpz_fdiv_ui(split.N.get_mpz_t(), static_cast<unsigned long>(p));
        shifted = (point + static_cast<int64_t>(n_mod) - static_cast<int64_t>(b1.residues[i])) % p;
      }
      if (shifted < 0) shifted += p;
      member = shifted != 0;
    }
    if (member) out.push_back(point);
  }
  return out;
}

namespace {

// Size of AP and containment in the mid-range set, off the context masks.
struct ApScan {
  int64_t size = 0;
  bool contained = true;
};

ApScan scan_ap(uint64_t q, int64_t n, const WeightContext& ctx, bool dual) {
  const WindowMask& s1 = dual ? ctx.s1d : ctx.s1p;
  const WindowMask& s2 = dual ? ctx.s2d : ctx.s2p;
  ApScan r;
  for (int64_t h = 1; h <= ctx.kh; ++h) {
    const int64_t point = n + static_cast<int64_t>(q) * h;
    if (!s1.in_range(point))
      throw std::logic_error("weight window too small for progression point");
    if (s1.test(point)) {
      ++r.size;
      if (!s2.test(point)) r.contained = false;
    }
  }
  return r;
}

}  // namespace

double lambda_weight(uint64_t q, int64_t n, const WeightContext& ctx, bool dual) {
  if ((q % 4 == 3) != dual)
    throw std::invalid_argument(
        "lambda_weight: weight variant must match q mod 4 (q=1 mod 4 is primal, q=3 mod 4 dual)");
  const ApScan s = scan_ap(q, n, ctx, dual);
  return s.contained ? ctx.weight_of_size(s.size) : 0.0;
}

double row_sum(uint64_t q, const WeightContext& ctx, bool dual) {
  double total = 0.0;
  for (int64_t n = ctx.base_lo(); n <= ctx.base_hi(); ++n) {
    const ApScan s = scan_ap(q, n, ctx, dual);
    if (s.contained) total += ctx.weight_of_size(s.size);
  }
  return total;
}

double col_sum_over(int64_t n, const WeightContext& ctx, const std::vector<uint64_t>& qs,
                    bool dual) {
  double total = 0.0;
  for (uint64_t q : qs) {
    for (int64_t h = 1; h <= ctx.kh; ++h) {
      const int64_t base = n - static_cast<int64_t>(q) * h;
      const ApScan s = scan_ap(q, base, ctx, dual);
      if (s.contained) total += ctx.weight_of_size(s.size);
    }
  }
  return total;
}

double col_sum(int64_t n, const WeightContext& ctx, const PrimeClasses& classes, bool dual) {
  return col_sum_over(n, ctx, dual ? classes.q3 : classes.q1, dual);
}

nlohmann::json MomentReport::to_json() const {
  nlohmann::json j;
  j["H"] = H;
  j["q_class"] = q_class;
  j["j"] = this->j;
  j["which"] = kind == MomentKind::Row ? "row" : "col";
  j["samples"] = samples;
  j["mean"] = mean;
  j["se"] = se;
  j["main_term"] = main_term;
  j["ratio"] = ratio;
  j["exact"] = exact;
  j["regime_flags"] = regime_flags;
  return j;
}

std::string MomentReport::csv_header() {
  return "H,q_class,j,which,samples,mean,se,main_term,ratio,regime_flags";
}

std::string MomentReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << H << ',' << q_class << ',' << j << ',' << (kind == MomentKind::Row ? "row" : "col")
     << ',' << samples << ',' << mean << ',' << se << ',' << main_term << ',' << ratio << ',';
  for (std::size_t i = 0; i < regime_flags.size(); ++i)
    os << (i ? "|" : "") << regime_flags[i];
  return os.str();
}

MomentReport moment_experiment(const ScaleParams& params, double H, int j, MomentKind kind,
                               bool dual, uint64_t samples, uint64_t seed, const BigNat& N,
                               int threads) {
  if (j < 0 || j > 2) throw std::invalid_argument("moment_experiment: j must be 0, 1 or 2");
  MomentReport rep;
  rep.H = H;
  rep.q_class = dual ? 3 : 1;
  rep.j = j;
  rep.kind = kind;
  rep.regime_flags = params.regime_warnings;

  const PrimeClasses classes = prime_classes(params, H);
  const std::vector<uint64_t>& qs = dual ? classes.q3 : classes.q1;
  const int64_t kh = static_cast<int64_t>(std::floor(static_cast<double>(params.K) * H));
  const double range_len = static_cast<double>((params.K + 2) * params.y);

  const SigmaValue sigma_full = mertens_sigma(params.z_floor);
  const SigmaValue sigma_mid = mertens_sigma_range(
      static_cast<uint64_t>(std::floor(std::pow(H, params.M))), params.z_floor);

  if (kind == MomentKind::Row) {
    rep.main_term = std::pow(range_len, j) * static_cast<double>(qs.size());
  } else {
    const double col_main =
        static_cast<double>(qs.size()) * static_cast<double>(kh) / sigma_mid.value;
    rep.main_term = std::pow(col_main, j) * sigma_full.value *
                    static_cast<double>(2 * params.y + 1);
  }

  if (j == 0) {
    // Exact, sampling-free: the row case is a plain count, the column case
    // is sigma(2y+1) by linearity (every point survives with probability
    // exactly sigma).
    rep.exact = true;
    rep.samples = 0;
    rep.mean = kind == MomentKind::Row
                   ? static_cast<double>(qs.size())
                   : sigma_full.value * static_cast<double>(2 * params.y + 1);
    rep.se = 0.0;
    rep.ratio = rep.main_term != 0.0 ? rep.mean / rep.main_term : 0.0;
    return rep;
  }

  if (samples == 0) throw std::invalid_argument("moment_experiment: samples must be > 0");
  std::vector<double> stats(samples, 0.0);
  parallel_for(samples, threads, [&](std::size_t i) {
    const ResidueVector b = sample_b(params.z_floor, derive_seed(seed, i));
    const WeightContext ctx = make_weight_context(params, H, b, N);
    double stat = 0.0;
    if (kind == MomentKind::Row) {
      for (uint64_t q : qs) {
        const double r = row_sum(q, ctx, dual);
        stat += j == 1 ? r : r * r;
      }
    } else {
      const WindowMask window =
          dual ? shifted_window_dual(b, N, -params.y, params.y, 0, params.z_floor)
               : shifted_window(b, -params.y, params.y, 0, params.z_floor);
      for (int64_t n = -params.y; n <= params.y; ++n) {
        if (!window.test(n)) continue;
        const double c = col_sum(n, ctx, classes, dual);
        stat += j == 1 ? c : c * c;
      }
    }
    stats[i] = stat;
  });

  rep.samples = samples;
  rep.mean = pairwise_sum(stats) / static_cast<double>(samples);
  double var = 0.0;
  for (double s : stats) var += (s - rep.mean) * (s - rep.mean);
  var /= samples > 1 ? static_cast<double>(samples - 1) : 1.0;
  rep.se = std::sqrt(var / static_cast<double>(samples));
  rep.ratio = rep.main_term != 0.0 ? rep.mean / rep.main_term : 0.0;
  return rep;
}

nlohmann::json ExceptionalSets::to_json() const {
  nlohmann::json j;
  j["H"] = H;
  j["q_bad_primal"] = q_bad_primal.size();
  j["q_bad_dual"] = q_bad_dual.size();
  j["E_primal"] = e_primal.size();
  j["F_primal"] = f_primal.size();
  j["E_dual"] = e_dual.size();
  j["F_dual"] = f_dual.size();
  j["budget"] = budget;
  j["row_threshold"] = row_threshold;
  j["col_threshold_primal"] = col_threshold_primal;
  j["col_threshold_dual"] = col_threshold_dual;
  j["within_budget"] = within_budget;
  return j;
}

ExceptionalSets exceptional_sets(const WeightContext& ctx, const PrimeClasses& classes,
                                 const ExceptionalThresholds& thresholds) {
  const ScaleParams& params = *ctx.params;
  ExceptionalSets out;
  out.H = ctx.H;
  const double h_eps = std::pow(ctx.H, 1.0 + params.eps);
  const double range_len = static_cast<double>((params.K + 2) * params.y);
  const SigmaValue sigma_full = mertens_sigma(params.z_floor);
  out.budget = sigma_full.value * static_cast<double>(params.y) / h_eps;
  out.row_threshold =
      thresholds.row_dev.value_or(static_cast<double>(params.y) / h_eps);

  // Row filter (4.7)/(4.9): good q have row sums near (K+2)y.
  auto classify_rows = [&](const std::vector<uint64_t>& qs, bool dual,
                           std::vector<uint64_t>& good, std::vector<uint64_t>& bad) {
    for (uint64_t q : qs) {
      const double r = row_sum(q, ctx, dual);
      if (std::abs(r - range_len) <= out.row_threshold)
        good.push_back(q);
      else
        bad.push_back(q);
    }
  };
  classify_rows(classes.q1, false, out.q_good_primal, out.q_bad_primal);
  classify_rows(classes.q3, true, out.q_good_dual, out.q_bad_dual);

  const double col_main_primal = static_cast<double>(classes.q1.size()) *
                                 static_cast<double>(ctx.kh) / ctx.sigma2;
  const double col_main_dual = static_cast<double>(classes.q3.size()) *
                               static_cast<double>(ctx.kh) / ctx.sigma2;
  out.col_threshold_primal = thresholds.col_dev.value_or(col_main_primal / h_eps);
  out.col_threshold_dual = thresholds.col_dev.value_or(col_main_dual / h_eps);

  auto classify_cols = [&](bool dual, const std::vector<uint64_t>& all_q,
                           const std::vector<uint64_t>& bad_q, double col_main,
                           double col_threshold, std::vector<int64_t>& e_set,
                           std::vector<int64_t>& f_set) {
    for (int64_t n = -params.y; n <= params.y; ++n) {
      if (!ctx.in_shifted_set(n, dual)) continue;
      const double full = col_sum_over(n, ctx, all_q, dual);
      if (std::abs(full - col_main) >= col_threshold) e_set.push_back(n);
      const double bad_part = bad_q.empty() ? 0.0 : col_sum_over(n, ctx, bad_q, dual);
      if (bad_part >= col_threshold) f_set.push_back(n);
    }
  };
  classify_cols(false, classes.q1, out.q_bad_primal, col_main_primal,
                out.col_threshold_primal, out.e_primal, out.f_primal);
  classify_cols(true, classes.q3, out.q_bad_dual, col_main_dual, out.col_threshold_dual,
                out.e_dual, out.f_dual);

  const double cap = out.budget;
  out.within_budget = static_cast<double>(out.e_primal.size()) <= cap &&
                      static_cast<double>(out.f_primal.size()) <= cap &&
                      static_cast<double>(out.e_dual.size()) <= cap &&
                      static_cast<double>(out.f_dual.size()) <= cap;
  return out;
}

double c2_closed_form(const ScaleParams& params) {
  const double K = static_cast<double>(params.K);
  return K * (1.0 - 1.0 / params.xi) * std::log(1.0 / (2.0 * params.delta)) /
         (2.0 * params.M * (K + 2.0) * std::log(params.xi));
}

}  // namespace pav
