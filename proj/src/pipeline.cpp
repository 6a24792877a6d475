#include "pav/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pav/covering.hpp"
#include "pav/mertens.hpp"
#include "pav/primes.hpp"
#include "pav/residue_model.hpp"
#include "pav/rng.hpp"

namespace pav {

namespace {

nlohmann::json scan_to_json(const std::vector<OffsetCheck>& scan) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : scan)
    arr.push_back({{"offset", c.offset}, {"is_prime", c.is_prime},
                   {"deterministic", c.deterministic}});
  return arr;
}

std::vector<OffsetCheck> scan_from_json(const nlohmann::json& arr) {
  std::vector<OffsetCheck> scan;
  for (const auto& j : arr)
    scan.push_back({j.at("offset").get<int64_t>(), j.at("is_prime").get<bool>(),
                    j.at("deterministic").get<bool>()});
  return scan;
}

// Scans n+j for |j| <= radius; throws CertificateRefused on any prime.
std::vector<OffsetCheck> scan_around(const BigNat& n, int64_t radius, const char* label) {
  std::vector<OffsetCheck> scan;
  for (int64_t j = -radius; j <= radius; ++j) {
    BigNat candidate = n + j;
    if (candidate < 1) continue;
    const PrimalityResult res = is_prime(candidate);
    scan.push_back({j, res.is_prime, res.deterministic});
    if (res.is_prime) {
      std::ostringstream msg;
      msg << "prime " << to_decimal(candidate) << " within radius " << radius << " of "
          << label << " " << to_decimal(n);
      throw CertificateRefused(msg.str(), candidate);
    }
  }
  return scan;
}

bool in_middle_window(const BigNat& n, const BigNat& N) {
  return 4 * n >= N && 4 * n <= 3 * N;
}

}  // namespace

nlohmann::json AvoidanceCertificate::to_json() const {
  nlohmann::json j;
  j["N"] = to_decimal(N);
  j["n1"] = to_decimal(n1);
  j["n2"] = to_decimal(n2);
  j["radius"] = radius;
  j["x"] = x;
  j["z"] = z;
  j["y"] = y;
  j["method"] = method;
  j["scan_n1"] = scan_to_json(scan_n1);
  j["scan_n2"] = scan_to_json(scan_n2);
  j["structural_ok"] = structural_ok;
  j["regime_flags"] = regime_flags;
  return j;
}

AvoidanceCertificate AvoidanceCertificate::from_json(const nlohmann::json& j) {
  AvoidanceCertificate c;
  c.N = nat_from_decimal(j.at("N").get<std::string>());
  c.n1 = nat_from_decimal(j.at("n1").get<std::string>());
  c.n2 = nat_from_decimal(j.at("n2").get<std::string>());
  c.radius = j.at("radius").get<int64_t>();
  c.x = j.at("x").get<uint64_t>();
  c.z = j.at("z").get<double>();
  c.y = j.at("y").get<int64_t>();
  c.method = j.at("method").get<std::string>();
  c.scan_n1 = scan_from_json(j.at("scan_n1"));
  c.scan_n2 = scan_from_json(j.at("scan_n2"));
  c.structural_ok = j.at("structural_ok").get<bool>();
  c.regime_flags = j.at("regime_flags").get<std::vector<std::string>>();
  return c;
}

uint64_t choose_x(const BigNat& N) {
  if (N < 4) throw std::domain_error("choose_x: N too small for any prime cutoff");
  uint64_t limit = 64;
  for (;;) {
    const PrimeTable t = primes_up_to(limit);
    BigNat prod = 1;
    uint64_t best = 0;
    for (uint64_t p : t.primes) {
      prod *= static_cast<unsigned long>(p);
      if (2 * prod <= N)
        best = p;
      else
        return best;  // primorials are increasing; first overflow ends it
    }
    // Every prime <= limit still fits; extend the table.
    limit *= 2;
  }
}

std::optional<std::vector<std::pair<uint64_t, uint64_t>>> cleanup_assign(
    const std::vector<int64_t>& survivors_primal, const std::vector<int64_t>& survivors_dual,
    const std::vector<uint64_t>& pool, const BigNat& N) {
  // (value, dual?) merged, increasing value, primal before dual on ties.
  std::vector<std::pair<int64_t, bool>> survivors;
  for (int64_t m : survivors_primal) survivors.push_back({m, false});
  for (int64_t m : survivors_dual) survivors.push_back({m, true});
  std::sort(survivors.begin(), survivors.end());

  if (survivors.size() > pool.size()) return std::nullopt;

  std::vector<std::pair<uint64_t, uint64_t>> assignments;
  std::size_t next = 0;
  for (const auto& [m, dual] : survivors) {
    const uint64_t q = pool[next++];
    const int64_t qi = static_cast<int64_t>(q);
    uint64_t residue;
    if (!dual) {
      // Kill m in S' : need m + b = 0 (mod q), so b = -m.
      int64_t r = (-m) % qi;
      if (r < 0) r += qi;
      residue = static_cast<uint64_t>(r);
    } else {
      // Kill m in S'': need m + N - b = 0 (mod q), so b = m + N.
      const uint64_t n_mod = mpz_fdiv_ui(N.get_mpz_t(), static_cast<unsigned long>(q));
      int64_t r = m % qi;
      if (r < 0) r += qi;
      residue = (static_cast<uint64_t>(r) + n_mod) % q;
    }
    assignments.push_back({q, residue});
  }
  return assignments;
}

namespace {

// Window survivors of the shift by a full residue vector, both sides.
struct WindowCounts {
  std::vector<int64_t> primal, dual;
};

WindowCounts window_survivors(const ResidueVector& b, const BigNat& N, int64_t y) {
  WindowCounts w;
  w.primal = shifted_window(b, -y, y, 0, UINT64_MAX).members();
  w.dual = shifted_window_dual(b, N, -y, y, 0, UINT64_MAX).members();
  return w;
}

// Assemble the full residue vector over primes <= x from the z-part plus
// assigned residues (default 0) for the larger primes.
ResidueVector assemble_full(const ResidueVector& b_small, uint64_t small_limit, uint64_t x,
                            const std::map<uint64_t, uint64_t>& assigned) {
  ResidueVector full;
  for (std::size_t i = 0; i < b_small.size(); ++i)
    full.push(b_small.moduli[i], b_small.residues[i]);
  for (uint64_t q : primes_in_range(small_limit, x)) {
    auto it = assigned.find(q);
    full.push(q, it == assigned.end() ? 0 : it->second);
  }
  return full;
}

AvoidanceCertificate finish_certificate(const BigNat& N, const ResidueVector& full_b,
                                        uint64_t x, double z, int64_t y,
                                        const std::string& method) {
  // Independent emptiness re-check of both windows from the residues alone.
  const WindowCounts final_check = window_survivors(full_b, N, y);
  if (!final_check.primal.empty() || !final_check.dual.empty())
    throw std::logic_error("construction bug: window not empty after clean-up");

  const BigNat quarter = (N + 3) / 4;  // ceil(N/4)
  const BigNat b = crt_reconstruct_in_window(full_b, quarter, full_b.modulus());

  AvoidanceCertificate cert;
  cert.N = N;
  cert.n1 = b;
  cert.n2 = N - b;
  cert.radius = y;
  cert.x = x;
  cert.z = z;
  cert.y = y;
  cert.method = method;
  cert.scan_n1 = scan_around(cert.n1, y, "n1");
  cert.scan_n2 = scan_around(cert.n2, y, "n2");
  cert.structural_ok = in_middle_window(cert.n1, N) && in_middle_window(cert.n2, N) &&
                       4 * (BigNat(cert.radius) + x) < N;
  return cert;
}

}  // namespace

AvoidanceCertificate prop1_construct(const BigNat& N, uint64_t seed, int max_attempts) {
  if (max_attempts < 1) throw std::invalid_argument("prop1_construct: max_attempts >= 1");
  const uint64_t x = choose_x(N);
  const int64_t y = static_cast<int64_t>(8 * x / 100);  // floor(0.08 x), exactly
  if (y < 1)
    throw std::domain_error(
        "prop1_construct: N below degeneracy threshold (need x >= 13, i.e. N >= 60060)");
  const double zr = static_cast<double>(x) / 2.0;
  const uint64_t z_floor = static_cast<uint64_t>(std::floor(zr));
  const double budget =
      0.4 * static_cast<double>(x) / std::log(static_cast<double>(x));

  ResidueVector b_small;
  WindowCounts wins;
  bool found = false;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    b_small = sample_b(z_floor, derive_seed(seed, static_cast<uint64_t>(attempt)));
    wins = window_survivors(b_small, N, y);
    if (static_cast<double>(wins.primal.size() + wins.dual.size()) <= budget) {
      found = true;
      break;
    }
  }
  if (!found)
    throw std::runtime_error("prop1_construct: attempts exhausted without meeting the survivor budget");

  const std::vector<uint64_t> pool = primes_in_range(z_floor, x);
  const auto assignments = cleanup_assign(wins.primal, wins.dual, pool, N);
  if (!assignments)
    throw std::runtime_error("prop1_construct: survivors outnumber clean-up primes");

  std::map<uint64_t, uint64_t> assigned(assignments->begin(), assignments->end());
  const ResidueVector full_b = assemble_full(b_small, z_floor, x, assigned);
  return finish_certificate(N, full_b, x, zr, y, "prop1");
}

AvoidanceCertificate certify(const BigNat& n1, const BigNat& n2, const BigNat& N,
                             int64_t radius) {
  if (n1 + n2 != N) throw std::invalid_argument("certify: n1 + n2 != N");
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("certify: summands must be positive");
  if (radius < 0) throw std::invalid_argument("certify: radius must be >= 0");

  AvoidanceCertificate cert;
  cert.N = N;
  cert.n1 = n1;
  cert.n2 = n2;
  cert.radius = radius;
  cert.x = choose_x(N);
  cert.z = static_cast<double>(cert.x) / 2.0;
  cert.y = radius;
  cert.method = "certify";
  cert.scan_n1 = scan_around(n1, radius, "n1");
  cert.scan_n2 = scan_around(n2, radius, "n2");
  cert.structural_ok = in_middle_window(n1, N) && in_middle_window(n2, N) &&
                       4 * (BigNat(radius) + cert.x) < N;
  return cert;
}

AvoidanceCertificate recertify(const AvoidanceCertificate& cert) {
  AvoidanceCertificate fresh = certify(cert.n1, cert.n2, cert.N, cert.radius);
  fresh.method = cert.method;
  fresh.x = cert.x;
  fresh.z = cert.z;
  fresh.y = cert.y;
  fresh.regime_flags = cert.regime_flags;
  return fresh;
}

nlohmann::json Theorem1Report::to_json() const {
  nlohmann::json j;
  j["params"] = params;
  j["stage1"] = {{"attempts", stage1.attempts},
                 {"event_achieved", stage1.event_achieved},
                 {"survivors_prime", stage1.survivors_prime},
                 {"survivors_dual", stage1.survivors_dual},
                 {"union_count", stage1.union_count},
                 {"budget_union", stage1.budget_union},
                 {"exceptional", stage1.exceptional}};
  auto side = [](const Stage2Side& s) {
    nlohmann::json assignments = nlohmann::json::array();
    for (const auto& [q, r] : s.assignments) assignments.push_back({q, r});
    return nlohmann::json{{"v_size", s.v_size},
                          {"samplers", s.samplers},
                          {"degenerate_skipped", s.degenerate_skipped},
                          {"regime_skipped_q", s.regime_skipped_q},
                          {"uncovered", s.uncovered},
                          {"assignments", assignments},
                          {"cover_report", s.cover_report}};
  };
  j["stage2_prime"] = side(stage2_prime);
  j["stage2_dual"] = side(stage2_dual);
  j["stage3"] = {{"final_survivors_prime", stage3.final_survivors_prime},
                 {"final_survivors_dual", stage3.final_survivors_dual},
                 {"budget", stage3.budget},
                 {"cleanup_pool", stage3.cleanup_pool},
                 {"within_budget", stage3.within_budget},
                 {"within_pool", stage3.within_pool}};
  j["success"] = success;
  j["regime_flags"] = regime_flags;
  return j;
}

Theorem1Result theorem1_construct(const BigNat& N, const ScaleParams& params, uint64_t seed,
                                  int stage1_attempts) {
  Theorem1Result result;
  Theorem1Report& rep = result.report;
  rep.params = params.to_json();
  rep.regime_flags = params.regime_warnings;

  const uint64_t x = params.x;
  const int64_t y = params.y;
  const uint64_t half_x = x / 2;  // greedy primes live in (z, x/2]
  if (params.z_floor >= half_x)
    rep.regime_flags.push_back("z >= x/2: greedy prime range (z, x/2] is empty");
  if (choose_x(N) != x)
    rep.regime_flags.push_back("params.x differs from choose_x(N)");

  const SigmaValue sigma = mertens_sigma(params.z_floor);

  // ---- Stage 1: uniform random choice of b mod P(z) -----------------------
  ResidueVector b;
  WindowCounts wins;
  uint64_t best_union = UINT64_MAX;
  ResidueVector best_b;
  WindowCounts best_wins;
  std::vector<nlohmann::json> best_exc;
  bool achieved = false;

  rep.stage1.budget_union = 9.0 * sigma.value * static_cast<double>(y);
  for (int attempt = 0; attempt < stage1_attempts; ++attempt) {
    ++rep.stage1.attempts;
    b = sample_b(params.z_floor, derive_seed(seed, static_cast<uint64_t>(attempt)));
    wins = window_survivors(b, N, y);
    const WindowMask u = shifted_window(b, -y, y, 0, params.z_floor)
                             .or_with(shifted_window_dual(b, N, -y, y, 0, params.z_floor));
    const uint64_t union_count = u.count();

    bool exc_ok = true;
    std::vector<nlohmann::json> exc_summaries;
    for (double H : params.scales) {
      const WeightContext ctx = make_weight_context(params, H, b, N);
      const PrimeClasses classes = prime_classes(params, H);
      const ExceptionalSets exc = exceptional_sets(ctx, classes);
      exc_ok = exc_ok && exc.within_budget;
      exc_summaries.push_back(exc.to_json());
    }

    const bool event = static_cast<double>(union_count) <= rep.stage1.budget_union && exc_ok;
    if (union_count < best_union) {
      best_union = union_count;
      best_b = b;
      best_wins = wins;
      best_exc = exc_summaries;
    }
    if (event) {
      achieved = true;
      best_b = b;
      best_wins = wins;
      best_exc = exc_summaries;
      best_union = union_count;
      break;
    }
  }
  b = best_b;
  wins = best_wins;
  rep.stage1.event_achieved = achieved;
  rep.stage1.survivors_prime = wins.primal.size();
  rep.stage1.survivors_dual = wins.dual.size();
  rep.stage1.union_count = best_union;
  rep.stage1.exceptional = best_exc;
  if (!achieved)
    rep.regime_flags.push_back("stage1 event not achieved; continuing with best attempt");

  // ---- Stage 2: greedy covering with the mod-4 prime classes --------------
  const double eta = 1.0 / (100.0 * std::pow(std::log(static_cast<double>(x)), params.delta));
  std::map<uint64_t, uint64_t> assigned;  // q -> b_q

  auto run_side = [&](bool dual, Stage2Side& side) {
    // V = stage-1 survivors minus every exceptional element for any H.
    std::vector<int64_t> v = dual ? wins.dual : wins.primal;
    std::vector<EdgeSampler> samplers;
    std::vector<WeightContext> contexts;
    contexts.reserve(params.scales.size());
    std::vector<int64_t> drop;
    for (double H : params.scales) {
      contexts.push_back(make_weight_context(params, H, b, N));
      const WeightContext& ctx = contexts.back();
      const PrimeClasses classes = prime_classes(params, H);
      const ExceptionalSets exc = exceptional_sets(ctx, classes);
      const auto& e_set = dual ? exc.e_dual : exc.e_primal;
      const auto& f_set = dual ? exc.f_dual : exc.f_primal;
      drop.insert(drop.end(), e_set.begin(), e_set.end());
      drop.insert(drop.end(), f_set.begin(), f_set.end());
      for (uint64_t q : dual ? exc.q_good_dual : exc.q_good_primal) {
        if (q <= params.z_floor || q > half_x) {
          ++side.regime_skipped_q;
          continue;
        }
        try {
          samplers.push_back(sampler_from_weights(q, ctx, dual));
        } catch (const std::runtime_error&) {
          ++side.degenerate_skipped;
        }
      }
    }
    std::sort(drop.begin(), drop.end());
    std::vector<int64_t> v_kept;
    for (int64_t n : v)
      if (!std::binary_search(drop.begin(), drop.end(), n)) v_kept.push_back(n);
    side.v_size = v_kept.size();
    side.samplers = samplers.size();

    const GreedyCoverResult cover =
        greedy_cover(v_kept, samplers, 16, derive_seed(seed, dual ? 2000002 : 1000001),
                     params.K, params.delta, eta, y);
    side.uncovered = cover.uncovered.size();
    side.cover_report = cover.report.to_json();
    for (const auto& ce : cover.chosen) {
      const uint64_t q = ce.sampler_id;
      const int64_t qi = static_cast<int64_t>(q);
      uint64_t residue;
      if (!dual) {
        int64_t r = (-ce.base) % qi;  // b = -n_q
        if (r < 0) r += qi;
        residue = static_cast<uint64_t>(r);
      } else {
        const uint64_t n_mod = mpz_fdiv_ui(N.get_mpz_t(), static_cast<unsigned long>(q));
        int64_t r = ce.base % qi;  // b = n_q + N
        if (r < 0) r += qi;
        residue = (static_cast<uint64_t>(r) + n_mod) % q;
      }
      assigned[q] = residue;
      side.assignments.push_back({q, residue});
    }
  };
  run_side(false, rep.stage2_prime);
  run_side(true, rep.stage2_dual);

  // ---- Stage 3: clean-up with primes in (x/2, x] ---------------------------
  // When z overruns x/2 (desk scale) the primes of (x/2, z] are already
  // fixed by stage 1; only (z, x] remains free.
  const uint64_t cleanup_lo = std::max(half_x, params.z_floor);
  const ResidueVector b_half = assemble_full(b, params.z_floor, cleanup_lo, assigned);
  const WindowCounts final_wins = window_survivors(b_half, N, y);
  rep.stage3.final_survivors_prime = final_wins.primal.size();
  rep.stage3.final_survivors_dual = final_wins.dual.size();
  rep.stage3.budget = (0.5 - params.eps) * static_cast<double>(x) /
                      std::log(static_cast<double>(x));
  const std::vector<uint64_t> pool = primes_in_range(cleanup_lo, x);
  rep.stage3.cleanup_pool = pool.size();
  const uint64_t total = final_wins.primal.size() + final_wins.dual.size();
  rep.stage3.within_budget = static_cast<double>(total) <= rep.stage3.budget;
  rep.stage3.within_pool = total <= pool.size();

  if (rep.stage3.within_budget && rep.stage3.within_pool) {
    const auto assignments = cleanup_assign(final_wins.primal, final_wins.dual, pool, N);
    if (assignments) {
      std::map<uint64_t, uint64_t> cleanup_map(assignments->begin(), assignments->end());
      const ResidueVector full_b = assemble_full(b_half, cleanup_lo, x, cleanup_map);
      try {
        AvoidanceCertificate cert =
            finish_certificate(N, full_b, x, params.z, y, "theorem1");
        cert.regime_flags = rep.regime_flags;
        result.certificate = std::move(cert);
        rep.success = true;
      } catch (const std::exception& e) {
        rep.regime_flags.push_back(std::string("certificate build failed: ") + e.what());
      }
    }
  }
  return result;
}

}  // namespace pav
