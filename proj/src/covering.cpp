#include "pav/covering.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pav {

double sum_sorted(std::vector<double> addends) {
  std::sort(addends.begin(), addends.end());
  double total = 0.0;
  for (double a : addends) total += a;
  return total;
}

void EdgeSampler::finalize() {
  if (support.size() != prob.size())
    throw std::invalid_argument("EdgeSampler: support/prob size mismatch");
  if (!std::is_sorted(support.begin(), support.end()))
    throw std::invalid_argument("EdgeSampler: support must ascend");
  cdf.resize(prob.size());
  double run = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    if (prob[i] <= 0.0) throw std::invalid_argument("EdgeSampler: nonpositive mass on support");
    run += prob[i];
    cdf[i] = run;
  }
  if (!support.empty() && std::abs(run - 1.0) > 1e-12)
    throw std::invalid_argument("EdgeSampler: masses must sum to 1 within 1e-12");
}

std::vector<int64_t> EdgeSampler::edge_points(int64_t base) const {
  std::vector<int64_t> pts;
  pts.reserve(static_cast<std::size_t>(edge_len));
  for (int64_t h = 1; h <= edge_len; ++h) pts.push_back(base + q * h);
  return pts;
}

std::vector<int64_t> EdgeSampler::edge_in(int64_t base, const std::vector<int64_t>& V) const {
  std::vector<int64_t> out;
  for (int64_t pt : edge_points(base))
    if (std::binary_search(V.begin(), V.end(), pt)) out.push_back(pt);
  return out;
}

int64_t EdgeSampler::sample_base(Rng& rng) const {
  if (degenerate()) throw std::logic_error("EdgeSampler: sampling a degenerate sampler");
  const double u = rng.uniform01();
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  const std::size_t i = it == cdf.end() ? cdf.size() - 1
                                        : static_cast<std::size_t>(it - cdf.begin());
  return support[i];
}

double EdgeSampler::mass_at(int64_t base) const {
  const auto it = std::lower_bound(support.begin(), support.end(), base);
  if (it == support.end() || *it != base) return 0.0;
  return prob[static_cast<std::size_t>(it - support.begin())];
}

double EdgeSampler::prob_vertex_covered(int64_t v) const {
  std::vector<double> addends;
  for (int64_t h = 1; h <= edge_len; ++h) {
    const double m = mass_at(v - q * h);
    if (m > 0.0) addends.push_back(m);
  }
  return sum_sorted(std::move(addends));
}

nlohmann::json EdgeSampler::to_json() const {
  return {{"id", id}, {"q", q}, {"len", edge_len}, {"support", support}, {"prob", prob}};
}

EdgeSampler EdgeSampler::from_json(const nlohmann::json& j) {
  EdgeSampler s;
  s.id = j.at("id").get<uint64_t>();
  s.q = j.at("q").get<int64_t>();
  s.edge_len = j.at("len").get<int64_t>();
  s.support = j.at("support").get<std::vector<int64_t>>();
  s.prob = j.at("prob").get<std::vector<double>>();
  s.finalize();
  return s;
}

EdgeSampler sampler_from_weights(uint64_t q, const WeightContext& ctx, bool dual) {
  EdgeSampler s;
  s.id = q;
  s.q = static_cast<int64_t>(q);
  s.edge_len = ctx.kh;
  std::vector<double> raw;
  for (int64_t n = ctx.base_lo(); n <= ctx.base_hi(); ++n) {
    const double w = lambda_weight(q, n, ctx, dual);
    if (w > 0.0) {
      s.support.push_back(n);
      raw.push_back(w);
    }
  }
  if (s.support.empty())
    throw std::runtime_error("degenerate sampler: all weights vanish for q=" + std::to_string(q));
  const double total = sum_sorted(raw);
  s.prob.reserve(raw.size());
  for (double w : raw) s.prob.push_back(w / total);
  // Renormalization guard: force the tail so finalize()'s 1e-12 check holds.
  s.finalize();
  return s;
}

nlohmann::json CoverReport::to_json() const {
  auto check = [](const HypothesisCheck& c) {
    return nlohmann::json{
        {"pass", c.pass}, {"observed", c.observed}, {"bound", c.bound}, {"witness", c.witness}};
  };
  nlohmann::json j;
  j["v_size"] = v_size;
  j["s"] = s;
  j["uncovered"] = uncovered;
  j["edge_size"] = check(edge_size);
  j["single_prob"] = check(single_prob);
  j["pair_prob"] = check(pair_prob);
  j["degree"] = check(degree);
  j["c2"] = c2;
  j["c2_in_range"] = c2_in_range;
  j["eta"] = eta;
  j["eta_in_range"] = eta_in_range;
  j["y"] = y;
  j["warnings"] = warnings;
  return j;
}

CoverReport verify_hypotheses(const std::vector<EdgeSampler>& samplers,
                              const std::vector<int64_t>& V, long long K, double delta,
                              double eta, int64_t y, std::optional<double> c2) {
  if (!std::is_sorted(V.begin(), V.end()))
    throw std::invalid_argument("verify_hypotheses: V must be sorted");
  CoverReport rep;
  rep.v_size = V.size();
  rep.s = samplers.size();
  rep.eta = eta;
  rep.y = y;

  const double yd = static_cast<double>(y);
  const double ly = std::log(yd);

  // (3.6) edge sizes over each support.
  rep.edge_size.bound = static_cast<double>(K) * std::sqrt(ly) / std::log(ly);
  for (const auto& s : samplers) {
    for (int64_t base : s.support) {
      const double sz = static_cast<double>(s.edge_in(base, V).size());
      if (sz > rep.edge_size.observed) {
        rep.edge_size.observed = sz;
        std::ostringstream w;
        w << "sampler " << s.id << " base " << base;
        rep.edge_size.witness = w.str();
      }
    }
  }
  rep.edge_size.pass = rep.edge_size.observed <= rep.edge_size.bound;

  // (3.7) single-vertex probabilities; also collect degrees for (3.9).
  rep.single_prob.bound = std::pow(yd, -0.5 - 0.01);
  std::vector<double> degree(V.size(), 0.0);
  for (std::size_t vi = 0; vi < V.size(); ++vi) {
    std::vector<double> per_sampler;
    for (const auto& s : samplers) {
      const double p = s.prob_vertex_covered(V[vi]);
      per_sampler.push_back(p);
      if (p > rep.single_prob.observed) {
        rep.single_prob.observed = p;
        std::ostringstream w;
        w << "v=" << V[vi] << " sampler " << s.id;
        rep.single_prob.witness = w.str();
      }
    }
    degree[vi] = sum_sorted(std::move(per_sampler));
  }
  rep.single_prob.pass = rep.single_prob.observed <= rep.single_prob.bound;

  // (3.8) pairwise probabilities: v,v' both in a progression edge forces
  // q | v'-v with offsets in range.
  rep.pair_prob.bound = std::pow(yd, -0.5);
  for (std::size_t a = 0; a < V.size(); ++a) {
    for (std::size_t b = a + 1; b < V.size(); ++b) {
      std::vector<double> addends;
      for (const auto& s : samplers) {
        if (s.q == 0) continue;
        const int64_t diff = V[b] - V[a];
        if (diff % s.q != 0) continue;
        const int64_t dh = diff / s.q;  // offset gap between the two hits
        if (dh < 1 || dh > s.edge_len - 1) continue;
        for (int64_t h = 1; h + dh <= s.edge_len; ++h) {
          const double m = s.mass_at(V[a] - s.q * h);
          if (m > 0.0) addends.push_back(m);
        }
      }
      const double total = sum_sorted(std::move(addends));
      if (total > rep.pair_prob.observed) {
        rep.pair_prob.observed = total;
        std::ostringstream w;
        w << "pair (" << V[a] << ", " << V[b] << ")";
        rep.pair_prob.witness = w.str();
      }
    }
  }
  rep.pair_prob.pass = rep.pair_prob.observed <= rep.pair_prob.bound;

  // (3.9)-(3.10) degree window.
  double dmin = 0.0, dmax = 0.0;
  if (!degree.empty()) {
    dmin = *std::min_element(degree.begin(), degree.end());
    dmax = *std::max_element(degree.begin(), degree.end());
  }
  const double c2_lo = std::pow(10.0, 2.0 * delta);
  rep.c2 = c2.value_or(std::clamp((dmin + dmax) / 2.0, c2_lo, 100.0));
  rep.c2_in_range = rep.c2 >= c2_lo && rep.c2 <= 100.0;
  rep.eta_in_range = eta >= 1.0 / (std::pow(ly, delta) * std::log(ly));
  rep.degree.bound = eta;
  rep.degree.observed = 0.0;
  rep.degree.pass = true;
  for (std::size_t vi = 0; vi < V.size(); ++vi) {
    const double dev = std::abs(degree[vi] - rep.c2);
    if (dev > rep.degree.observed) {
      rep.degree.observed = dev;
      rep.degree.witness = "v=" + std::to_string(V[vi]);
    }
    if (dev > eta) rep.degree.pass = false;
  }

  return rep;
}

GreedyCoverResult greedy_cover(const std::vector<int64_t>& V,
                               const std::vector<EdgeSampler>& samplers,
                               int trials_per_edge, uint64_t seed, long long K,
                               double delta, double eta, int64_t y) {
  if (trials_per_edge < 1)
    throw std::invalid_argument("greedy_cover: trials_per_edge must be >= 1");
  std::vector<int64_t> v_sorted = V;
  std::sort(v_sorted.begin(), v_sorted.end());
  v_sorted.erase(std::unique(v_sorted.begin(), v_sorted.end()), v_sorted.end());

  GreedyCoverResult result;
  std::set<int64_t> covered;

  for (std::size_t i = 0; i < samplers.size(); ++i) {
    const EdgeSampler& s = samplers[i];
    if (s.degenerate()) {
      result.report.warnings.push_back("skipped degenerate sampler " + std::to_string(s.id));
      continue;
    }
    Rng rng(derive_seed(seed, i));
    int64_t best_base = 0;
    std::size_t best_new = 0;
    bool have = false;
    for (int t = 0; t < trials_per_edge; ++t) {
      const int64_t base = s.sample_base(rng);
      std::size_t fresh = 0;
      for (int64_t pt : s.edge_in(base, v_sorted))
        if (!covered.count(pt)) ++fresh;
      if (!have || fresh > best_new || (fresh == best_new && base < best_base)) {
        best_base = base;
        best_new = fresh;
        have = true;
      }
    }
    // Kept realization must lie in the sampler's support.
    if (!std::binary_search(s.support.begin(), s.support.end(), best_base))
      throw std::logic_error("greedy_cover: chosen base escaped the support");
    ChosenEdge ce;
    ce.sampler_id = s.id;
    ce.base = best_base;
    ce.edge = s.edge_in(best_base, v_sorted);
    for (int64_t pt : ce.edge) covered.insert(pt);
    result.chosen.push_back(std::move(ce));
  }

  // Uncovered set recomputed from scratch off the chosen bases.
  std::set<int64_t> covered_check;
  for (const auto& ce : result.chosen) {
    for (const auto& s : samplers) {
      if (s.id != ce.sampler_id) continue;
      for (int64_t pt : s.edge_in(ce.base, v_sorted)) covered_check.insert(pt);
      break;
    }
  }
  for (int64_t v : v_sorted)
    if (!covered_check.count(v)) result.uncovered.push_back(v);

  CoverReport rep = verify_hypotheses(samplers, v_sorted, K, delta, eta, y);
  rep.warnings.insert(rep.warnings.end(), result.report.warnings.begin(),
                      result.report.warnings.end());
  rep.uncovered = result.uncovered.size();
  result.report = std::move(rep);
  return result;
}

nlohmann::json cover_benchmark(const std::vector<int64_t>& V,
                               const std::vector<EdgeSampler>& samplers,
                               int trials_per_edge, uint64_t seed, long long K,
                               double delta, double eta, int64_t y, int runs) {
  nlohmann::json out;
  std::vector<double> fractions;
  const double denom = V.empty() ? 1.0 : static_cast<double>(V.size());
  for (int r = 0; r < runs; ++r) {
    const GreedyCoverResult res = greedy_cover(V, samplers, trials_per_edge,
                                               derive_seed(seed, static_cast<uint64_t>(r)),
                                               K, delta, eta, y);
    fractions.push_back(static_cast<double>(res.uncovered.size()) / denom);
  }
  double mean = 0.0;
  for (double f : fractions) mean += f;
  mean /= runs > 0 ? static_cast<double>(runs) : 1.0;
  out["runs"] = runs;
  out["fractions"] = fractions;
  out["mean_uncovered_fraction"] = mean;
  out["eta"] = eta;
  nlohmann::json bench = nlohmann::json::object();
  for (int c3 : {1, 10, 100}) {
    nlohmann::json entry;
    entry["threshold"] = static_cast<double>(c3) * eta;
    entry["mean_below"] = mean <= static_cast<double>(c3) * eta;
    bench[std::to_string(c3)] = entry;
  }
  out["c3_benchmark"] = bench;
  return out;
}

}  // namespace pav
