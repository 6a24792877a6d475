#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "pav/covering.hpp"
#include "pav/residue_model.hpp"
#include "pav/rng.hpp"

using namespace pav;

namespace {

EdgeSampler make_sampler(uint64_t id, int64_t q, int64_t len, std::vector<int64_t> support,
                         std::vector<double> prob) {
  EdgeSampler s;
  s.id = id;
  s.q = q;
  s.edge_len = len;
  s.support = std::move(support);
  s.prob = std::move(prob);
  s.finalize();
  return s;
}

// Exhaustive oracle for P(v in e): enumerate the support, build each edge
// explicitly, sum the masses whose edge contains v (same canonical order).
double brute_prob_covered(const EdgeSampler& s, int64_t v, const std::vector<int64_t>& V) {
  std::vector<double> addends;
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    const auto edge = s.edge_in(s.support[i], V);
    if (std::find(edge.begin(), edge.end(), v) != edge.end()) addends.push_back(s.prob[i]);
  }
  return sum_sorted(std::move(addends));
}

// Exhaustive minimum uncovered count over all realization tuples.
uint64_t brute_optimum(const std::vector<int64_t>& V, const std::vector<EdgeSampler>& samplers) {
  uint64_t best = V.size();
  std::vector<std::size_t> idx(samplers.size(), 0);
  for (;;) {
    std::set<int64_t> covered;
    for (std::size_t i = 0; i < samplers.size(); ++i)
      for (int64_t pt : samplers[i].edge_in(samplers[i].support[idx[i]], V)) covered.insert(pt);
    uint64_t unc = 0;
    for (int64_t v : V)
      if (!covered.count(v)) ++unc;
    best = std::min(best, unc);
    std::size_t pos = 0;
    while (pos < samplers.size()) {
      if (++idx[pos] < samplers[pos].support.size()) break;
      idx[pos] = 0;
      ++pos;
    }
    if (pos == samplers.size()) break;
  }
  return best;
}

// Median uncovered count over single random full assignments.
uint64_t median_single_draw(const std::vector<int64_t>& V,
                            const std::vector<EdgeSampler>& samplers, uint64_t seed,
                            int draws) {
  std::vector<uint64_t> counts;
  for (int d = 0; d < draws; ++d) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(d)));
    std::set<int64_t> covered;
    for (const auto& s : samplers) {
      if (s.degenerate()) continue;
      for (int64_t pt : s.edge_in(s.sample_base(rng), V)) covered.insert(pt);
    }
    uint64_t unc = 0;
    for (int64_t v : V)
      if (!covered.count(v)) ++unc;
    counts.push_back(unc);
  }
  std::sort(counts.begin(), counts.end());
  return counts[counts.size() / 2];
}

}  // namespace

TEST_CASE("sampler finalize validates the distribution") {
  CHECK_NOTHROW(make_sampler(1, 3, 2, {0, 5}, {0.5, 0.5}));
  CHECK_THROWS(make_sampler(1, 3, 2, {0, 5}, {0.5, 0.4}));     // mass != 1
  CHECK_THROWS(make_sampler(1, 3, 2, {5, 0}, {0.5, 0.5}));     // unsorted support
  CHECK_THROWS(make_sampler(1, 3, 2, {0, 5}, {1.0, 0.0}));     // zero mass on support
}

TEST_CASE("point mass and two-point samplers draw as stated") {
  const EdgeSampler point = make_sampler(1, 3, 2, {7}, {1.0});
  Rng rng(5);
  for (int i = 0; i < 100; ++i) CHECK(point.sample_base(rng) == 7);

  const EdgeSampler two = make_sampler(2, 3, 2, {0, 9}, {0.5, 0.5});
  int lo = 0;
  const int n = 100000;
  Rng rng2(99);
  for (int i = 0; i < n; ++i)
    if (two.sample_base(rng2) == 0) ++lo;
  const double sd = std::sqrt(n * 0.25);
  CHECK(std::abs(lo - n / 2) <= 4 * sd);
}

TEST_CASE("empirical frequencies match stated masses within 4 SE") {
  const std::vector<int64_t> support = {-4, 0, 3, 11, 20};
  const std::vector<double> prob = {0.1, 0.25, 0.3, 0.15, 0.2};
  const EdgeSampler s = make_sampler(3, 5, 3, support, prob);
  std::map<int64_t, int> freq;
  const int n = 100000;
  Rng rng(31415);
  for (int i = 0; i < n; ++i) ++freq[s.sample_base(rng)];
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double expect = n * prob[i];
    const double sd = std::sqrt(n * prob[i] * (1 - prob[i]));
    CHECK(std::abs(freq[support[i]] - expect) <= 4 * sd);
  }
}

TEST_CASE("verify_hypotheses: empty sampler set and point-mass degree") {
  const std::vector<int64_t> V = {1, 2, 3};
  // No samplers: degrees are all 0, so the degree window fails unless
  // C2 - eta <= 0.
  CoverReport none = verify_hypotheses({}, V, 2, 0.01, 0.5, 100);
  CHECK_FALSE(none.degree.pass);  // C2 clamps to 10^(2 delta) ~ 1.05 > eta
  CoverReport none_loose = verify_hypotheses({}, V, 2, 0.01, 2.0, 100);
  CHECK(none_loose.degree.pass);  // now C2 <= eta

  // One point-mass edge covering v: sum of P(v in e_i) is exactly 1.
  const EdgeSampler s = make_sampler(1, 3, 2, {0}, {1.0});  // edge {3, 6}
  const std::vector<int64_t> V2 = {3, 6};
  const CoverReport rep = verify_hypotheses({s}, V2, 2, 0.01, 0.5, 100);
  CHECK(rep.single_prob.observed == 1.0);
}

TEST_CASE("closed-form P(v in e) equals exhaustive summation exactly") {
  // Sieve-derived instance at toy scale.
  const ScaleParams params = make_scales(200, 0.05, 1.05, 2.0, 2, 0.05, true, {2.0});
  const ResidueVector b = sample_b(params.z_floor, 17);
  const WeightContext ctx = make_weight_context(params, 2.0, b, BigNat(1));
  const PrimeClasses classes = prime_classes(params, 2.0);
  REQUIRE_FALSE(classes.q1.empty());
  std::vector<int64_t> V;
  for (int64_t n = -params.y; n <= params.y; ++n)
    if (ctx.in_shifted_set(n, false)) V.push_back(n);
  REQUIRE_FALSE(V.empty());
  for (uint64_t q : classes.q1) {
    EdgeSampler s;
    try {
      s = sampler_from_weights(q, ctx, false);
    } catch (const std::runtime_error&) {
      continue;
    }
    for (int64_t v : V) CHECK(s.prob_vertex_covered(v) == brute_prob_covered(s, v, V));
  }
}

TEST_CASE("greedy cover trivial outcomes") {
  // A sampler whose every realization covers all of V.
  const std::vector<int64_t> V = {3, 6};
  const EdgeSampler full = make_sampler(1, 3, 2, {0}, {1.0});
  const GreedyCoverResult res = greedy_cover(V, {full}, 4, 11, 2, 0.01, 0.5, 100);
  CHECK(res.uncovered.empty());
  CHECK(res.report.uncovered == 0);
  REQUIRE(res.chosen.size() == 1);
  CHECK(res.chosen[0].base == 0);

  // Supports disjoint from V: everything stays uncovered.
  const EdgeSampler off = make_sampler(2, 3, 2, {100}, {1.0});
  const GreedyCoverResult res2 = greedy_cover(V, {off}, 4, 11, 2, 0.01, 0.5, 100);
  CHECK(res2.uncovered == V);

  // Empty V is trivially covered.
  const GreedyCoverResult res3 = greedy_cover({}, {full}, 4, 11, 2, 0.01, 0.5, 100);
  CHECK(res3.uncovered.empty());
}

TEST_CASE("greedy cover is deterministic, in-support, and prefix-monotone") {
  Rng gen(808);
  // Random micro-instance.
  std::vector<int64_t> V;
  for (int64_t v = 0; v < 8; ++v)
    if (gen.below(2)) V.push_back(v);
  if (V.empty()) V.push_back(1);
  std::vector<EdgeSampler> samplers;
  for (uint64_t i = 0; i < 4; ++i) {
    std::set<int64_t> sup;
    const std::size_t k = 1 + gen.below(3);
    while (sup.size() < k) sup.insert(static_cast<int64_t>(gen.below(10)) - 4);
    std::vector<int64_t> support(sup.begin(), sup.end());
    std::vector<double> prob(support.size(), 1.0 / static_cast<double>(support.size()));
    samplers.push_back(make_sampler(i, 1 + static_cast<int64_t>(gen.below(3)), 2,
                                    support, prob));
  }

  const GreedyCoverResult a = greedy_cover(V, samplers, 8, 77, 2, 0.01, 0.5, 100);
  const GreedyCoverResult b = greedy_cover(V, samplers, 8, 77, 2, 0.01, 0.5, 100);
  REQUIRE(a.chosen.size() == b.chosen.size());
  for (std::size_t i = 0; i < a.chosen.size(); ++i) CHECK(a.chosen[i].base == b.chosen[i].base);

  // Every chosen realization lies in its sampler's support.
  for (const auto& ce : a.chosen) {
    const auto& s = samplers[ce.sampler_id];
    CHECK(std::binary_search(s.support.begin(), s.support.end(), ce.base));
  }

  // Appending samplers (same seed prefix) never increases the uncovered count.
  for (std::size_t cut = 2; cut <= samplers.size(); ++cut) {
    std::vector<EdgeSampler> prefix(samplers.begin(), samplers.begin() + cut);
    const GreedyCoverResult partial = greedy_cover(V, prefix, 8, 77, 2, 0.01, 0.5, 100);
    std::vector<EdgeSampler> shorter(samplers.begin(), samplers.begin() + cut - 1);
    const GreedyCoverResult prev = greedy_cover(V, shorter, 8, 77, 2, 0.01, 0.5, 100);
    CHECK(partial.uncovered.size() <= prev.uncovered.size());
  }
}

TEST_CASE("greedy is sandwiched between the exhaustive optimum and the median draw") {
  Rng gen(24601);
  for (int trial = 0; trial < 10; ++trial) {
    std::set<int64_t> vset;
    const std::size_t vsize = 3 + gen.below(6);  // |V| <= 8
    while (vset.size() < vsize) vset.insert(static_cast<int64_t>(gen.below(12)));
    const std::vector<int64_t> V(vset.begin(), vset.end());

    std::vector<EdgeSampler> samplers;
    const std::size_t s_count = 2 + gen.below(3);  // s <= 4
    for (uint64_t i = 0; i < s_count; ++i) {
      std::set<int64_t> sup;
      const std::size_t k = 1 + gen.below(3);  // small supports
      while (sup.size() < k) sup.insert(static_cast<int64_t>(gen.below(14)) - 2);
      std::vector<int64_t> support(sup.begin(), sup.end());
      std::vector<double> prob(support.size(), 1.0 / static_cast<double>(support.size()));
      samplers.push_back(make_sampler(i, 1 + static_cast<int64_t>(gen.below(4)), 3,
                                      support, prob));
    }

    const uint64_t optimum = brute_optimum(V, samplers);
    const GreedyCoverResult greedy = greedy_cover(V, samplers, 16, 1000 + trial, 2, 0.01,
                                                  0.5, 100);
    const uint64_t median = median_single_draw(V, samplers, 555 + trial, 101);
    CHECK(greedy.uncovered.size() >= optimum);
    CHECK(greedy.uncovered.size() <= median);
  }
}

TEST_CASE("degenerate samplers are skipped with a warning") {
  EdgeSampler degen;
  degen.id = 9;
  degen.q = 3;
  degen.edge_len = 2;
  const std::vector<int64_t> V = {3, 6};
  const EdgeSampler full = make_sampler(1, 3, 2, {0}, {1.0});
  const GreedyCoverResult res = greedy_cover(V, {degen, full}, 4, 1, 2, 0.01, 0.5, 100);
  CHECK(res.uncovered.empty());
  REQUIRE(res.chosen.size() == 1);
  bool warned = false;
  for (const auto& w : res.report.warnings) warned = warned || w.find("degenerate") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("cover benchmark reports uncovered fractions against the C3*eta ladder") {
  const std::vector<int64_t> V = {3, 6, 9, 12};
  const EdgeSampler s = make_sampler(1, 3, 3, {0, 3, 6}, {0.4, 0.3, 0.3});
  const auto bench = cover_benchmark(V, {s}, 4, 777, 2, 0.01, 0.25, 100, 20);
  CHECK(bench["runs"] == 20);
  CHECK(bench["fractions"].size() == 20);
  const double mean = bench["mean_uncovered_fraction"].get<double>();
  CHECK(mean >= 0.0);
  CHECK(mean <= 1.0);
  for (const char* c3 : {"1", "10", "100"}) {
    CHECK(bench["c3_benchmark"][c3].contains("threshold"));
    CHECK(bench["c3_benchmark"][c3].contains("mean_below"));
  }
  // Measurement coherence: mean_below agrees with the reported numbers.
  CHECK(bench["c3_benchmark"]["1"]["mean_below"].get<bool>() == (mean <= 0.25));
}

TEST_CASE("pairwise probabilities detect progression collisions") {
  // Edge {n+q, n+2q} with q=5: the pair (v, v+5) can co-occur, (v, v+7) cannot.
  const EdgeSampler s = make_sampler(1, 5, 2, {0, 5}, {0.5, 0.5});
  const std::vector<int64_t> V = {5, 10, 12, 15};
  const CoverReport rep = verify_hypotheses({s}, V, 2, 0.01, 0.5, 100);
  // P(5,10 in e) = P(base=0) = 0.5, the extremal pair.
  CHECK(rep.pair_prob.observed == 0.5);
  CHECK(rep.pair_prob.witness == "pair (5, 10)");
}
