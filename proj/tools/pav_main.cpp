// pav — command-line front end.
// Subcommands: gaps, crho, system, moments, cover, construct, certify.
// stdout carries only the structured payload (JSON or CSV); everything
// else goes to stderr. Exit codes: 0 ok, 1 domain error (JSON error
// object on stdout), 2 usage error.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pav/constants.hpp"
#include "pav/covering.hpp"
#include "pav/mertens.hpp"
#include "pav/pipeline.hpp"
#include "pav/primes.hpp"
#include "pav/residue_model.hpp"
#include "pav/sieve_system.hpp"
#include "pav/weights.hpp"

namespace {

using nlohmann::json;

// Canonical key=value dump of the options the user (or config) actually set;
// feeding the dump back as a config reproduces it byte for byte.
std::string dump_config(const CLI::App& cmd) {
  std::ostringstream out;
  for (const CLI::Option* opt : cmd.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config" || name == "dump-config") continue;
    if (opt->count() == 0) continue;
    if (opt->get_expected_min() == 0) {
      out << name << "=true\n";
      continue;
    }
    const auto& results = opt->results();
    out << name << "=";
    for (std::size_t i = 0; i < results.size(); ++i) out << (i ? "," : "") << results[i];
    out << "\n";
  }
  return out.str();
}

// Splice "key=value" config-file lines into the argument list right after
// the subcommand token; explicit flags come later, so take-last wins.
std::vector<std::string> expand_config(int argc, char** argv,
                                       const std::vector<std::string>& subcommands) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
    } else {
      ++i;
    }
  }
  if (path.empty()) return args;

  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  std::vector<std::string> tokens;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config " + path + " line " + std::to_string(lineno) +
                               ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (value == "true") {
      tokens.push_back("--" + key);
    } else if (value == "false") {
      // flag left unset
    } else {
      tokens.push_back("--" + key);
      tokens.push_back(value);
    }
  }
  std::size_t pos = args.size();
  for (std::size_t i = 0; i < args.size(); ++i)
    if (std::find(subcommands.begin(), subcommands.end(), args[i]) != subcommands.end()) {
      pos = i + 1;
      break;
    }
  args.insert(args.begin() + static_cast<long>(pos), tokens.begin(), tokens.end());
  return args;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

void emit(const json& payload) { std::cout << payload.dump(2) << "\n"; }

struct ToyOptions {
  uint64_t x = 3000;
  double delta = 0.05;
  double xi = 1.05;
  double M = 6.5;
  long long K = 3;
  double eps = 0.05;
  std::string h_list = "3";
  bool genuine = false;
};

void add_scale_options(CLI::App* cmd, ToyOptions& opt) {
  cmd->add_option("--x", opt.x, "scale parameter x");
  cmd->add_option("--delta", opt.delta, "exponent delta");
  cmd->add_option("--xi", opt.xi, "scale ratio xi (> 1)");
  cmd->add_option("--M", opt.M, "split exponent M (6 < M <= 7)");
  cmd->add_option("--K", opt.K, "progression multiplier K (integer >= 1)");
  cmd->add_option("--eps", opt.eps, "epsilon (0 < eps < (M-6)/6)");
  cmd->add_option("--H", opt.h_list, "comma-separated toy H values");
  cmd->add_flag("--genuine", opt.genuine, "derive scales from the definition instead of --H");
}

pav::ScaleParams scales_from(const ToyOptions& opt) {
  if (opt.genuine)
    return pav::make_scales(opt.x, opt.delta, opt.xi, opt.M, opt.K, opt.eps, false);
  return pav::make_scales(opt.x, opt.delta, opt.xi, opt.M, opt.K, opt.eps, true,
                          parse_double_list(opt.h_list));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prime-avoiding decomposition toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.footer("Any subcommand accepts --config <file> with key=value lines; explicit flags win.");
  int threads = 1;
  app.add_option("--threads", threads, "worker threads (results are thread-count independent)");

  // ---- gaps ----------------------------------------------------------------
  auto* gaps = app.add_subcommand("gaps", "largest prime gap up to a limit");
  uint64_t gaps_limit = 100;
  std::string gaps_save;
  bool gaps_dump_cfg = false;
  gaps->add_option("--limit", gaps_limit, "upper bound X")->required();
  gaps->add_option("--save-table", gaps_save, "write the prime table (flat binary)");
  gaps->add_flag("--dump-config", gaps_dump_cfg, "echo resolved config and exit");

  // ---- crho ----------------------------------------------------------------
  auto* crho = app.add_subcommand("crho", "solve C(rho): root of 6*10^(2d)/log(1/(2d)) = rho");
  double crho_rho = 0.5, crho_tol = 1e-12;
  std::string crho_base = "e";
  bool crho_dump_cfg = false;
  crho->add_option("--rho", crho_rho, "target density rho")->required();
  crho->add_option("--tol", crho_tol, "required bound on the final bracket width");
  crho->add_option("--log-base", crho_base, "logarithm base: e or 10")
      ->check(CLI::IsMember({"e", "10"}));
  crho->add_flag("--dump-config", crho_dump_cfg, "echo resolved config and exit");

  // ---- system ----------------------------------------------------------------
  auto* system_cmd = app.add_subcommand("system", "validate a sieving system");
  std::string sys_name = "eratosthenes";
  uint64_t sys_x = 1000000;
  std::string sys_window, sys_format = "rle";
  system_cmd->add_option("--name", sys_name,
                         "eratosthenes | empty | eratosthenes-1mod4 | eratosthenes-3mod4 | "
                         "two-point | file:<path>");
  system_cmd->add_option("--x", sys_x, "prime cutoff x");
  system_cmd->add_option("--window", sys_window, "also sieve a window lo:hi");
  system_cmd->add_option("--format", sys_format, "window export format")
      ->check(CLI::IsMember({"rle", "bitmap"}));

  // ---- moments ----------------------------------------------------------------
  auto* moments = app.add_subcommand("moments", "Monte Carlo moment experiments (CSV)");
  ToyOptions mom_toy;
  add_scale_options(moments, mom_toy);
  int mom_j = 1;
  std::string mom_which = "row";
  int mom_class = 1;
  uint64_t mom_samples = 200, mom_seed = 0;
  std::string mom_N = "1";
  moments->add_option("--j", mom_j, "moment order 0, 1 or 2")->check(CLI::Range(0, 2));
  moments->add_option("--which", mom_which, "row or col")->check(CLI::IsMember({"row", "col"}));
  moments->add_option("--class", mom_class, "prime class mod 4 (1 or 3)")
      ->check(CLI::IsMember({1, 3}));
  moments->add_option("--samples", mom_samples, "Monte Carlo samples");
  moments->add_option("--seed", mom_seed, "root seed")->required();
  moments->add_option("--N", mom_N, "dual-side shift N (decimal)");

  // ---- cover ----------------------------------------------------------------
  auto* cover = app.add_subcommand("cover", "greedy hypergraph cover with hypothesis checks");
  std::string cover_instance = "from-sieve";
  int cover_trials = 16;
  uint64_t cover_seed = 0;
  ToyOptions cover_toy;
  add_scale_options(cover, cover_toy);
  std::string cover_N = "1";
  cover->add_option("--instance", cover_instance, "instance JSON path or 'from-sieve'");
  cover->add_option("--trials", cover_trials, "candidate draws per edge");
  cover->add_option("--seed", cover_seed, "root seed")->required();
  cover->add_option("--N", cover_N, "dual shift for from-sieve instances");

  // ---- construct ----------------------------------------------------------------
  auto* construct = app.add_subcommand("construct", "build N = n1 + n2 with both far from primes");
  std::string con_n;
  std::string con_method = "prop1";
  uint64_t con_seed = 0;
  int con_attempts = 50;
  ToyOptions con_toy;
  add_scale_options(construct, con_toy);
  construct->add_option("--n", con_n, "target N (decimal)")->required();
  construct->add_option("--method", con_method, "prop1 or theorem1")
      ->check(CLI::IsMember({"prop1", "theorem1"}));
  construct->add_option("--seed", con_seed, "root seed")->required();
  construct->add_option("--max-attempts", con_attempts, "stage-1 resampling budget");

  // ---- certify ----------------------------------------------------------------
  auto* certify_cmd = app.add_subcommand("certify", "re-verify an avoidance certificate");
  std::string cert_in;
  std::string cert_n1, cert_n2, cert_N;
  int64_t cert_radius = -1;
  certify_cmd->add_option("--in", cert_in, "certificate JSON path ('-' for stdin)");
  certify_cmd->add_option("--n1", cert_n1, "first summand (decimal)");
  certify_cmd->add_option("--n2", cert_n2, "second summand (decimal)");
  certify_cmd->add_option("--N", cert_N, "target sum (decimal)");
  certify_cmd->add_option("--radius", cert_radius, "radius to certify");

  try {
    std::vector<std::string> args = expand_config(
        argc, argv, {"gaps", "crho", "system", "moments", "cover", "construct", "certify"});
    std::reverse(args.begin(), args.end());  // CLI11's vector overload wants reversed order
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    json err;
    err["error"] = e.what();
    emit(err);
    return 1;
  }

  try {
    if (*gaps) {
      if (gaps_dump_cfg) {
        std::cout << dump_config(*gaps);
        return 0;
      }
      json out;
      out["limit"] = gaps_limit;
      out["max_gap"] = pav::max_gap(gaps_limit);
      if (!gaps_save.empty()) {
        pav::save_prime_table(pav::primes_up_to(gaps_limit), gaps_save);
        out["table_saved"] = gaps_save;
      }
      emit(out);
    } else if (*crho) {
      if (crho_dump_cfg) {
        std::cout << dump_config(*crho);
        return 0;
      }
      const double base = crho_base == "10" ? 10.0 : 0.0;
      const pav::RhoSolution sol = pav::c_rho(crho_rho, crho_tol, 400, base);
      json out;
      out["rho"] = sol.rho;
      out["delta"] = sol.delta;
      out["residual"] = sol.residual;
      out["iterations"] = sol.iterations;
      out["log_base"] = crho_base;
      emit(out);
    } else if (*system_cmd) {
      const pav::SieveSystemSpec sys = pav::system_by_name(sys_name);
      pav::SystemReport rep = pav::validate_system(sys, sys_x);
      json out = rep.to_json();
      if (!sys_window.empty()) {
        const auto colon = sys_window.find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("--window expects lo:hi");
        const int64_t lo = std::stoll(sys_window.substr(0, colon));
        const int64_t hi = std::stoll(sys_window.substr(colon + 1));
        out["window"] = pav::sieved_window(sys, sys_x, lo, hi).to_json(sys_format);
      }
      emit(out);
    } else if (*moments) {
      const pav::ScaleParams params = scales_from(mom_toy);
      for (const std::string& w : params.regime_warnings) std::cerr << "note: " << w << "\n";
      const pav::BigNat N = pav::nat_from_decimal(mom_N);
      std::cout << pav::MomentReport::csv_header() << "\n";
      for (double H : params.scales) {
        const pav::MomentReport rep = pav::moment_experiment(
            params, H, mom_j, mom_which == "row" ? pav::MomentKind::Row : pav::MomentKind::Col,
            mom_class == 3, mom_samples, mom_seed, N, threads);
        std::cout << rep.csv_row() << "\n";
      }
    } else if (*cover) {
      json out;
      if (cover_instance == "from-sieve") {
        const pav::ScaleParams params = scales_from(cover_toy);
        for (const std::string& w : params.regime_warnings) std::cerr << "note: " << w << "\n";
        const pav::BigNat N = pav::nat_from_decimal(cover_N);
        const pav::ResidueVector b =
            pav::sample_b(params.z_floor, pav::derive_seed(cover_seed, 0));
        const double H = params.scales.front();
        const pav::WeightContext ctx = pav::make_weight_context(params, H, b, N);
        const pav::PrimeClasses classes = pav::prime_classes(params, H);
        std::vector<pav::EdgeSampler> samplers;
        for (uint64_t q : classes.q1) {
          try {
            samplers.push_back(pav::sampler_from_weights(q, ctx, false));
          } catch (const std::runtime_error& e) {
            std::cerr << "note: " << e.what() << "\n";
          }
        }
        std::vector<int64_t> V;
        for (int64_t n = -params.y; n <= params.y; ++n)
          if (ctx.in_shifted_set(n, false)) V.push_back(n);
        const double eta =
            1.0 / (100.0 * std::pow(std::log(static_cast<double>(params.x)), params.delta));
        const pav::GreedyCoverResult res = pav::greedy_cover(
            V, samplers, cover_trials, pav::derive_seed(cover_seed, 1), params.K,
            params.delta, eta, params.y);
        out["report"] = res.report.to_json();
        json chosen = json::array();
        for (const auto& ce : res.chosen)
          chosen.push_back({{"sampler_id", ce.sampler_id}, {"base", ce.base}, {"edge", ce.edge}});
        out["chosen"] = chosen;
        out["uncovered"] = res.uncovered;
        out["benchmark"] = pav::cover_benchmark(V, samplers, cover_trials,
                                                pav::derive_seed(cover_seed, 2), params.K,
                                                params.delta, eta, params.y);
      } else {
        std::ifstream f(cover_instance);
        if (!f) throw std::runtime_error("cannot open instance " + cover_instance);
        json inst;
        f >> inst;
        std::vector<int64_t> V = inst.at("V").get<std::vector<int64_t>>();
        std::sort(V.begin(), V.end());
        std::vector<pav::EdgeSampler> samplers;
        for (const auto& js : inst.at("samplers"))
          samplers.push_back(pav::EdgeSampler::from_json(js));
        const long long K = inst.value("K", 1LL);
        const double delta = inst.value("delta", 0.01);
        const int64_t y = inst.value("y", static_cast<int64_t>(V.size()));
        const double eta = inst.value("eta", 1.0);
        const pav::GreedyCoverResult res =
            pav::greedy_cover(V, samplers, cover_trials, cover_seed, K, delta, eta, y);
        out["report"] = res.report.to_json();
        json chosen = json::array();
        for (const auto& ce : res.chosen)
          chosen.push_back({{"sampler_id", ce.sampler_id}, {"base", ce.base}, {"edge", ce.edge}});
        out["chosen"] = chosen;
        out["uncovered"] = res.uncovered;
        out["benchmark"] = pav::cover_benchmark(V, samplers, cover_trials,
                                                pav::derive_seed(cover_seed, 2), K, delta,
                                                eta, y);
      }
      emit(out);
    } else if (*construct) {
      const pav::BigNat N = pav::nat_from_decimal(con_n);
      if (con_method == "prop1") {
        const pav::AvoidanceCertificate cert = pav::prop1_construct(N, con_seed, con_attempts);
        emit(cert.to_json());
      } else {
        ToyOptions t = con_toy;
        t.x = pav::choose_x(N);
        const pav::ScaleParams params = scales_from(t);
        for (const std::string& w : params.regime_warnings) std::cerr << "note: " << w << "\n";
        const pav::Theorem1Result res =
            pav::theorem1_construct(N, params, con_seed, con_attempts);
        json out;
        out["success"] = res.report.success;
        out["certificate"] = res.certificate ? res.certificate->to_json() : json(nullptr);
        out["report"] = res.report.to_json();
        emit(out);
      }
    } else if (*certify_cmd) {
      pav::AvoidanceCertificate cert;
      if (!cert_in.empty()) {
        json j;
        if (cert_in == "-") {
          std::cin >> j;
        } else {
          std::ifstream f(cert_in);
          if (!f) throw std::runtime_error("cannot open certificate " + cert_in);
          f >> j;
        }
        cert = pav::AvoidanceCertificate::from_json(j);
      } else {
        if (cert_n1.empty() || cert_n2.empty() || cert_N.empty() || cert_radius < 0)
          throw std::invalid_argument("certify needs --in or all of --n1 --n2 --N --radius");
        cert.n1 = pav::nat_from_decimal(cert_n1);
        cert.n2 = pav::nat_from_decimal(cert_n2);
        cert.N = pav::nat_from_decimal(cert_N);
        cert.radius = cert_radius;
        cert.method = "certify";
        cert.x = pav::choose_x(cert.N);
        cert.z = static_cast<double>(cert.x) / 2.0;
        cert.y = cert.radius;
      }
      try {
        const pav::AvoidanceCertificate fresh = pav::recertify(cert);
        emit(fresh.to_json());
      } catch (const pav::CertificateRefused& e) {
        json err;
        err["error"] = e.what();
        err["witness"] = pav::to_decimal(e.witness_prime);
        emit(err);
        return 1;
      }
    }
  } catch (const std::exception& e) {
    json err;
    err["error"] = e.what();
    emit(err);
    return 1;
  }
  return 0;
}
