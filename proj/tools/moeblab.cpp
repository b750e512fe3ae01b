// moeblab: command-line front end for the moeb library.
//
// Exit status: 0 ok, 2 usage or parameter error, 3 failed invariant.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "moeb/cocycle.hpp"
#include "moeb/complexity.hpp"
#include "moeb/contfrac.hpp"
#include "moeb/errors.hpp"
#include "moeb/harness.hpp"
#include "moeb/mrt.hpp"
#include "moeb/numtheory.hpp"

using namespace moeb;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::optional<SystemInstance> load_system(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return make_system(read_json_file(path));
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& s : w) std::cerr << "warning: " << s << "\n";
}

std::string num(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

// Rows "m,re,im"; a non-numeric first line is taken as a header.
std::vector<FourierTerm> read_coeffs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open coefficient file '" + path + "'");
  std::vector<FourierTerm> terms;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    long long m;
    double re, im = 0.0;
    if (!(ss >> m >> re)) {
      if (lineno == 1) continue;
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected m,re,im");
    }
    ss >> im;
    terms.push_back({m, {re, im}});
  }
  return terms;
}

ExactAlpha alpha_from(const std::string& text, const std::optional<SystemInstance>& system,
                      const std::string& who) {
  if (!text.empty()) return parse_alpha(text);
  if (system && system->alpha) return *system->alpha;
  throw UsageError(who + ": give --alpha or a --system with alpha");
}

std::vector<double> grid_of(std::uint64_t N, std::size_t K) {
  if (K == 0) return default_t_grid(N);
  std::vector<double> g;
  const double T = std::log(static_cast<double>(N));
  for (std::size_t i = 0; i < K; ++i)
    g.push_back(K == 1 ? 0.0 : -T + 2.0 * T * static_cast<double>(i) / static_cast<double>(K - 1));
  if (std::find(g.begin(), g.end(), 0.0) == g.end()) g.push_back(0.0);
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moeblab: measure complexity and Mobius disjointness experiments"};
  app.require_subcommand(1);
  std::string system_path;
  auto add_system = [&](CLI::App* sub) {
    sub->add_option("--system", system_path, "System descriptor JSON file");
  };

  // mobius
  auto* mob = app.add_subcommand("mobius", "Mobius sieve, Mertens function, pretentious distance");
  add_system(mob);
  std::uint64_t mob_limit = 0, mob_mertens = 0, mob_bign = 100000;
  std::uint32_t mob_bigq = 1;
  std::size_t mob_tgrid = 0;
  bool mob_pret = false;
  mob->add_option("--limit", mob_limit, "Print n,mu for n <= limit");
  mob->add_option("--mertens", mob_mertens, "Print M(N) as JSON");
  mob->add_flag("--pretentious", mob_pret, "Print q,chi_index,t,distance_sq");
  mob->add_option("--bigq", mob_bigq, "Largest modulus Q");
  mob->add_option("--bign", mob_bign, "Prime range N for the distance");
  mob->add_option("--tgrid", mob_tgrid, "Number of t values (default: 201 plus 0)");

  // mrt
  auto* mrt = app.add_subcommand("mrt", "Typical-factorization set and bilinear average");
  add_system(mrt);
  double p1 = 0, q1 = 0;
  std::uint64_t n0 = 0, bign = 0, ell = 1;
  std::string mrt_csv;
  mrt->add_option("--p1", p1, "P1")->required();
  mrt->add_option("--q1", q1, "Q1")->required();
  mrt->add_option("--n0", n0, "N0 (default ceil(sqrt N))");
  mrt->add_option("--bign", bign, "N")->required();
  mrt->add_option("--ell", ell, "L for the bilinear average");
  mrt->add_option("--csv", mrt_csv, "Write n,in_set rows to this file");

  // contfrac
  auto* cfc = app.add_subcommand("contfrac", "Continued fraction, convergents and resonance sets");
  add_system(cfc);
  std::string cf_alpha, cf_quot;
  double cf_tau = 1.0;
  std::size_t cf_depth = 20;
  std::int64_t cf_bound = 1000000;
  cfc->add_option("--alpha", cf_alpha, "Exact alpha, e.g. sqrt2-1, 2/7, quotients:2,17;tail=3");
  cfc->add_option("--quotients", cf_quot, "Partial quotients a1,a2,...");
  cfc->add_option("--tau", cf_tau, "tau > 0");
  cfc->add_option("--depth", cf_depth, "Number of partial quotients");
  cfc->add_option("--freq-bound", cf_bound, "Truncation of M");

  // cocycle
  auto* coc = app.add_subcommand("cocycle", "Resonance split, coboundary and block estimate");
  add_system(coc);
  std::string co_coeffs, co_alpha;
  double co_tau = 1.0;
  std::size_t co_depth = 6, co_grid = 1024;
  bool co_check = false;
  coc->add_option("--coeffs", co_coeffs, "CSV rows m,re,im");
  coc->add_option("--alpha", co_alpha, "Exact alpha");
  coc->add_option("--tau", co_tau, "tau > 0");
  coc->add_option("--depth", co_depth, "Continued fraction depth");
  coc->add_option("--grid", co_grid, "Grid size for the block estimate");
  coc->add_flag("--check-lemma54", co_check, "Print t,q_t,deviation,bound_power rows");

  // complexity
  auto* cpx = app.add_subcommand("complexity", "Covering numbers S_n under dbar_n");
  add_system(cpx);
  std::size_t cx_samples = 2000;
  std::vector<double> cx_eps = {0.1};
  std::vector<std::uint64_t> cx_ns = {1, 2, 4, 8, 16, 32, 64};
  double cx_tau = 1.0;
  std::uint64_t cx_seed = 1;
  std::string cx_summary;
  cpx->add_option("--samples", cx_samples, "Cloud size");
  cpx->add_option("--eps", cx_eps, "Radii")->delimiter(',');
  cpx->add_option("--ns", cx_ns, "Ascending n values")->delimiter(',');
  cpx->add_option("--tau", cx_tau, "Exponent of U(n) = n^tau");
  cpx->add_option("--seed", cx_seed, "Sampler seed");
  cpx->add_option("--summary", cx_summary, "Write the JSON summary here (default: stderr)");

  // run
  auto* run = app.add_subcommand("run", "Run an experiment config");
  add_system(run);
  std::string run_config, run_out = "runs";
  run->add_option("config", run_config, "Experiment config JSON")->required();
  run->add_option("--out", run_out, "Output root directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const auto system = load_system(system_path);
    if (system) print_warnings(system->warnings);

    if (*mob) {
      if (!mob_limit && !mob_mertens && !mob_pret) {
        throw UsageError("mobius: give --limit, --mertens or --pretentious");
      }
      const std::uint64_t need = std::max({mob_limit, mob_mertens, mob_pret ? mob_bign : 0});
      const MobiusTable table(need);
      if (mob_limit) {
        std::cout << "n,mu\n";
        for (std::uint64_t n = 1; n <= mob_limit; ++n) std::cout << n << ',' << table.mu(n) << '\n';
      }
      if (mob_mertens) {
        std::cout << json{{"N", mob_mertens}, {"mertens", mertens(table, mob_mertens)}}.dump() << "\n";
      }
      if (mob_pret) {
        const auto grid = grid_of(mob_bign, mob_tgrid);
        const auto r = mobius_non_pretentious(table, mob_bign, mob_bigq, grid);
        std::cout << "q,chi_index,t,distance_sq\n";
        for (const auto& c : r.candidates)
          std::cout << c.q << ',' << c.chi_index << ',' << num(c.t) << ',' << num(c.distance_sq) << '\n';
        std::cerr << json{{"N", mob_bign},
                          {"Q", mob_bigq},
                          {"min_distance_sq", r.min_distance_sq},
                          {"witness", {r.witness.q, r.witness.chi_index, r.witness.t}}}
                         .dump()
                  << "\n";
      }
      return 0;
    }

    if (*mrt) {
      if (!n0) n0 = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(bign))));
      const auto ladder = build_ladder(p1, q1, n0, bign);
      const MobiusTable table(bign + ell);
      const auto mask = typical_set_mask(ladder, table);
      const auto stats = complement_density(ladder, table);
      const double avg = bilinear_mobius_average(table, mask, bign, ell);
      if (!mrt_csv.empty()) {
        std::ofstream os(mrt_csv);
        if (!os) throw ConfigError("cannot write '" + mrt_csv + "'");
        os << "n,in_set\n";
        for (std::uint64_t n = 1; n <= bign; ++n) os << n << ',' << int(mask[n]) << '\n';
      }
      std::cout << json{{"N", bign},
                        {"L", ell},
                        {"J", ladder.J()},
                        {"bilinear_avg", avg},
                        {"complement_ratio", stats.complement_ratio}}
                       .dump()
                << "\n";
      return 0;
    }

    if (*cfc) {
      std::string text = cf_alpha;
      if (!cf_quot.empty()) text = "quotients:" + cf_quot;
      const auto cf = expand(alpha_from(text, system, "contfrac"), cf_depth);
      const auto res = resonance_sets(cf, cf_tau, cf_bound);
      json out;
      out["alpha"] = cf.alpha.describe();
      out["terminated"] = cf.terminated;
      out["quotients"] = json::array();
      for (std::size_t k = 1; k < cf.a.size(); ++k) out["quotients"].push_back(cf.a[k].get_str());
      out["convergents"] = json::array();
      for (std::size_t k = 1; k < cf.q.size(); ++k)
        out["convergents"].push_back({cf.p[k].get_str(), cf.q[k].get_str()});
      out["tau"] = cf_tau;
      out["E"] = res.E;
      out["M"] = res.M;
      out["m_finite_within_depth"] = res.m_finite_within_depth;
      out["warnings"] = res.warnings;
      // Very large convergents can outrun the precision cap; report that
      // instead of dropping the rest of the output.
      try {
        json rows = json::array();
        for (const auto& r : best_approx_check(cf))
          rows.push_back({{"k", r.k},
                          {"norm", r.norm},
                          {"lower", r.lower},
                          {"upper", r.upper},
                          {"certified", r.status == ApproxStatus::Certified}});
        out["best_approximation"] = rows;
      } catch (const PrecisionError& e) {
        out["best_approximation"] = nullptr;
        out["best_approximation_error"] = e.what();
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (*coc) {
      std::vector<FourierTerm> terms;
      if (!co_coeffs.empty()) {
        terms = read_coeffs(co_coeffs);
      } else if (system && system->h) {
        terms = system->h->terms();
      } else {
        throw UsageError("cocycle: give --coeffs or a --system with h");
      }
      const auto h = FourierCocycle::from_terms(terms, co_tau);
      const auto cf = expand(alpha_from(co_alpha, system, "cocycle"), co_depth);
      const auto res = resonance_sets(cf, co_tau);
      const auto split = split_cocycle(h, cf, res);
      print_warnings(res.warnings);
      if (co_check) {
        const auto rep = block_estimate_check(split.h1, cf, res, co_grid);
        print_warnings(rep.warnings);
        std::cout << "t,q_t,deviation,bound_power\n";
        for (const auto& r : rep.rows)
          std::cout << r.t << ',' << r.q_t.get_str() << ',' << num(static_cast<double>(r.deviation)) << ','
                    << num(static_cast<double>(r.bound_power)) << '\n';
        std::cerr << json{{"max_ratio", rep.max_ratio}}.dump() << "\n";
      } else {
        json h1 = json::array();
        for (const auto& t : split.h1.terms()) h1.push_back({t.m, t.c.real(), t.c.imag()});
        std::cout << json{{"alpha", cf.alpha.describe()},
                          {"E", res.E},
                          {"h1", h1},
                          {"psi_terms", split.psi.size()},
                          {"small_denominator_checks", split.checks.size()}}
                         .dump(2)
                  << "\n";
      }
      return 0;
    }

    if (*cpx) {
      if (!system) throw UsageError("complexity: --system is required");
      auto sys = std::make_shared<const SystemInstance>(*system);
      const auto cloud = OrbitCloud::sample(sys, cx_samples, cx_seed);
      const auto profiles = complexity_profile(cloud, cx_eps, cx_ns, cx_tau);
      std::cout << "epsilon,n,Sn,method,covered_mass\n";
      json summary = json::array();
      for (const auto& p : profiles) {
        for (const auto& r : p.rows)
          std::cout << num(p.epsilon) << ',' << r.n << ',' << r.S << ',' << to_string(r.method) << ','
                    << num(r.covered_mass) << '\n';
        summary.push_back({{"epsilon", p.epsilon},
                           {"classification", to_string(p.classification)},
                           {"polynomial_exponent", p.polynomial.slope},
                           {"exponential_rate", p.exponential.slope},
                           {"liminf_readout", p.liminf_readout},
                           {"note", p.note}});
      }
      const json doc = {{"provenance", cloud.provenance}, {"tau", cx_tau}, {"profiles", summary}};
      if (cx_summary.empty()) {
        std::cerr << doc.dump(2) << "\n";
      } else {
        std::ofstream os(cx_summary);
        if (!os) throw ConfigError("cannot write '" + cx_summary + "'");
        os << doc.dump(2) << "\n";
      }
      return 0;
    }

    if (*run) {
      json config = read_json_file(run_config);
      if (!system_path.empty()) config["system"] = read_json_file(system_path);
      const auto rep = run_experiment(config, run_out);
      std::cout << rep.directory.string() << "\n";
      return 0;
    }
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
