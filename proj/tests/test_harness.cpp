#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "moeb/circle.hpp"
#include "moeb/complexity.hpp"
#include "moeb/errors.hpp"
#include "moeb/harness.hpp"
#include "oracles.hpp"

using namespace moeb;
using nlohmann::json;

namespace {

constexpr long double kPiL = std::numbers::pi_v<long double>;

Observable constant_one() { return Observable{{{0, 0, 1.0}}}; }
Observable e_x() { return Observable{{{1, 0, 1.0}}}; }
Observable e_y() { return Observable{{{0, 1, 1.0}}}; }

State at(double x, double y = 0.0) {
  State s;
  s.x = x;
  s.y = y;
  return s;
}

SystemInstance skew_fixture() {
  return make_system(json::parse(
      R"({"kind":"skew2","alpha":"sqrt2-1","h":[[1,0,-0.15],[-1,0,0.15]],"tau":1})"));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("moeb_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("observables") {
  const auto f = Observable::from_json(json::parse("[[1, 2, 0.5, 0], [3, 0, 0.25]]"));
  REQUIRE(f.terms.size() == 2);
  CHECK(f.terms[0].b == 2);
  CHECK(f.terms[1].b == 0);
  CHECK(f.terms[1].c == std::complex<double>(0, 0.25));
  CHECK(f.sup_bound() == doctest::Approx(0.75));
  CHECK(f.lipschitz() == doctest::Approx(2 * std::numbers::pi * (3 * 0.5 + 3 * 0.25)));
  const State s = at(0.1, 0.3);
  const std::complex<double> want =
      0.5 * std::polar(1.0, 2 * std::numbers::pi * 0.7) +
      std::complex<double>(0, 0.25) * std::polar(1.0, 2 * std::numbers::pi * 0.3);
  CHECK(std::abs(f(s) - want) < 1e-14);
  CHECK(Observable{}.is_zero());
  CHECK_THROWS_AS(Observable::from_json(json::parse("[[1]]")), ConfigError);
  CHECK_THROWS_AS(Observable::from_json(json::parse("{}")), ConfigError);
}

TEST_CASE("correlation sum reduces to Mertens for f = 1") {
  const MobiusTable table(200000);
  const std::vector<std::uint64_t> cps = {1, 10, 1000, 54321, 200000};
  for (const auto& sys : {make_rotation(parse_alpha("sqrt2-1")), skew_fixture(),
                          make_group_skew(5, 2, {0.1, 0.2, 0.3, 0.4, 0.5})}) {
    const auto s = correlation_sum(table, sys, constant_one(), at(0.1, 0.2), cps);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      const double m = static_cast<double>(oracle::mertens_direct(cps[i]));
      CHECK(s.values[i].real() == doctest::Approx(m / cps[i]).epsilon(1e-15));
      CHECK(s.values[i].imag() == 0.0);
      CHECK(s.sums[i].real() == m);
    }
  }
  CHECK_THROWS_AS(correlation_sum(table, skew_fixture(), e_y(), at(0, 0), {300000}), SizingError);
  CHECK_THROWS_AS(correlation_sum(table, skew_fixture(), e_y(), at(0, 0), {10, 5}), DomainError);
  CHECK_THROWS_AS(correlation_sum(table, make_shift({0.5, 0.5}), e_y(), at(0, 0), {10}), DomainError);
}

TEST_CASE("correlation sum against direct orbit summation") {
  const MobiusTable table(20000);
  const auto sys = skew_fixture();
  const std::vector<std::uint64_t> cps = {100, 2500, 7000, 20000};
  const auto s = correlation_sum(table, sys, e_y(), at(0.1, 0.2), cps);

  // Direct oracle: explicit orbit, plain long double sums per block.
  const long double al = std::sqrt(2.0L) - 1.0L;
  long double x = 0.1L, y = 0.2L;
  std::vector<std::complex<long double>> blocks;
  std::complex<long double> block = 0.0L;
  std::size_t ci = 0;
  for (std::uint64_t n = 1; n <= cps.back(); ++n) {
    y += 0.3L * std::sin(2 * kPiL * x);
    x = oracle::frac(x + al);
    block += static_cast<long double>(oracle::mu_trial(n)) *
             std::polar(1.0L, 2 * kPiL * oracle::frac(y));
    if (n == cps[ci]) {
      blocks.push_back(block);
      block = 0.0L;
      ++ci;
    }
  }
  std::complex<long double> total = 0.0L;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    total += blocks[i];
    CAPTURE(cps[i]);
    CHECK(std::abs(std::complex<double>(total) / static_cast<double>(cps[i]) - s.values[i]) < 1e-9);
    // Prefix-sum consistency: each value continues the previous one.
    const std::complex<long double> prev = i ? s.sums[i - 1] : 0.0L;
    CHECK(std::abs(std::complex<double>(s.sums[i] - prev - blocks[i])) < 1e-9);
    CHECK(std::abs(s.values[i]) <= e_y().sup_bound());
  }
}

TEST_CASE("rotation correlation is small at 10^6") {
  const MobiusTable table(1000000);
  const auto s = correlation_sum(table, make_rotation(parse_alpha("sqrt2-1")), e_x(), at(0.0),
                                 {10000, 100000, 1000000});
  CHECK(std::abs(s.values.back()) < 0.02);
  for (const auto& v : s.values) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("block decomposition trace") {
  const MobiusTable table(1000100);
  const auto rot = make_rotation(parse_alpha("sqrt2-1"));

  SUBCASE("f = 0 gives zero discrepancies") {
    const auto tr = block_decomposition_trace(table, rot, Observable{}, at(0.1), 16, 0.001, 0.3, 5000);
    CHECK(tr.block_difference == 0.0);
    CHECK(tr.block_magnitude == 0.0);
  }

  SUBCASE("rotation fixture at N = 10^6") {
    const auto tr = block_decomposition_trace(table, rot, e_x(), at(0.1), 64, 0.001, 0.3, 1000000);
    CHECK(tr.epsilon1 == doctest::Approx(0.99 * std::pow(0.3 / (2 * std::numbers::pi), 2)));
    CHECK(tr.block_difference < 5 * 0.3);
    CHECK(tr.assigned > 0);
    CHECK(tr.max_assigned_distance < tr.epsilon1);
    // Assignment validity against the direct dbar_L.
    const long double al = std::sqrt(2.0L) - 1.0L;
    for (std::uint64_t n = 1; n <= 1000000; n += 9973) {
      const auto j = tr.assignment[n - 1];
      if (j == BlockTrace::kUnassigned) continue;
      const State y = at(static_cast<double>(oracle::frac(0.1L + n * al)));
      CHECK(dbar_distance(rot, y, tr.centers[j], 64) < tr.epsilon1);
    }
    // W = 64^0.001 is far below log^20 64.
    CHECK_FALSE(tr.schedule_ok);
    bool w_failed = false;
    for (const auto& c : tr.schedule)
      if (c.name.find("W = L^delta") != std::string::npos) w_failed = !c.ok;
    CHECK(w_failed);
    CHECK(tr.claims.size() == 5);
    CHECK(to_json(tr)["schedule_ok"] == false);
  }

  CHECK_THROWS_AS(block_decomposition_trace(table, rot, e_x(), at(0.1), 200, 0.001, 0.3, 1000000),
                  SizingError);
  CHECK_THROWS_AS(block_decomposition_trace(table, rot, e_x(), at(0.1), 16, 0.001, 1.3, 100),
                  DomainError);
}

TEST_CASE("svg chart") {
  const auto svg = line_chart_svg("t", {{"a", {1, 10, 100}, {1, 0.1, 0.01}}, {"b", {1, 2}, {0, 1}}},
                                  true, true);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("run_experiment") {
  const auto root = scratch("runs");
  const json corr = json::parse(R"({
    "experiment": "correlation", "seed": 3,
    "system": {"kind":"skew2","alpha":"sqrt2-1","h":[[1,0,-0.15],[-1,0,0.15]],"tau":1},
    "observable": [[0, 1, 1, 0]], "x0": [0.1, 0.2], "checkpoints": [100, 1000, 10000]})");
  const auto a = run_experiment(corr, root);
  const auto b = run_experiment(corr, root);
  CHECK(a.directory != b.directory);
  CHECK(a.directory.filename().string().rfind("correlation-", 0) == 0);
  for (const char* f : {"series.csv", "summary.json", "plot.svg"}) {
    CAPTURE(f);
    CHECK(std::filesystem::exists(a.directory / f));
    CHECK(slurp(a.directory / f) == slurp(b.directory / f));
  }
  CHECK(slurp(a.directory / "series.csv").rfind("N,re,im,abs\n", 0) == 0);
  CHECK(slurp(a.directory / "plot.svg").find("<svg") != std::string::npos);
  const auto summary = json::parse(slurp(a.directory / "summary.json"));
  CHECK(summary["seed"] == 3);
  CHECK(summary["version"] == code_version());
  CHECK(summary["parameters"]["x0"][0] == 0.1);

  auto message = [&](const json& cfg) {
    try {
      run_experiment(cfg, root);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  json no_alpha = corr;
  no_alpha["system"].erase("alpha");
  CHECK(message(no_alpha).find("'alpha'") != std::string::npos);
  CHECK(message(json::parse(R"({"experiment":"lemma54"})")).find("'alpha'") != std::string::npos);
  CHECK(message(json::parse(R"({"experiment":"nope"})")).find("config schema") != std::string::npos);
  CHECK(message(json::parse(R"({"seed":1})")).find("'experiment'") != std::string::npos);
  CHECK(message(json::parse(R"({"experiment":"mrt-bilinear","N":"x","L":2})")).find("malformed") !=
        std::string::npos);

  for (const char* text : {
           R"({"experiment":"sieve-check","limit":20000})",
           R"({"experiment":"lemma54","alpha":"quotients:2,17;tail=3","grid":256})",
           R"({"experiment":"covering-profile","system":{"kind":"rotation","alpha":"sqrt2-1"},
               "samples":100,"eps":[0.1],"ns":[1,4,16]})",
           R"({"experiment":"mrt-bilinear","N":[1000,4000],"L":4})",
           R"({"experiment":"block-trace","system":{"kind":"rotation","alpha":"sqrt2-1"},
               "observable":[[1,1,0]],"x0":[0.1],"L":16,"delta":0.001,"epsilon":0.3,"N":5000,
               "samples":100})"}) {
    const auto cfg = json::parse(text);
    CAPTURE(cfg["experiment"]);
    const auto r = run_experiment(cfg, root);
    CHECK(r.files.size() == 3);
    CHECK(r.summary["experiment"] == cfg["experiment"]);
  }
  const auto sieve = run_experiment(json::parse(R"({"experiment":"sieve-check","limit":20000})"), root);
  CHECK(sieve.summary["results"]["mismatches"] == 0);
  CHECK(sieve.summary["results"]["mertens"] == oracle::mertens_direct(20000));
  std::filesystem::remove_all(root);
}
