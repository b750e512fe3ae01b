#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "moeb/circle.hpp"
#include "moeb/dynamics.hpp"
#include "moeb/errors.hpp"
#include "oracles.hpp"

using namespace moeb;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

FourierCocycle cosine(double amp) {
  return FourierCocycle::from_terms({{1, amp / 2}, {-1, amp / 2}}, 1.0);
}

// Kolmogorov-Smirnov statistic of a sample against U[0,1).
double ks_uniform(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - v[i]);
    d = std::max(d, v[i] - static_cast<double>(i) / n);
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

void check_metric_axioms(const SystemInstance& s, std::uint64_t seed) {
  const auto pts = s.sample(3000, seed);
  for (std::size_t i = 0; i + 2 < pts.size(); i += 3) {
    const State &a = pts[i], &b = pts[i + 1], &c = pts[i + 2];
    CHECK(s.metric(a, a) == 0.0);
    CHECK(s.metric(a, b) >= 0.0);
    CHECK(s.metric(a, b) == s.metric(b, a));
    CHECK(s.metric(a, c) <= s.metric(a, b) + s.metric(b, c) + 1e-12);
  }
}

}  // namespace

TEST_CASE("metric axioms on 1000 random triples") {
  check_metric_axioms(make_rotation(parse_alpha("sqrt2-1")), 1);
  check_metric_axioms(make_skew(parse_alpha("sqrt2-1"), cosine(0.3)), 2);
  check_metric_axioms(make_group_skew(7, 3, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}), 3);
  check_metric_axioms(make_shift({0.5, 0.5}), 4);
  check_metric_axioms(make_shift({0.2, 0.3, 0.5}), 5);
}

TEST_CASE("shift metric uses the first mismatch") {
  State a, b;
  CHECK(shift_metric(a, b) == 0.0);
  b.word[3] = 1;
  CHECK(shift_metric(a, b) == 0.125);
  b.word[0] = 1;
  CHECK(shift_metric(a, b) == 1.0);
}

TEST_CASE("rotation by zero is the identity and rotations are isometries") {
  const auto id = make_rotation(parse_alpha("0/1"));
  CHECK_FALSE(id.warnings.empty());
  for (const State& s : id.sample(1000, 7)) CHECK(id.step(s) == s);

  const auto rot = make_rotation(parse_alpha("sqrt2-1"));
  CHECK(rot.warnings.empty());
  const auto pts = rot.sample(1000, 8);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const double d0 = rot.metric(pts[i], pts[i + 1]);
    const double d1 = rot.metric(rot.step(pts[i]), rot.step(pts[i + 1]));
    CHECK(d1 == doctest::Approx(d0).epsilon(1e-12));
  }
}

TEST_CASE("skew iterate matches x + n alpha, y + H_n(x)") {
  const auto alpha = parse_alpha("sqrt2-1");
  const auto h = FourierCocycle::from_terms({{1, {0.1, 0.05}}, {-1, {0.1, -0.05}}, {3, 0.02}, {-3, 0.02}}, 1.0);
  const auto s = make_skew(alpha, h);
  const long double a = std::sqrt(2.0L) - 1.0L;
  State p;
  p.x = 0.123;
  p.y = 0.456;
  const State q = s.iterate(p, 100);
  long double H = 0.0L;
  for (int i = 0; i < 100; ++i) {
    const long double xi = oracle::frac(p.x + i * a);
    H += 0.2L * std::cos(2 * kPi * xi) - 0.1L * std::sin(2 * kPi * xi) + 0.04L * std::cos(6 * kPi * xi);
  }
  CHECK(oracle::circle_dist(q.x, p.x + 100 * a) < 1e-12);
  CHECK(oracle::circle_dist(q.y, p.y + H) < 1e-12);
}

TEST_CASE("Haar sampler: uniform x-marginal and invariance") {
  const auto s = make_skew(parse_alpha("sqrt2-1"), cosine(0.3));
  const std::size_t n = 10000;
  const auto pts = s.sample(n, 11);
  std::vector<double> xs, ys;
  for (const auto& p : pts) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  // 1% critical value of the one-sample statistic.
  CHECK(ks_uniform(xs) < 1.628 / std::sqrt(static_cast<double>(n)));

  const auto other = s.sample(n, 12);
  std::vector<double> sx, sy, ox, oy;
  for (std::size_t i = 0; i < n; ++i) {
    const State t = s.step(pts[i]);
    sx.push_back(t.x);
    sy.push_back(t.y);
    ox.push_back(other[i].x);
    oy.push_back(other[i].y);
  }
  const double crit = 1.628 * std::sqrt(2.0 / static_cast<double>(n));
  CHECK(ks_two_sample(sx, ox) < crit);
  CHECK(ks_two_sample(sy, oy) < crit);
}

TEST_CASE("orbit sampler follows the orbit with burn-in and stride") {
  const auto s = make_skew(parse_alpha("sqrt2-1"), cosine(0.3), "orbit", std::array<double, 2>{0.1, 0.2});
  const auto pts = s.sample(5, 0);
  State p;
  p.x = 0.1;
  p.y = 0.2;
  p = s.iterate(p, kOrbitBurnIn);
  CHECK(pts[0] == p);
  CHECK(pts[1] == s.iterate(p, kOrbitStride));
  CHECK(pts[4] == s.iterate(p, 4 * kOrbitStride));
}

TEST_CASE("group skew over Z/qZ") {
  const auto s = make_group_skew(5, 2, {0.0, 0.1, 0.2, 0.3, 0.4});
  State p;
  p.x = 0.2;  // k = 1
  p.y = 0.95;
  const State q = s.step(p);
  CHECK(q.x == doctest::Approx(0.6));
  CHECK(q.y == doctest::Approx(0.05));
  for (const auto& t : s.sample(1000, 3)) {
    const double k = t.x * 5;
    CHECK(std::abs(k - std::round(k)) < 1e-12);
  }
}

TEST_CASE("Bernoulli marginals within 3 sigma") {
  const auto s = make_shift({0.5, 0.5});
  const std::size_t n = 10000;
  const auto pts = s.sample(n, 21);
  const double sigma = std::sqrt(n * 0.25);
  for (std::size_t j = 0; j < 64; ++j) {
    std::size_t ones = 0;
    for (const auto& p : pts) ones += p.word[j];
    CAPTURE(j);
    CHECK(std::abs(static_cast<double>(ones) - n / 2.0) < 3 * sigma);
  }
  const State t = s.step(pts[0]);
  CHECK(t.word[0] == pts[0].word[1]);
  CHECK(t.word[63] == 0);
}

TEST_CASE("make_system parses descriptors and names missing fields") {
  const auto rot = make_system(json::parse(R"({"kind":"rotation","alpha":"sqrt2-1"})"));
  CHECK(rot.kind == SystemKind::Rotation);
  const auto skew = make_system(json::parse(
      R"({"kind":"skew2","alpha":"golden","h":[[1,0.15,0],[-1,0.15,0]],"tau":1})"));
  CHECK(skew.metric_kind == MetricKind::TorusSup);
  CHECK(skew.descriptor["kind"] == "skew2");
  const auto grp = make_system(json::parse(R"({"kind":"group_skew","order":3,"a":1,"h":[0,0.5,0.25]})"));
  CHECK(grp.group_order == 3);
  const auto sh = make_system(json::parse(R"({"kind":"shift","weights":[0.25,0.75]})"));
  CHECK(sh.kind == SystemKind::Shift);

  auto message = [](const char* text) {
    try {
      make_system(json::parse(text));
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"alpha":"sqrt2-1"})").find("'kind'") != std::string::npos);
  CHECK(message(R"({"kind":"rotation"})").find("'alpha'") != std::string::npos);
  CHECK(message(R"({"kind":"skew2","alpha":"sqrt2-1"})").find("'h'") != std::string::npos);
  CHECK(message(R"({"kind":"group_skew","order":3,"h":[0,0,0]})").find("'a'") != std::string::npos);
  CHECK(message(R"({"kind":"shift","weights":[0.5,0.6]})").find("'weights'") != std::string::npos);
  CHECK(message(R"({"kind":"torus"})").find("unknown kind") != std::string::npos);
  CHECK(message(R"({"kind":"shift","weights":"x"})").find("malformed") != std::string::npos);
}

TEST_CASE("function family metric") {
  std::vector<std::function<std::complex<double>(const State&)>> g;
  std::vector<double> norms;
  for (int l = 1; l <= 25; ++l) {
    g.push_back([l](const State& s) { return std::complex<double>(std::cos(2 * kPi * l * s.x), 0.0); });
    norms.push_back(1.0);
  }
  const auto d = function_family_metric(g, norms, 20);
  CHECK(d.L() == 20);
  CHECK(d.truncation_slack() == std::ldexp(1.0, -20));
  State a, b;
  b.x = 0.5;
  // |cos(pi l) - 1| = 2 for odd l, 0 for even l.
  double direct = 0.0;
  for (int l = 1; l <= 20; l += 2) direct += 2.0 / (std::ldexp(1.0, l) * 3.0);
  CHECK(d(a, b) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(d(a, a) == 0.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    State x, y, z;
    x.x = u(rng);
    y.x = u(rng);
    z.x = u(rng);
    CHECK(d(x, y) <= 1.0);
    CHECK(d(x, y) == d(y, x));
    CHECK(d(x, z) <= d(x, y) + d(y, z) + 1e-12);
  }
  CHECK_THROWS_AS(function_family_metric(g, norms, 0), DomainError);
  CHECK_THROWS_AS(function_family_metric(g, norms, 30), DomainError);
  norms[0] = INFINITY;
  CHECK_THROWS_AS(function_family_metric(g, norms, 5), DomainError);
}

TEST_CASE("conjugate_system") {
  const auto alpha = parse_alpha("sqrt2-1");
  const long double a = std::sqrt(2.0L) - 1.0L;

  SUBCASE("identity conjugacy leaves the step unchanged") {
    const auto s = make_skew(alpha, cosine(0.3));
    const auto c = conjugate_system(s, [](const State& p) { return p; },
                                    [](const State& p) { return p; }, torus_sup_metric);
    CHECK(c.descriptor["conjugated"] == true);
    CHECK(c.sampler_tag == "pushforward");
    for (const auto& p : s.sample(1000, 5)) CHECK(c.step(p) == s.step(p));
  }

  SUBCASE("coboundary skew product becomes a rotation") {
    // phi = 0.2 cos(2 pi g), h(g) = phi(g + alpha) - phi(g).
    const std::complex<double> ea(std::cos(2 * kPi * static_cast<double>(a)),
                                  std::sin(2 * kPi * static_cast<double>(a)));
    const auto c1 = 0.1 * (ea - 1.0);
    const auto h = FourierCocycle::from_terms({{1, c1}, {-1, std::conj(c1)}}, 1.0);
    const auto s = make_skew(alpha, h);
    auto phi = [](double g) { return 0.2 * std::cos(2 * kPi * g); };
    StepFn pi = [phi](const State& p) {
      State q = p;
      q.y = static_cast<double>(wrap01(p.y - phi(p.x)));
      return q;
    };
    StepFn pi_inv = [phi](const State& p) {
      State q = p;
      q.y = static_cast<double>(wrap01(p.y + phi(p.x)));
      return q;
    };
    const auto c = conjugate_system(s, pi, pi_inv, torus_sup_metric);
    for (const auto& p : c.sample(1000, 6)) {
      const State q = c.step(p);
      CHECK(oracle::circle_dist(q.x, p.x + a) < 1e-9);
      CHECK(oracle::circle_dist(q.y, p.y) < 1e-9);
    }
  }

  SUBCASE("xi-to-one projection intertwines T and T_xi") {
    const auto h = FourierCocycle::from_terms({{1, {0.1, 0.05}}, {-1, {0.1, -0.05}}}, 1.0);
    const auto h2 = FourierCocycle::from_terms({{1, {0.2, 0.1}}, {-1, {0.2, -0.1}}}, 1.0);
    const auto T = make_skew(alpha, h);
    const auto T2 = make_skew(alpha, h2);
    auto proj = [](const State& p) {
      State q = p;
      q.y = static_cast<double>(wrap01(2.0L * p.y));
      return q;
    };
    for (const auto& p : T.sample(1000, 9)) {
      const State lhs = proj(T.step(p));
      const State rhs = T2.step(proj(p));
      CHECK(torus_sup_metric(lhs, rhs) < 1e-9);
    }
  }

  SUBCASE("non-inverse maps are rejected") {
    const auto s = make_skew(alpha, cosine(0.3));
    StepFn shift = [](const State& p) {
      State q = p;
      q.y = static_cast<double>(wrap01(p.y + 0.1L));
      return q;
    };
    CHECK_THROWS_AS(conjugate_system(s, shift, shift, torus_sup_metric), ConjugacyError);
  }
}
