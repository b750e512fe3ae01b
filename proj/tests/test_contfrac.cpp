#include <cmath>
#include <string>

#include "doctest.h"
#include "moeb/contfrac.hpp"
#include "moeb/errors.hpp"

using namespace moeb;

namespace {

// Partial quotients of x in (0, 1) from long double arithmetic; reliable
// for the first handful of terms only.
std::vector<long> naive_quotients(long double x, int count) {
  std::vector<long> out;
  for (int i = 0; i < count; ++i) {
    x = 1.0L / x;
    const long a = static_cast<long>(std::floor(x));
    out.push_back(a);
    x -= a;
  }
  return out;
}

void check_invariants(const ContinuedFraction& cf) {
  for (std::size_t k = 1; k + 1 < cf.q.size(); ++k) {
    CAPTURE(k);
    CHECK(cf.q[k + 1] == cf.a[k] * cf.q[k] + cf.q[k - 1]);
    CHECK(cf.p[k + 1] == cf.a[k] * cf.p[k] + cf.p[k - 1]);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), cf.p[k].get_mpz_t(), cf.q[k].get_mpz_t());
    CHECK(g == 1);
    const mpz_class det = cf.p[k + 1] * cf.q[k] - cf.p[k] * cf.q[k + 1];
    CHECK(abs(det) == 1);
    if (k + 2 < cf.q.size()) {
      const mpz_class det2 = cf.p[k + 2] * cf.q[k + 1] - cf.p[k + 1] * cf.q[k + 2];
      CHECK(det2 == -det);
    }
  }
}

}  // namespace

TEST_CASE("parse forms") {
  CHECK(parse_alpha("2/7").is_rational());
  CHECK(parse_alpha("4/14").rational_value() == mpq_class(2, 7));
  CHECK(parse_alpha("sqrt2-1").to_double() == doctest::Approx(std::sqrt(2.0) - 1));
  CHECK(parse_alpha("golden").to_double() == doctest::Approx((std::sqrt(5.0) - 1) / 2));
  CHECK(parse_alpha("(sqrt5-1)/2").to_double() == doctest::Approx((std::sqrt(5.0) - 1) / 2));
  CHECK(parse_alpha("sqrt7-2").to_double() == doctest::Approx(std::sqrt(7.0) - 2));
  CHECK(parse_alpha("quad:2,-1,2,1").to_double() == doctest::Approx(2 - std::sqrt(2.0)));
  const auto fx = parse_alpha("quotients:2,17;tail=3");
  CHECK(fx.is_point());
  CHECK(fx.tail_power() == 3u);
  CHECK_FALSE(parse_alpha("quotients:2,2,2").is_point());
  CHECK_THROWS_AS(parse_alpha("7/2"), DomainError);
  CHECK_THROWS_AS(parse_alpha("banana"), DomainError);
  CHECK_THROWS_AS(parse_alpha("quad:1,1,4,3"), DomainError);
  try {
    parse_alpha("0.41421356");
    FAIL("decimal accepted");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("quotients") != std::string::npos);
  }
}

TEST_CASE("known expansions") {
  const auto s2 = expand(parse_alpha("sqrt2-1"), 40);
  REQUIRE(s2.depth() == 40);
  for (std::size_t k = 1; k <= 40; ++k) CHECK(s2.a[k] == 2);
  check_invariants(s2);
  // Pell: convergents of sqrt2 - 1 satisfy (p + q)^2 - 2 q^2 = +-1.
  for (std::size_t k = 1; k < s2.q.size(); ++k) {
    const mpz_class P = s2.p[k] + s2.q[k];
    CHECK(abs(P * P - 2 * s2.q[k] * s2.q[k]) == 1);
  }

  const auto g = expand(parse_alpha("golden"), 40);
  for (std::size_t k = 1; k <= 40; ++k) CHECK(g.a[k] == 1);
  check_invariants(g);
  // Fibonacci denominators.
  for (std::size_t k = 2; k + 1 < g.q.size(); ++k) CHECK(g.q[k + 1] == g.q[k] + g.q[k - 1]);

  const auto r = expand(parse_alpha("2/7"), 40);
  CHECK(r.terminated);
  REQUIRE(r.depth() == 2);
  CHECK(r.a[1] == 3);
  CHECK(r.a[2] == 2);
  CHECK(r.p.back() == 2);
  CHECK(r.q.back() == 7);
  check_invariants(r);

  CHECK_THROWS_AS(expand(parse_alpha("2/7"), 0), DomainError);
}

TEST_CASE("quadratic expansions match floating point prefix") {
  for (const std::string s : {"sqrt7-2", "quad:2,-1,2,1", "(sqrt13-3)/2", "sqrt19-4", "quad:1,1,3,3"}) {
    CAPTURE(s);
    const auto alpha = parse_alpha(s);
    const auto cf = expand(alpha, 30);
    const auto naive = naive_quotients(static_cast<long double>(alpha.to_double()), 6);
    for (int i = 0; i < 6; ++i) CHECK(cf.a[i + 1] == naive[i]);
    check_invariants(cf);
    // Convergents approach alpha: |alpha - p_k/q_k| < 1/q_k^2.
    const Interval a = alpha.interval(512);
    for (std::size_t k = 2; k < cf.q.size(); ++k) {
      const Interval diff = (a - Interval::exact(mpq_class(cf.p[k], cf.q[k]), 512)).abs();
      const Interval bound = Interval::exact(mpq_class(1, cf.q[k] * cf.q[k]), 512);
      CHECK(diff.certainly_less(bound));
    }
  }
}

TEST_CASE("quotient rule expansion") {
  const auto cf = expand(parse_alpha("quotients:2,17;tail=3"), 6);
  CHECK(cf.q[2] == 2);
  CHECK(cf.q[3] == 35);
  CHECK(cf.q[4] == 1500627);
  CHECK(cf.a[3] == 42875);
  check_invariants(cf);
  const Interval a = cf.alpha.interval(1024);
  CHECK(a.relative_width() < 1e-250);
  // The enclosure contains every convergent's limit bracket.
  for (std::size_t k = 2; k + 1 < cf.q.size(); ++k) {
    const Interval lo = Interval::hull(mpq_class(cf.p[k], cf.q[k]),
                                       mpq_class(cf.p[k + 1], cf.q[k + 1]), 1024);
    CHECK_FALSE(a.certainly_less(lo));
    CHECK_FALSE(a.certainly_greater(lo));
  }
}

TEST_CASE("bare prefix brackets every continuation") {
  const auto prefix = parse_alpha("quotients:2,2,2,2,2");
  const Interval box = prefix.interval(256);
  const Interval s2 = parse_alpha("sqrt2-1").interval(256);
  CHECK_FALSE(s2.certainly_less(box));
  CHECK_FALSE(s2.certainly_greater(box));
  const auto cf = expand(prefix, 40);
  CHECK(cf.depth() == 5);
  CHECK(best_approx_check(cf).size() == 4);
}

TEST_CASE("best approximation bounds") {
  for (const std::string s : {"sqrt2-1", "golden"}) {
    CAPTURE(s);
    const auto rows = best_approx_check(expand(parse_alpha(s), 40));
    REQUIRE(rows.size() == 40);
    for (const auto& r : rows) {
      if (r.k >= 2) CHECK(r.status == ApproxStatus::Certified);
      CHECK(r.norm > 0.0);
    }
  }
  // Golden ratio, k = 1: q_1 = q_2 = 1 and ||alpha|| = 0.38 < 1/(q_2 + q_1).
  const auto g = best_approx_check(expand(parse_alpha("golden"), 5));
  CHECK(g[0].status == ApproxStatus::Flagged);

  const auto r = best_approx_check(expand(parse_alpha("2/7"), 40));
  REQUIRE(r.size() == 1);
  CHECK(r[0].k == 1);
  CHECK(r[0].norm == doctest::Approx(2.0 / 7.0));
}

TEST_CASE("resonance sets") {
  const auto s2 = resonance_sets(expand(parse_alpha("sqrt2-1"), 40), 1.0);
  CHECK(s2.E.empty());
  CHECK(s2.M.empty());
  CHECK(s2.m_finite_within_depth);

  const auto g = resonance_sets(expand(parse_alpha("golden"), 40), 1.0);
  REQUIRE(g.E.size() == 1);
  CHECK(g.E[0] == 2);
  CHECK(g.M == std::vector<std::int64_t>{-1, 1});

  const auto fx = resonance_sets(expand(parse_alpha("quotients:2,17;tail=3"), 6), 1.0, 200);
  CHECK(fx.E == std::vector<std::size_t>{2, 3, 4, 5, 6});
  CHECK_FALSE(fx.m_finite_within_depth);
  for (std::int64_t m = 2; m <= 34; m += 2) {
    CHECK(fx.in_M(m));
    CHECK(fx.in_M(-m));
  }
  CHECK_FALSE(fx.in_M(36));
  for (std::int64_t m = 35; m <= 200; m += 35) CHECK(fx.in_M(m));
  CHECK_FALSE(fx.in_M(1));
  CHECK_FALSE(fx.in_M(3));

  CHECK_THROWS_AS(resonance_sets(expand(parse_alpha("golden"), 5), 0.0), DomainError);
  CHECK_THROWS_AS(resonance_sets(expand(parse_alpha("golden"), 5), 1.0, 0), DomainError);
}

TEST_CASE("certified fractional parts") {
  const auto a = parse_alpha("sqrt2-1");
  const long double s2 = std::sqrt(2.0L) - 1.0L;
  for (long k : {1L, 2L, 5L, 12L, 29L, 1000L, 123456L}) {
    const long double x = s2 * k;
    const long double ref = x - std::nearbyint(x);
    CHECK(static_cast<double>(centered_frac(a, k).value) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-9));
  }
  // Large multiplier: ||q_k alpha|| is about 1/(2 q_{k+1}) and must keep its sign.
  const auto cf = expand(a, 60);
  const auto fr = centered_frac(a, cf.q[50]);
  CHECK(std::abs(fr.value) > 0.0L);
  CHECK(std::abs(fr.value) < 1.0L / cf.q[50].get_d());

  const auto r = parse_alpha("2/7");
  CHECK(centered_frac(r, 7).exact_zero);
  CHECK(static_cast<double>(centered_frac(r, 3).value) == doctest::Approx(-1.0 / 7.0));

  const auto bare = parse_alpha("quotients:2,2,2");
  mpz_class big;
  mpz_ui_pow_ui(big.get_mpz_t(), 10, 30);
  CHECK_THROWS_AS(centered_frac(bare, big), PrecisionError);
}

TEST_CASE("convergent membership") {
  const auto cf = expand(parse_alpha("golden"), 10);
  CHECK(is_convergent(cf, 3, 5));
  CHECK(is_convergent(cf, 6, 10));
  CHECK_FALSE(is_convergent(cf, 2, 5));
}
