#include <cmath>

#include "doctest.h"
#include "moeb/errors.hpp"
#include "moeb/mrt.hpp"
#include "oracles.hpp"

using namespace moeb;

namespace {

bool brute_member(std::uint64_t n, const MrtLadder& ladder) {
  const auto f = oracle::prime_factors(n);
  for (int j = 1; j <= ladder.J(); ++j) {
    bool hit = false;
    for (auto p : f) {
      const double lp = std::log(static_cast<double>(p));
      if (j == 1) hit = hit || (p >= ladder.P1 && p <= ladder.Q1);
      else hit = hit || (lp >= ladder.levels[j - 1].log_p && lp <= ladder.levels[j - 1].log_q);
    }
    if (!hit) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("ladder construction") {
  const auto l = build_ladder(11, 17, 1000000, 1000000);
  CHECK(l.J() >= 1);
  CHECK(l.levels[0].log_q == doctest::Approx(std::log(17.0)));
  for (const auto& lv : l.levels) CHECK(lv.log_q <= l.log_ceiling() * (1 + 1e-12));
  CHECK(l.J() <= MrtLadder::kMaxLevels);
}

TEST_CASE("ladder parameter errors name the inequality") {
  auto msg = [](auto fn) {
    try {
      fn();
    } catch (const ParameterError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(msg([] { build_ladder(10, 17, 1000, 1000); }).find("10 < P1") != std::string::npos);
  CHECK(msg([] { build_ladder(20, 17, 1000, 1000); }).find("P1 < Q1") != std::string::npos);
  CHECK(msg([] { build_ladder(11, 17, 10, 1000); }).find("sqrt(N) <= N0") != std::string::npos);
  CHECK(msg([] { build_ladder(11, 17, 2000, 1000); }).find("N0 <= N") != std::string::npos);
  CHECK(msg([] { build_ladder(11, 1e6, 1e6, 1e6); }).find("exp(sqrt(log N0))") !=
        std::string::npos);
}

TEST_CASE("membership and complement against brute force") {
  const MobiusTable t(10100);
  const auto l = build_ladder(11, 17, 10000, 10000);
  const auto mask = typical_set_mask(l, t);
  std::uint64_t members = 0;
  for (std::uint64_t n = 1; n <= 10000; ++n) {
    const bool b = brute_member(n, l);
    REQUIRE(static_cast<bool>(mask[n]) == b);
    CHECK(in_typical_set(n, l, t) == b);
    members += b;
  }
  const auto stats = complement_density(l, t);
  CHECK(stats.member_count == members);
  CHECK(stats.complement_count == 10000 - members);
  CHECK(stats.complement_count == 7897);
  CHECK(stats.density_bound == doctest::Approx(std::log(11.0) / std::log(17.0)));
  CHECK_THROWS_AS(in_typical_set(0, l, t), DomainError);
  CHECK_THROWS_AS(in_typical_set(10001, l, t), DomainError);
}

TEST_CASE("bilinear average reductions") {
  const MobiusTable t(10100);
  const auto l = build_ladder(11, 17, 10000, 10000);
  const auto mask = typical_set_mask(l, t);
  std::uint64_t sqfree_in_s = 0;
  for (std::uint64_t n = 1; n <= 10000; ++n) sqfree_in_s += mask[n] && t.mu(n) != 0;
  CHECK(bilinear_mobius_average(t, &l, 10000, 1) == doctest::Approx(sqfree_in_s / 10000.0));

  // Full set, L = 1: squarefree density.
  std::uint64_t sqfree = 0;
  for (std::uint64_t n = 1; n <= 10000; ++n) sqfree += t.mu(n) != 0;
  CHECK(bilinear_mobius_average(t, nullptr, 10000, 1) == doctest::Approx(sqfree / 10000.0));

  // Brute force over all (l1, l2) for small L.
  const std::uint64_t L = 4;
  double total = 0;
  for (std::uint64_t a = 0; a < L; ++a)
    for (std::uint64_t b = 0; b < L; ++b) {
      long s = 0;
      for (std::uint64_t n = 1; n <= 10000; ++n)
        if (mask[n]) s += oracle::mu_trial(n + a) * oracle::mu_trial(n + b);
      total += std::abs(s);
    }
  CHECK(bilinear_mobius_average(t, mask, 10000, L) == doctest::Approx(total / (10000.0 * L * L)));
  CHECK_THROWS_AS(bilinear_mobius_average(t, nullptr, 10000, 200), SizingError);
  CHECK_THROWS_AS(bilinear_mobius_average(t, nullptr, 10000, 0), DomainError);
}

TEST_CASE("chowla pair average") {
  const MobiusTable t(1001);
  long s = 0;
  for (std::uint64_t n = 1; n <= 1000; ++n) s += oracle::mu_trial(n) * oracle::mu_trial(n + 1);
  CHECK(chowla_pair_average(t, 1000, 0, 1) == doctest::Approx(s / 1000.0));
  CHECK_THROWS_AS(chowla_pair_average(t, 1000, 0, 2), SizingError);
}
