#include "moeb/mrt.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "moeb/errors.hpp"

namespace moeb {

namespace {

// Relative slack for comparisons in log scale.
constexpr double kLogTol = 1e-12;

bool log_le(double a, double b) { return a <= b + kLogTol * std::max(1.0, std::abs(b)); }

}  // namespace

double MrtLadder::log_ceiling() const { return std::sqrt(std::log(static_cast<double>(N0))); }

bool MrtLadder::level_contains(int j, std::uint64_t p) const {
  if (j == 1) return static_cast<double>(p) >= P1 && static_cast<double>(p) <= Q1;
  const auto& lv = levels[static_cast<std::size_t>(j - 1)];
  const double lp = std::log(static_cast<double>(p));
  return lp >= lv.log_p * (1.0 - kLogTol) && lp <= lv.log_q * (1.0 + kLogTol);
}

MrtLadder build_ladder(double P1, double Q1, std::uint64_t N0, std::uint64_t N) {
  auto fail = [](const std::string& what) {
    throw ParameterError("build_ladder: violated " + what);
  };
  if (!(P1 > 10.0)) fail("10 < P1");
  if (!(P1 < Q1)) fail("P1 < Q1");
  if (!(Q1 <= static_cast<double>(N))) fail("Q1 <= N");
  if (!(static_cast<double>(N0) * static_cast<double>(N0) >= static_cast<double>(N)))
    fail("sqrt(N) <= N0");
  if (!(N0 <= N)) fail("N0 <= N");

  MrtLadder ladder;
  ladder.P1 = P1;
  ladder.Q1 = Q1;
  ladder.N0 = N0;
  ladder.N = N;
  const double ceiling = ladder.log_ceiling();
  const double lq1 = std::log(Q1);
  const double lp1 = std::log(P1);
  if (!log_le(lq1, ceiling)) fail("Q1 <= exp(sqrt(log N0))");

  ladder.levels.push_back({lp1, lq1});
  const double llq1 = std::log(lq1);
  const double llp1 = std::log(lp1);
  for (int j = 2; j <= MrtLadder::kMaxLevels; ++j) {
    const double lj = std::log(static_cast<double>(j));
    // log log Q_j = (4j+2) log j + j log log Q1; decide in log-log scale.
    const double llq = (4.0 * j + 2.0) * lj + j * llq1;
    if (llq > std::log(ceiling) + kLogTol) break;
    const double llp = 4.0 * j * lj + (j - 1) * llq1 + llp1;
    ladder.levels.push_back({std::exp(llp), std::exp(llq)});
  }
  return ladder;
}

bool in_typical_set(std::uint64_t n, const MrtLadder& ladder, const MobiusTable& table) {
  if (n == 0 || n > ladder.N) {
    throw DomainError("in_typical_set: n = " + std::to_string(n) + " outside [1, " +
                      std::to_string(ladder.N) + "]");
  }
  const double top = std::exp(ladder.levels.back().log_q);
  if (static_cast<double>(table.limit()) < std::min(top, static_cast<double>(ladder.N))) {
    throw SizingError("in_typical_set: prime list does not cover Q_J");
  }
  for (int j = 1; j <= ladder.J(); ++j) {
    bool hit = false;
    for (std::uint32_t p : table.primes()) {
      if (static_cast<double>(p) > top || p > n) break;
      if (n % p == 0 && ladder.level_contains(j, p)) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

std::vector<std::uint8_t> typical_set_mask(const MrtLadder& ladder, const MobiusTable& table) {
  const std::uint64_t N = ladder.N;
  if (table.limit() < N) throw SizingError("typical_set_mask: sieve limit below ladder N");
  // Bit j-1 of hits[n] records a prime factor in level j.
  std::vector<std::uint64_t> hits(N + 1, 0);
  const double top = std::exp(ladder.levels.back().log_q);
  for (std::uint32_t p : table.primes()) {
    if (static_cast<double>(p) > top || p > N) break;
    for (int j = 1; j <= ladder.J(); ++j) {
      if (!ladder.level_contains(j, p)) continue;
      const std::uint64_t bit = std::uint64_t{1} << (j - 1);
      for (std::uint64_t m = p; m <= N; m += p) hits[m] |= bit;
    }
  }
  const std::uint64_t all =
      ladder.J() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << ladder.J()) - 1;
  std::vector<std::uint8_t> mask(N + 1, 0);
  for (std::uint64_t n = 1; n <= N; ++n) mask[n] = (hits[n] & all) == all;
  return mask;
}

TypicalSetStats complement_density(const MrtLadder& ladder, const MobiusTable& table) {
  const auto mask = typical_set_mask(ladder, table);
  TypicalSetStats stats;
  stats.N = ladder.N;
  for (std::uint64_t n = 1; n <= ladder.N; ++n) stats.member_count += mask[n];
  stats.complement_count = ladder.N - stats.member_count;
  stats.complement_ratio =
      static_cast<double>(stats.complement_count) / static_cast<double>(ladder.N);
  stats.density_bound = std::log(ladder.P1) / std::log(ladder.Q1);
  return stats;
}

double bilinear_mobius_average(const MobiusTable& table,
                               const std::vector<std::uint8_t>& member_mask, std::uint64_t N,
                               std::uint64_t L) {
  if (L == 0) throw DomainError("bilinear_mobius_average: L must be >= 1");
  if (N == 0) throw DomainError("bilinear_mobius_average: N must be >= 1");
  if (N + L - 1 > table.limit()) {
    throw SizingError("bilinear_mobius_average: N + L - 1 = " + std::to_string(N + L - 1) +
                      " exceeds sieve limit " + std::to_string(table.limit()));
  }
  if (member_mask.size() < N + 1) throw SizingError("bilinear_mobius_average: mask too short");
  std::vector<std::uint32_t> members;
  for (std::uint64_t n = 1; n <= N; ++n)
    if (member_mask[n]) members.push_back(static_cast<std::uint32_t>(n));

  const auto mu = table.values();
  // The inner sum is symmetric in (l1, l2): diagonal once, off-diagonal twice.
  std::int64_t total = 0;
  for (std::uint64_t l1 = 0; l1 < L; ++l1) {
    for (std::uint64_t l2 = l1; l2 < L; ++l2) {
      std::int64_t inner = 0;
      for (std::uint32_t n : members) inner += mu[n + l1] * mu[n + l2];
      total += (l1 == l2 ? 1 : 2) * std::llabs(inner);
    }
  }
  return static_cast<double>(total) /
         (static_cast<double>(N) * static_cast<double>(L) * static_cast<double>(L));
}

double bilinear_mobius_average(const MobiusTable& table, const MrtLadder* ladder,
                               std::uint64_t N, std::uint64_t L) {
  if (ladder == nullptr) {
    std::vector<std::uint8_t> all(N + 1, 1);
    all[0] = 0;
    return bilinear_mobius_average(table, all, N, L);
  }
  if (N > ladder->N) throw DomainError("bilinear_mobius_average: N exceeds ladder N");
  auto mask = typical_set_mask(*ladder, table);
  return bilinear_mobius_average(table, mask, N, L);
}

double chowla_pair_average(const MobiusTable& table, std::uint64_t N, std::uint64_t h1,
                           std::uint64_t h2) {
  if (N == 0) throw DomainError("chowla_pair_average: N must be >= 1");
  const std::uint64_t top = N + std::max(h1, h2);
  if (top > table.limit()) {
    throw SizingError("chowla_pair_average: N + h = " + std::to_string(top) +
                      " exceeds sieve limit " + std::to_string(table.limit()));
  }
  const auto mu = table.values();
  std::int64_t sum = 0;
  for (std::uint64_t n = 1; n <= N; ++n) sum += mu[n + h1] * mu[n + h2];
  return static_cast<double>(sum) / static_cast<double>(N);
}

}  // namespace moeb
