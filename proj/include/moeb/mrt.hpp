#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "moeb/numtheory.hpp"

namespace moeb {

/// One ladder rung [P_j, Q_j], stored as natural logarithms.
struct LadderLevel {
  double log_p = 0.0;
  double log_q = 0.0;
};

/// Typical-factorization ladder.
///
/// Level 1 is [P1, Q1]. For j > 1,
///   log P_j = j^{4j} (log Q1)^{j-1} log P1,
///   log Q_j = j^{4j+2} (log Q1)^j,
/// and J is the largest index with Q_J <= exp(sqrt(log N0)), capped at
/// kMaxLevels. Everything is kept in log scale since P_2 already overflows
/// a double for realistic Q1.
struct MrtLadder {
  static constexpr int kMaxLevels = 64;

  double P1 = 0.0;
  double Q1 = 0.0;
  std::uint64_t N0 = 0;
  std::uint64_t N = 0;
  std::vector<LadderLevel> levels;

  int J() const { return static_cast<int>(levels.size()); }
  /// sqrt(log N0), the log of the ceiling every Q_j must respect.
  double log_ceiling() const;
  /// True if the prime p lies in [P_j, Q_j] (1-based j).
  bool level_contains(int j, std::uint64_t p) const;
};

/// Throws ParameterError naming the first violated inequality among
/// 10 < P1 < Q1 <= N, sqrt(N) <= N0 <= N and Q1 <= exp(sqrt(log N0)).
MrtLadder build_ladder(double P1, double Q1, std::uint64_t N0, std::uint64_t N);

/// n has a prime factor in every level. Throws DomainError if n is 0 or
/// exceeds ladder.N, SizingError if the prime list stops below Q_J.
bool in_typical_set(std::uint64_t n, const MrtLadder& ladder, const MobiusTable& table);

/// mask[n] == 1 iff n in S, for 0 <= n <= ladder.N (mask[0] == 0).
std::vector<std::uint8_t> typical_set_mask(const MrtLadder& ladder, const MobiusTable& table);

struct TypicalSetStats {
  std::uint64_t N = 0;
  std::uint64_t member_count = 0;
  std::uint64_t complement_count = 0;
  /// complement_count / N.
  double complement_ratio = 0.0;
  /// log P1 / log Q1: the bound on the complement density with the
  /// unspecified absolute constant set to 1. Reported, never asserted.
  double density_bound = 0.0;
};

TypicalSetStats complement_density(const MrtLadder& ladder, const MobiusTable& table);

/// (1 / (N L^2)) sum_{l1,l2 < L} |sum_{n in [1,N] cap S} mu(n+l1) mu(n+l2)|.
///
/// With no ladder the set S is all of [1, N]. Needs N + L - 1 <= table
/// limit (SizingError otherwise).
double bilinear_mobius_average(const MobiusTable& table, const MrtLadder* ladder,
                               std::uint64_t N, std::uint64_t L);

/// Same as above with an explicit membership mask indexed 0..N.
double bilinear_mobius_average(const MobiusTable& table,
                               const std::vector<std::uint8_t>& member_mask, std::uint64_t N,
                               std::uint64_t L);

/// (1/N) sum_{n <= N} mu(n + h1) mu(n + h2).
double chowla_pair_average(const MobiusTable& table, std::uint64_t N, std::uint64_t h1,
                           std::uint64_t h2);

}  // namespace moeb
