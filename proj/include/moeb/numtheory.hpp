#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace moeb {

/// Exact Möbius values and the ascending prime list up to `limit`.
///
/// Immutable after construction; safe to share across threads.
class MobiusTable {
 public:
  /// Largest sieve bound accepted unless the caller raises it. One byte per
  /// entry plus four bytes per prime.
  static constexpr std::uint64_t kDefaultMaxLimit = 1'000'000'000;
  /// Segment length of the sieve.
  static constexpr std::uint64_t kSegment = std::uint64_t{1} << 20;

  /// Throws SizingError when `limit` is 0 or above `max_limit`.
  explicit MobiusTable(std::uint64_t limit, std::uint64_t max_limit = kDefaultMaxLimit);

  std::uint64_t limit() const { return limit_; }

  /// mu(n) for 1 <= n <= limit. Unchecked.
  int mu(std::uint64_t n) const { return values_[n]; }
  /// mu(n) with a range check (throws SizingError).
  int at(std::uint64_t n) const;

  /// values()[n] == mu(n); index 0 holds 0.
  std::span<const std::int8_t> values() const { return values_; }
  std::span<const std::uint32_t> primes() const { return primes_; }

 private:
  std::uint64_t limit_;
  std::vector<std::int8_t> values_;
  std::vector<std::uint32_t> primes_;
};

MobiusTable build_mobius_table(std::uint64_t limit,
                               std::uint64_t max_limit = MobiusTable::kDefaultMaxLimit);

/// Sum of mu(n) for n <= N. Throws SizingError if N > table.limit().
std::int64_t mertens(const MobiusTable& table, std::uint64_t N);

struct DirichletCharacter {
  /// values[a] = chi(a) for 0 <= a < modulus; zero off the units.
  std::vector<std::complex<double>> values;
  bool principal = false;

  std::complex<double> operator()(std::uint64_t n) const { return values[n % values.size()]; }
};

/// All phi(q) characters modulo q. The principal character is index 0.
struct CharacterTable {
  std::uint32_t modulus = 1;
  std::vector<DirichletCharacter> characters;
};

inline constexpr std::uint32_t kDefaultCharacterCap = 100;

/// Builds the characters from the cyclic decomposition of (Z/qZ)*.
/// Throws SizingError for q == 0 or q > cap.
CharacterTable dirichlet_characters(std::uint32_t q, std::uint32_t cap = kDefaultCharacterCap);

std::uint64_t euler_phi(std::uint64_t n);

using ArithmeticFunction = std::function<std::complex<double>(std::uint64_t)>;

/// Sum over primes p <= N of (1 - Re(f(p) conj(g(p)))) / p.
///
/// This is the square of the pretentious distance. Throws DomainError if
/// |f(p)| or |g(p)| exceeds 1 on a prime, SizingError if the prime list
/// does not reach N.
double pretentious_distance_sq(const ArithmeticFunction& f, const ArithmeticFunction& g,
                               std::uint64_t N, const MobiusTable& table);

struct PretentiousCandidate {
  std::uint32_t q = 1;
  std::uint32_t chi_index = 0;
  double t = 0.0;
  double distance_sq = 0.0;
};

struct NonPretentiousResult {
  double min_distance_sq = 0.0;
  PretentiousCandidate witness;
  /// Every (q, chi, t) evaluated, in (q, chi_index, grid order) order.
  std::vector<PretentiousCandidate> candidates;
};

/// min over q <= Q, chi mod q, t in t_grid of D(mu, chi(n) n^{it}; N)^2.
///
/// A grid-restricted upper bound for M(mu; N, Q). Throws DomainError for an
/// empty grid.
NonPretentiousResult mobius_non_pretentious(const MobiusTable& table, std::uint64_t N,
                                            std::uint32_t Q, std::span<const double> t_grid,
                                            std::uint32_t character_cap = kDefaultCharacterCap);

/// 201 equispaced points in [-log N, log N] plus 0.
std::vector<double> default_t_grid(std::uint64_t N);

}  // namespace moeb
