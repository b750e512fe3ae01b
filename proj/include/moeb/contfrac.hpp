#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "moeb/interval.hpp"

namespace moeb {

/// An exactly specified number alpha in (0, 1); rationals may also be 0.
///
/// Three representations are supported:
///  - rational p/q;
///  - quadratic irrational (a + b sqrt(d)) / c;
///  - partial-quotient sequence: an explicit prefix [a_1, ..., a_K], optionally
///    continued by the rule a_k = q_k^tail_power. Without a rule the prefix
///    only pins alpha down to the interval of all irrationals sharing it.
///
/// Floating-point input is never accepted.
class ExactAlpha {
 public:
  enum class Kind { Rational, Quadratic, Quotients };

  static ExactAlpha rational(const mpz_class& p, const mpz_class& q);
  static ExactAlpha quadratic(const mpz_class& a, const mpz_class& b, const mpz_class& d,
                              const mpz_class& c);
  static ExactAlpha quotients(std::vector<mpz_class> prefix,
                              std::optional<unsigned> tail_power = std::nullopt);

  Kind kind() const { return kind_; }
  bool is_rational() const { return kind_ == Kind::Rational; }
  /// False only for a bare quotient prefix, whose value is an interval.
  bool is_point() const;

  const mpq_class& rational_value() const { return rational_; }
  const std::vector<mpz_class>& prefix() const { return prefix_; }
  std::optional<unsigned> tail_power() const { return tail_power_; }

  /// Enclosure of alpha. For point values its width shrinks with prec.
  Interval interval(mpfr_prec_t prec) const;
  double to_double() const;
  std::string describe() const;

  /// First K partial quotients (fewer if a rational expansion terminates or
  /// a bare prefix runs out).
  std::vector<mpz_class> partial_quotients(std::size_t K) const;

 private:
  Kind kind_ = Kind::Rational;
  mpq_class rational_;
  mpz_class qa_, qb_, qd_, qc_;
  std::vector<mpz_class> prefix_;
  std::optional<unsigned> tail_power_;

  // Enclosures by precision, shared between copies.
  struct Cache {
    std::mutex lock;
    std::map<mpfr_prec_t, Interval> by_prec;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
  Interval compute_interval(mpfr_prec_t prec) const;
};

/// Parses "p/q", "sqrt2-1", "golden", "(sqrt5-1)/2", "sqrtD-A",
/// "(sqrtD-A)/C", "quad:a,b,d,c" or "quotients:a1,a2,...[;tail=P]".
/// Decimal input is rejected with a DomainError suggesting a quotient list.
ExactAlpha parse_alpha(const std::string& text);

/// Partial quotients a_1..a_K and convergents p_k/q_k for k = 1..K+1, where
/// p_k/q_k = [0; a_1, ..., a_{k-1}]. Index 0 of p/q holds the (1, 0)
/// sentinel so the recurrence q_{k+1} = a_k q_k + q_{k-1} starts at k = 1.
struct ContinuedFraction {
  ExactAlpha alpha;
  std::vector<mpz_class> a;  // a[0] unused
  std::vector<mpz_class> p;  // p[0] = 1, p[1] = 0, p[2] = 1, ...
  std::vector<mpz_class> q;  // q[0] = 0, q[1] = 1, q[2] = a_1, ...
  /// Rational alpha whose expansion ended before the requested depth.
  bool terminated = false;

  std::size_t depth() const { return a.size() - 1; }
  std::size_t last_convergent() const { return q.size() - 1; }
};

/// Throws DomainError for K == 0.
ContinuedFraction expand(const ExactAlpha& alpha, std::size_t K);

/// Status of one row of the best-approximation check.
enum class ApproxStatus {
  Certified,  // 1/(q_{k+1}+q_k) < ||q_k alpha|| < 1/q_{k+1} proven
  Flagged,    // provably fails strictness (small-k edge rows)
};

struct ApproxRow {
  std::size_t k = 0;
  double norm = 0.0;  // ||q_k alpha||
  double lower = 0.0;  // 1/(q_{k+1} + q_k)
  double upper = 0.0;  // 1/q_{k+1}
  ApproxStatus status = ApproxStatus::Certified;
  mpfr_prec_t precision_used = kDefaultPrecision;
};

/// Interval-certified check of the two-sided bound for every k whose
/// neighbours are known. Rational alpha stops below its last quotient, where
/// ||q_K alpha|| = 1/q_{K+1} holds with equality; a bare prefix stops at
/// K - 1. Throws PrecisionError if kMaxPrecision bits cannot decide a row.
std::vector<ApproxRow> best_approx_check(const ContinuedFraction& cf);

/// Frequencies that cannot be absorbed into a continuous coboundary.
struct ResonanceData {
  double tau = 1.0;
  /// k > 1 with q_{k+1} > q_k^{1/tau + 3}, over the computed depth.
  std::vector<std::size_t> E;
  /// Union over k in E of {+-m q_k : 1 <= m <= a_k}, cut to |m| <= bound.
  std::vector<std::int64_t> M;
  std::int64_t truncation_bound = 0;
  /// No element of E lies in the upper half of the computed depth.
  bool m_finite_within_depth = true;
  std::vector<std::string> warnings;

  bool in_M(std::int64_t m) const;
};

inline constexpr std::int64_t kDefaultFrequencyBound = 1'000'000;

/// Throws DomainError for tau <= 0 or freq_bound < 1.
ResonanceData resonance_sets(const ContinuedFraction& cf, double tau,
                             std::int64_t freq_bound = kDefaultFrequencyBound);

/// ||k alpha|| as certified sign-carrying fractional part: the value of
/// k alpha - round(k alpha), computed at increasing precision until its
/// relative width is below 2^-60.
struct CertifiedFrac {
  long double value = 0.0L;
  bool exact_zero = false;  // k alpha is an integer (rational alpha only)
  mpfr_prec_t precision_used = kDefaultPrecision;
};

/// Throws PrecisionError when the enclosure of alpha is too wide (bare
/// prefix) or kMaxPrecision is exhausted.
CertifiedFrac centered_frac(const ExactAlpha& alpha, const mpz_class& k);

/// True if p/q (in lowest terms) equals one of the convergents.
bool is_convergent(const ContinuedFraction& cf, const mpz_class& p, const mpz_class& q);

/// log of a positive big integer.
double log_mpz(const mpz_class& z);

}  // namespace moeb
