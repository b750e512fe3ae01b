#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace moeb {

// Closed interval [lo, hi] with MPFR endpoints. Every operation rounds the
// lower endpoint down and the upper endpoint up, so the exact real result
// of the corresponding operation on any members is always contained.
class Interval {
 public:
  explicit Interval(mpfr_prec_t prec = 256);
  Interval(const Interval& other);
  Interval(Interval&& other) noexcept;
  Interval& operator=(const Interval& other);
  Interval& operator=(Interval&& other) noexcept;
  ~Interval();

  static Interval exact(const mpz_class& z, mpfr_prec_t prec);
  static Interval exact(const mpq_class& q, mpfr_prec_t prec);
  // Smallest interval containing both endpoints (order-agnostic).
  static Interval hull(const mpq_class& a, const mpq_class& b, mpfr_prec_t prec);

  mpfr_prec_t precision() const { return prec_; }

  Interval operator+(const Interval& o) const;
  Interval operator-(const Interval& o) const;
  Interval operator*(const Interval& o) const;
  Interval operator/(const Interval& o) const;
  Interval operator-() const;
  Interval scaled(const mpz_class& k) const;
  Interval sqrt() const;
  Interval abs() const;

  // x - n where n is the integer nearest to the midpoint, so the result sits
  // near (-1/2, 1/2].
  Interval centered_frac() const;
  // ||x||, the distance to the nearest integer.
  Interval dist_to_int() const;

  double lower() const;  // rounded down
  double upper() const;  // rounded up
  double mid() const;
  long double mid_ld() const;
  // Width in units of the larger endpoint magnitude; +inf if the interval
  // contains zero and has positive width.
  double relative_width() const;
  double width() const;
  bool contains_zero() const;

  bool certainly_less(const Interval& o) const;     // hi < o.lo
  bool certainly_greater(const Interval& o) const;  // lo > o.hi

  std::string to_string(int digits = 20) const;

  const __mpfr_struct* lo() const { return lo_; }
  const __mpfr_struct* hi() const { return hi_; }

 private:
  mpfr_prec_t prec_;
  mpfr_t lo_;
  mpfr_t hi_;
};

// Default and maximum working precision for certified comparisons.
inline constexpr mpfr_prec_t kDefaultPrecision = 256;
inline constexpr mpfr_prec_t kMaxPrecision = 4096;

}  // namespace moeb
