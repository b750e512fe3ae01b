#include "moeb/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace moeb {

Interval::Interval(mpfr_prec_t prec) : prec_(prec) {
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval& other) : prec_(other.prec_) {
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& other) noexcept : prec_(other.prec_) {
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

Interval& Interval::operator=(const Interval& other) {
  if (this != &other) {
    prec_ = other.prec_;
    mpfr_set_prec(lo_, prec_);
    mpfr_set_prec(hi_, prec_);
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
  }
  return *this;
}

Interval& Interval::operator=(Interval&& other) noexcept {
  std::swap(prec_, other.prec_);
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::exact(const mpz_class& z, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_z(r.lo_, z.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(r.hi_, z.get_mpz_t(), MPFR_RNDU);
  return r;
}

Interval Interval::exact(const mpq_class& q, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::hull(const mpq_class& a, const mpq_class& b, mpfr_prec_t prec) {
  const mpq_class& lo = (a < b) ? a : b;
  const mpq_class& hi = (a < b) ? b : a;
  Interval r(prec);
  mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::operator+(const Interval& o) const {
  Interval r(std::max(prec_, o.prec_));
  mpfr_add(r.lo_, lo_, o.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, hi_, o.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::operator-(const Interval& o) const {
  Interval r(std::max(prec_, o.prec_));
  mpfr_sub(r.lo_, lo_, o.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, hi_, o.lo_, MPFR_RNDU);
  return r;
}

Interval Interval::operator-() const {
  Interval r(prec_);
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Interval Interval::operator*(const Interval& o) const {
  const mpfr_prec_t p = std::max(prec_, o.prec_);
  Interval r(p);
  mpfr_t t;
  mpfr_init2(t, p);
  const __mpfr_struct* a[2] = {lo_, hi_};
  const __mpfr_struct* b[2] = {o.lo_, o.hi_};
  bool first = true;
  for (auto* x : a) {
    for (auto* y : b) {
      mpfr_mul(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return r;
}

Interval Interval::operator/(const Interval& o) const {
  if (o.contains_zero()) {
    Interval r(std::max(prec_, o.prec_));
    mpfr_set_inf(r.lo_, -1);
    mpfr_set_inf(r.hi_, 1);
    return r;
  }
  const mpfr_prec_t p = std::max(prec_, o.prec_);
  Interval inv(p);
  mpfr_ui_div(inv.lo_, 1, o.hi_, MPFR_RNDD);
  mpfr_ui_div(inv.hi_, 1, o.lo_, MPFR_RNDU);
  return *this * inv;
}

Interval Interval::scaled(const mpz_class& k) const {
  Interval r(prec_);
  if (sgn(k) >= 0) {
    mpfr_mul_z(r.lo_, lo_, k.get_mpz_t(), MPFR_RNDD);
    mpfr_mul_z(r.hi_, hi_, k.get_mpz_t(), MPFR_RNDU);
  } else {
    mpfr_mul_z(r.lo_, hi_, k.get_mpz_t(), MPFR_RNDD);
    mpfr_mul_z(r.hi_, lo_, k.get_mpz_t(), MPFR_RNDU);
  }
  return r;
}

Interval Interval::sqrt() const {
  Interval r(prec_);
  if (mpfr_sgn(lo_) < 0) {
    mpfr_set_zero(r.lo_, 1);
  } else {
    mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
  }
  mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::abs() const {
  if (mpfr_sgn(lo_) >= 0) return *this;
  if (mpfr_sgn(hi_) <= 0) return -*this;
  Interval r(prec_);
  mpfr_set_zero(r.lo_, 1);
  if (mpfr_cmpabs(lo_, hi_) > 0) {
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  } else {
    mpfr_set(r.hi_, hi_, MPFR_RNDU);
  }
  return r;
}

Interval Interval::centered_frac() const {
  mpfr_t m;
  mpfr_init2(m, prec_ + 2);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  mpfr_round(m, m);
  mpz_class n;
  mpfr_get_z(n.get_mpz_t(), m, MPFR_RNDN);
  mpfr_clear(m);
  return *this - exact(n, prec_);
}

Interval Interval::dist_to_int() const { return centered_frac().abs(); }

double Interval::lower() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Interval::upper() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double Interval::mid() const {
  mpfr_t m;
  mpfr_init2(m, prec_ + 2);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  const double d = mpfr_get_d(m, MPFR_RNDN);
  mpfr_clear(m);
  return d;
}

long double Interval::mid_ld() const {
  mpfr_t m;
  mpfr_init2(m, prec_ + 2);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  const long double d = mpfr_get_ld(m, MPFR_RNDN);
  mpfr_clear(m);
  return d;
}

double Interval::width() const {
  mpfr_t w;
  mpfr_init2(w, prec_);
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  const double d = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  return d;
}

double Interval::relative_width() const {
  if (mpfr_equal_p(lo_, hi_)) return 0.0;
  if (contains_zero()) return std::numeric_limits<double>::infinity();
  mpfr_t w, mag;
  mpfr_init2(w, prec_);
  mpfr_init2(mag, prec_);
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  if (mpfr_cmpabs(lo_, hi_) > 0) {
    mpfr_abs(mag, hi_, MPFR_RNDD);
  } else {
    mpfr_abs(mag, lo_, MPFR_RNDD);
  }
  mpfr_div(w, w, mag, MPFR_RNDU);
  const double d = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  mpfr_clear(mag);
  return d;
}

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

bool Interval::certainly_less(const Interval& o) const { return mpfr_less_p(hi_, o.lo_); }

bool Interval::certainly_greater(const Interval& o) const { return mpfr_greater_p(lo_, o.hi_); }

std::string Interval::to_string(int digits) const {
  char buf[2][256];
  mpfr_snprintf(buf[0], sizeof buf[0], "%.*RDg", digits, lo_);
  mpfr_snprintf(buf[1], sizeof buf[1], "%.*RUg", digits, hi_);
  return std::string("[") + buf[0] + ", " + buf[1] + "]";
}

}  // namespace moeb
