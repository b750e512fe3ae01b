#include "moeb/contfrac.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <sstream>

#include "moeb/errors.hpp"

namespace moeb {

namespace {

mpz_class parse_int(const std::string& s) {
  mpz_class z;
  if (s.empty() || z.set_str(s, 10) != 0) throw DomainError("alpha: bad integer '" + s + "'");
  return z;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// floor((P + sqrt(D)) / Q) for non-square D > 0 and Q != 0.
mpz_class floor_surd(const mpz_class& P, const mpz_class& D, const mpz_class& Q) {
  mpz_class s;
  mpz_sqrt(s.get_mpz_t(), D.get_mpz_t());
  mpz_class num;
  mpz_class den;
  if (Q > 0) {
    num = P + s;
    den = Q;
  } else {
    num = -P - s - 1;
    den = -Q;
  }
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return r;
}

// Extends a, p, q by one quotient.
void push_quotient(std::vector<mpz_class>& a, std::vector<mpz_class>& p,
                   std::vector<mpz_class>& q, const mpz_class& ak) {
  const std::size_t k = a.size();  // index of the new quotient
  a.push_back(ak);
  p.push_back(ak * p[k] + p[k - 1]);
  q.push_back(ak * q[k] + q[k - 1]);
}

void init_convergents(std::vector<mpz_class>& a, std::vector<mpz_class>& p,
                      std::vector<mpz_class>& q) {
  a.assign(1, mpz_class(0));
  p = {mpz_class(1), mpz_class(0)};
  q = {mpz_class(0), mpz_class(1)};
}

mpz_class pow_ui(const mpz_class& base, unsigned e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

}  // namespace

double log_mpz(const mpz_class& z) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(std::abs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

ExactAlpha ExactAlpha::rational(const mpz_class& p, const mpz_class& q) {
  if (q == 0) throw DomainError("alpha: zero denominator");
  ExactAlpha x;
  x.kind_ = Kind::Rational;
  x.rational_ = mpq_class(p, q);
  x.rational_.canonicalize();
  if (x.rational_ < 0 || x.rational_ >= 1) throw DomainError("rational alpha must lie in [0, 1)");
  return x;
}

ExactAlpha ExactAlpha::quadratic(const mpz_class& a, const mpz_class& b, const mpz_class& d,
                                 const mpz_class& c) {
  if (c == 0) throw DomainError("alpha: zero denominator");
  if (d <= 0) throw DomainError("alpha: radicand must be positive");
  if (mpz_perfect_square_p(d.get_mpz_t()) || b == 0) {
    throw DomainError("alpha: (a + b sqrt d)/c is rational; pass it as p/q");
  }
  ExactAlpha x;
  x.kind_ = Kind::Quadratic;
  x.qa_ = a;
  x.qb_ = b;
  x.qd_ = d;
  x.qc_ = c;
  const Interval v = x.interval(128);
  if (!(v.certainly_greater(Interval::exact(mpz_class(0), 128)) &&
        v.certainly_less(Interval::exact(mpz_class(1), 128)))) {
    throw DomainError("alpha must lie in (0, 1), got " + x.describe());
  }
  return x;
}

ExactAlpha ExactAlpha::quotients(std::vector<mpz_class> prefix,
                                 std::optional<unsigned> tail_power) {
  if (prefix.empty()) throw DomainError("alpha: empty quotient list");
  for (const auto& a : prefix) {
    if (a < 1) throw DomainError("alpha: partial quotients must be >= 1");
  }
  if (tail_power && *tail_power == 0) throw DomainError("alpha: tail power must be >= 1");
  ExactAlpha x;
  x.kind_ = Kind::Quotients;
  x.prefix_ = std::move(prefix);
  x.tail_power_ = tail_power;
  return x;
}

bool ExactAlpha::is_point() const { return kind_ != Kind::Quotients || tail_power_.has_value(); }

std::vector<mpz_class> ExactAlpha::partial_quotients(std::size_t K) const {
  std::vector<mpz_class> out;
  switch (kind_) {
    case Kind::Rational: {
      mpz_class num = rational_.get_num();
      mpz_class den = rational_.get_den();
      // alpha = num/den in [0,1); the continued fraction of den/num gives a_1, ...
      while (out.size() < K && num != 0) {
        mpz_class a, r;
        mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), den.get_mpz_t(), num.get_mpz_t());
        out.push_back(a);
        den = num;
        num = r;
      }
      break;
    }
    case Kind::Quadratic: {
      // alpha = (P + sqrt(D)) / Q with Q | D - P^2.
      mpz_class D = qb_ * qb_ * qd_;
      mpz_class P = qb_ > 0 ? qa_ : mpz_class(-qa_);
      mpz_class Q = qb_ > 0 ? qc_ : mpz_class(-qc_);
      mpz_class rem = D - P * P;
      if (!mpz_divisible_p(rem.get_mpz_t(), Q.get_mpz_t())) {
        const mpz_class absQ = abs(Q);
        P *= absQ;
        D *= Q * Q;
        Q *= absQ;
      }
      // a_0 = 0 since alpha in (0, 1); step to x_1 = 1/alpha.
      mpz_class a0 = floor_surd(P, D, Q);
      while (out.size() < K) {
        const mpz_class Pn = a0 * Q - P;
        const mpz_class Qn = (D - Pn * Pn) / Q;
        P = Pn;
        Q = Qn;
        a0 = floor_surd(P, D, Q);
        out.push_back(a0);
      }
      break;
    }
    case Kind::Quotients: {
      mpz_class q_prev = 0;
      mpz_class q_cur = 1;
      for (std::size_t k = 1; k <= K; ++k) {
        mpz_class ak;
        if (k <= prefix_.size()) {
          ak = prefix_[k - 1];
        } else if (tail_power_) {
          ak = pow_ui(q_cur, *tail_power_);
        } else {
          break;
        }
        out.push_back(ak);
        const mpz_class q_next = ak * q_cur + q_prev;
        q_prev = q_cur;
        q_cur = q_next;
      }
      break;
    }
  }
  return out;
}

Interval ExactAlpha::interval(mpfr_prec_t prec) const {
  std::lock_guard<std::mutex> guard(cache_->lock);
  auto it = cache_->by_prec.find(prec);
  if (it == cache_->by_prec.end()) it = cache_->by_prec.emplace(prec, compute_interval(prec)).first;
  return it->second;
}

Interval ExactAlpha::compute_interval(mpfr_prec_t prec) const {
  switch (kind_) {
    case Kind::Rational:
      return Interval::exact(rational_, prec);
    case Kind::Quadratic: {
      const mpfr_prec_t wp = prec + 32;
      Interval root = Interval::exact(qd_, wp).sqrt();
      Interval num = Interval::exact(qa_, wp) + root.scaled(qb_);
      Interval r = num / Interval::exact(qc_, wp);
      return r;
    }
    case Kind::Quotients: {
      std::vector<mpz_class> a, p, q;
      init_convergents(a, p, q);
      if (tail_power_) {
        // Consecutive convergents bracket alpha; stop once the gap is tiny.
        const double target = static_cast<double>(prec + 16) * std::log(2.0) / 2.0;
        for (std::size_t k = 1;; ++k) {
          const mpz_class ak = k <= prefix_.size() ? prefix_[k - 1] : pow_ui(q.back(), *tail_power_);
          push_quotient(a, p, q, ak);
          if (log_mpz(q.back()) > target && k >= 2) break;
        }
        const std::size_t n = q.size() - 1;
        return Interval::hull(mpq_class(p[n], q[n]), mpq_class(p[n - 1], q[n - 1]), prec);
      }
      for (const auto& ak : prefix_) push_quotient(a, p, q, ak);
      const std::size_t n = q.size() - 1;
      return Interval::hull(mpq_class(p[n], q[n]), mpq_class(p[n] + p[n - 1], q[n] + q[n - 1]),
                            prec);
    }
  }
  return Interval(prec);
}

double ExactAlpha::to_double() const { return interval(128).mid(); }

std::string ExactAlpha::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Rational:
      os << rational_.get_str();
      break;
    case Kind::Quadratic:
      os << "(" << qa_.get_str() << " + " << qb_.get_str() << "*sqrt(" << qd_.get_str() << "))/"
         << qc_.get_str();
      break;
    case Kind::Quotients:
      os << "[0; ";
      for (std::size_t i = 0; i < prefix_.size(); ++i) os << (i ? ", " : "") << prefix_[i].get_str();
      if (tail_power_) os << ", a_k = q_k^" << *tail_power_ << " ...";
      else os << ", ...";
      os << "]";
      break;
  }
  return os.str();
}

ExactAlpha parse_alpha(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (c != ' ') text.push_back(c);
  if (text == "sqrt2-1") return ExactAlpha::quadratic(-1, 1, 2, 1);
  if (text == "golden" || text == "(sqrt5-1)/2") return ExactAlpha::quadratic(-1, 1, 5, 2);

  std::smatch m;
  static const std::regex kRational(R"(^(\d+)/(\d+)$)");
  static const std::regex kSurd(R"(^sqrt(\d+)-(\d+)$)");
  static const std::regex kSurdOver(R"(^\(sqrt(\d+)-(\d+)\)/(\d+)$)");
  static const std::regex kDecimal(R"(^[+-]?\d*\.\d*([eE][+-]?\d+)?$|^[+-]?\d+[eE][+-]?\d+$)");
  if (std::regex_match(text, m, kRational)) return ExactAlpha::rational(parse_int(m[1]), parse_int(m[2]));
  if (std::regex_match(text, m, kSurd))
    return ExactAlpha::quadratic(-parse_int(m[2]), 1, parse_int(m[1]), 1);
  if (std::regex_match(text, m, kSurdOver))
    return ExactAlpha::quadratic(-parse_int(m[2]), 1, parse_int(m[1]), parse_int(m[3]));
  if (text.rfind("quad:", 0) == 0) {
    const auto parts = split(text.substr(5), ',');
    if (parts.size() != 4) throw DomainError("alpha: quad: expects a,b,d,c");
    return ExactAlpha::quadratic(parse_int(parts[0]), parse_int(parts[1]), parse_int(parts[2]),
                                 parse_int(parts[3]));
  }
  if (text.rfind("quotients:", 0) == 0) {
    std::string body = text.substr(10);
    std::optional<unsigned> tail;
    const auto semi = body.find(';');
    if (semi != std::string::npos) {
      const std::string opt = body.substr(semi + 1);
      body = body.substr(0, semi);
      if (opt.rfind("tail=", 0) != 0) throw DomainError("alpha: expected ';tail=P'");
      tail = static_cast<unsigned>(parse_int(opt.substr(5)).get_ui());
    }
    std::vector<mpz_class> qs;
    for (const auto& s : split(body, ',')) qs.push_back(parse_int(s));
    return ExactAlpha::quotients(std::move(qs), tail);
  }
  if (std::regex_match(text, kDecimal)) {
    throw DomainError("alpha '" + raw +
                      "' is a floating-point literal; exact input is required. Supply a "
                      "rational p/q, a quadratic surd, or a partial-quotient list "
                      "(quotients:a1,a2,...)");
  }
  throw DomainError("alpha: cannot parse '" + raw + "'");
}

ContinuedFraction expand(const ExactAlpha& alpha, std::size_t K) {
  if (K == 0) throw DomainError("expand: depth must be >= 1");
  ContinuedFraction cf{alpha, {}, {}, {}, false};
  init_convergents(cf.a, cf.p, cf.q);
  const auto qs = alpha.partial_quotients(K);
  for (const auto& ak : qs) push_quotient(cf.a, cf.p, cf.q, ak);
  cf.terminated = alpha.is_rational() && qs.size() < K;
  if (alpha.is_rational() && qs.size() == K) {
    // Also terminated if the expansion happens to end exactly at K.
    cf.terminated = mpq_class(cf.p.back(), cf.q.back()) == alpha.rational_value();
  }
  return cf;
}

std::vector<ApproxRow> best_approx_check(const ContinuedFraction& cf) {
  std::size_t kmax = cf.depth();
  if (cf.terminated || !cf.alpha.is_point()) kmax = kmax > 0 ? kmax - 1 : 0;
  std::vector<ApproxRow> rows;
  for (std::size_t k = 1; k <= kmax; ++k) {
    ApproxRow row;
    row.k = k;
    const mpq_class lower(1, cf.q[k + 1] + cf.q[k]);
    const mpq_class upper(1, cf.q[k + 1]);
    row.lower = lower.get_d();
    row.upper = upper.get_d();
    if (cf.alpha.is_rational()) {
      mpq_class x = cf.alpha.rational_value() * cf.q[k];
      mpz_class fl;
      mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
      mpq_class fr = x - fl;
      if (fr > mpq_class(1, 2)) fr = 1 - fr;
      row.norm = fr.get_d();
      row.status = (fr > lower && fr < upper) ? ApproxStatus::Certified : ApproxStatus::Flagged;
      row.precision_used = 0;
      rows.push_back(row);
      continue;
    }
    bool decided = false;
    for (mpfr_prec_t prec = kDefaultPrecision; prec <= kMaxPrecision; prec *= 2) {
      const Interval norm = cf.alpha.interval(prec).scaled(cf.q[k]).dist_to_int();
      const Interval lo = Interval::exact(lower, prec);
      const Interval hi = Interval::exact(upper, prec);
      row.norm = norm.mid();
      row.precision_used = prec;
      if (norm.certainly_greater(lo) && norm.certainly_less(hi)) {
        row.status = ApproxStatus::Certified;
        decided = true;
      } else if (norm.certainly_less(lo) || norm.certainly_greater(hi)) {
        row.status = ApproxStatus::Flagged;
        decided = true;
      }
      if (decided) break;
    }
    if (!decided) {
      throw PrecisionError("best_approx_check: cannot certify row k = " + std::to_string(k) +
                           " at " + std::to_string(kMaxPrecision) +
                           " bits; raise working precision or extend the quotient list");
    }
    rows.push_back(row);
  }
  return rows;
}

bool ResonanceData::in_M(std::int64_t m) const { return std::binary_search(M.begin(), M.end(), m); }

ResonanceData resonance_sets(const ContinuedFraction& cf, double tau, std::int64_t freq_bound) {
  if (!(tau > 0.0)) throw DomainError("resonance_sets: tau must be > 0");
  if (freq_bound < 1) throw DomainError("resonance_sets: frequency bound must be >= 1");
  ResonanceData res;
  res.tau = tau;
  res.truncation_bound = freq_bound;
  const std::size_t K = cf.depth();
  if (K < 2) {
    res.warnings.push_back("depth " + std::to_string(K) + " too small to classify any k > 1");
    return res;
  }
  const double s = 1.0 / tau + 3.0;
  const bool integral = s == std::floor(s) && s <= 64.0;
  for (std::size_t k = 2; k <= K; ++k) {
    bool in_E;
    if (integral) {
      in_E = cf.q[k + 1] > pow_ui(cf.q[k], static_cast<unsigned>(s));
    } else {
      in_E = log_mpz(cf.q[k + 1]) > s * log_mpz(cf.q[k]);
    }
    if (!in_E) continue;
    res.E.push_back(k);
    if (cf.q[k] > freq_bound) continue;
    const std::int64_t qk = cf.q[k].get_si();
    for (std::int64_t m = 1; m * qk <= freq_bound && cf.a[k] >= m; ++m) {
      res.M.push_back(m * qk);
      res.M.push_back(-m * qk);
    }
  }
  std::sort(res.M.begin(), res.M.end());
  res.M.erase(std::unique(res.M.begin(), res.M.end()), res.M.end());
  res.m_finite_within_depth = res.E.empty() || res.E.back() <= K / 2;
  return res;
}

CertifiedFrac centered_frac(const ExactAlpha& alpha, const mpz_class& k) {
  CertifiedFrac out;
  if (alpha.is_rational()) {
    mpq_class x = alpha.rational_value() * k;
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    mpq_class fr = x - fl;
    if (fr > mpq_class(1, 2)) fr -= 1;
    out.exact_zero = fr == 0;
    out.value = static_cast<long double>(fr.get_d());
    out.precision_used = 0;
    return out;
  }
  const mpfr_prec_t start =
      std::max<mpfr_prec_t>(kDefaultPrecision, static_cast<mpfr_prec_t>(mpz_sizeinbase(k.get_mpz_t(), 2)) + 128);
  double last_width = std::numeric_limits<double>::infinity();
  for (mpfr_prec_t prec = start; prec <= 2 * kMaxPrecision; prec *= 2) {
    const Interval fr = alpha.interval(prec).scaled(k).centered_frac();
    out.precision_used = prec;
    if (fr.relative_width() < std::ldexp(1.0, -60)) {
      out.value = fr.mid_ld();
      return out;
    }
    const double w = fr.width();
    if (!alpha.is_point() && !(w < 0.5 * last_width)) break;
    last_width = w;
  }
  throw PrecisionError("centered_frac: cannot resolve frac(k*alpha) for k = " + k.get_str() +
                       (alpha.is_point() ? "" : "; the quotient prefix is too short"));
}

bool is_convergent(const ContinuedFraction& cf, const mpz_class& p, const mpz_class& q) {
  mpq_class r(p, q);
  r.canonicalize();
  for (std::size_t k = 1; k < cf.q.size(); ++k) {
    if (cf.p[k] == r.get_num() && cf.q[k] == r.get_den()) return true;
  }
  return false;
}

}  // namespace moeb
