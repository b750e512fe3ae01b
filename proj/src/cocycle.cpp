#include "moeb/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "moeb/circle.hpp"
#include "moeb/errors.hpp"

namespace moeb {

namespace {

constexpr long double kPi = std::numbers::pi_v<long double>;

// (e(phi) - 1) / (e(theta) - 1) for centered phases, theta != 0.
std::complex<long double> geometric_ratio(long double phi, long double theta) {
  const long double r = std::sin(kPi * phi) / std::sin(kPi * theta);
  return r * e_turns((phi - theta) / 2.0L);
}

// 1 / (e(theta) - 1) = 1 / (2i sin(pi theta) e(theta/2)).
std::complex<long double> inverse_step(long double theta) {
  const std::complex<long double> d =
      std::complex<long double>(0.0L, 2.0L * std::sin(kPi * theta)) * e_turns(theta / 2.0L);
  return 1.0L / d;
}

}  // namespace

FourierCocycle FourierCocycle::from_terms(std::vector<FourierTerm> terms, double tau,
                                          std::optional<double> C) {
  if (!(tau > 0.0)) throw DomainError("cocycle: tau must be > 0");
  std::map<std::int64_t, std::complex<double>> merged;
  for (const auto& t : terms) merged[t.m] += t.c;
  FourierCocycle h;
  h.tau_ = tau;
  const double tau1 = 2.0 / tau + 6.0;
  double tight = 0.0;
  for (const auto& [m, c] : merged) {
    if (c == std::complex<double>(0.0, 0.0)) continue;
    const auto it = merged.find(-m);
    const std::complex<double> partner = it == merged.end() ? 0.0 : it->second;
    if (std::abs(partner - std::conj(c)) > 1e-12 * std::max(1.0, std::abs(c))) {
      throw DomainError("cocycle: coefficients are not conjugate-symmetric at m = " +
                        std::to_string(m) + "; h must be real-valued");
    }
    if (m != 0) tight = std::max(tight, std::abs(c) * std::pow(std::abs(static_cast<double>(m)), tau1));
    h.terms_.push_back({m, c});
  }
  if (C) {
    if (!(*C > 0.0)) throw DomainError("cocycle: envelope constant must be > 0");
    if (tight > *C * (1.0 + 1e-12)) {
      throw DomainError("cocycle: |c_m| exceeds C |m|^-tau1 (needs C >= " + std::to_string(tight) +
                        ")");
    }
    h.C_ = *C;
  } else {
    h.C_ = tight > 0.0 ? tight : 1.0;
  }
  return h;
}

FourierCocycle FourierCocycle::envelope(double C, double tau, std::int64_t support, double mean) {
  if (support < 0) throw DomainError("cocycle: support must be >= 0");
  const double tau1 = 2.0 / tau + 6.0;
  std::vector<FourierTerm> terms;
  if (mean != 0.0) terms.push_back({0, mean});
  for (std::int64_t m = 1; m <= support; ++m) {
    const double c = C * std::pow(static_cast<double>(m), -tau1);
    terms.push_back({m, c});
    terms.push_back({-m, c});
  }
  return from_terms(std::move(terms), tau, C);
}

std::complex<double> FourierCocycle::coeff(std::int64_t m) const {
  const auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                                   [](const FourierTerm& t, std::int64_t v) { return t.m < v; });
  return it != terms_.end() && it->m == m ? it->c : std::complex<double>(0.0, 0.0);
}

std::int64_t FourierCocycle::max_frequency() const {
  std::int64_t b = 0;
  for (const auto& t : terms_) b = std::max<std::int64_t>(b, std::llabs(t.m));
  return b;
}

double FourierCocycle::operator()(long double x) const {
  long double s = 0.0L;
  for (const auto& t : terms_) {
    const std::complex<long double> c(t.c.real(), t.c.imag());
    s += (c * e_turns(static_cast<long double>(t.m) * x)).real();
  }
  return static_cast<double>(s);
}

double FourierCocycle::lipschitz() const {
  double s = 0.0;
  for (const auto& t : terms_) s += 2.0 * std::numbers::pi * std::abs(static_cast<double>(t.m)) * std::abs(t.c);
  return s;
}

double FourierCocycle::sup_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.c);
  return s;
}

FourierCocycle FourierCocycle::filtered(const std::function<bool(std::int64_t)>& keep) const {
  FourierCocycle out;
  out.C_ = C_;
  out.tau_ = tau_;
  for (const auto& t : terms_)
    if (keep(t.m)) out.terms_.push_back(t);
  return out;
}

PsiEvaluator::PsiEvaluator(std::vector<std::int64_t> freqs,
                           std::vector<std::complex<long double>> coefs, double C, double tau)
    : freqs_(std::move(freqs)), coefs_(std::move(coefs)), C_(C), tau_(tau) {}

double PsiEvaluator::operator()(long double x) const {
  long double s = 0.0L;
  for (std::size_t i = 0; i < freqs_.size(); ++i)
    s += (coefs_[i] * e_turns(static_cast<long double>(freqs_[i]) * x)).real();
  return static_cast<double>(s);
}

double PsiEvaluator::partial(long double x, std::int64_t B) const {
  long double s = 0.0L;
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    if (std::llabs(freqs_[i]) > B) continue;
    s += (coefs_[i] * e_turns(static_cast<long double>(freqs_[i]) * x)).real();
  }
  return static_cast<double>(s);
}

double PsiEvaluator::band(long double x, std::int64_t lo, std::int64_t hi) const {
  // freqs_ is sorted, so the band is two contiguous runs.
  long double s = 0.0L;
  auto run = [&](std::int64_t a, std::int64_t b) {
    auto first = std::lower_bound(freqs_.begin(), freqs_.end(), a);
    auto last = std::upper_bound(freqs_.begin(), freqs_.end(), b);
    for (auto it = first; it < last; ++it) {
      const std::size_t i = static_cast<std::size_t>(it - freqs_.begin());
      s += (coefs_[i] * e_turns(static_cast<long double>(freqs_[i]) * x)).real();
    }
  };
  run(-hi, -lo - 1);
  run(lo + 1, hi);
  return static_cast<double>(s);
}

double PsiEvaluator::tail_bound(double B) const {
  const double s = 1.0 / tau_ + 2.0;
  return C_ * std::pow(B, -s) / s;
}

CocycleSplit split_cocycle(const FourierCocycle& h, const ContinuedFraction& cf,
                           const ResonanceData& res) {
  const ExactAlpha& alpha = cf.alpha;
  const std::int64_t top = h.max_frequency();
  if (!cf.terminated && cf.q.back() <= top) {
    throw ParameterError("split_cocycle: expansion depth " + std::to_string(cf.depth()) +
                         " stops at q = " + cf.q.back().get_str() +
                         ", below the largest frequency " + std::to_string(top));
  }
  if (top > res.truncation_bound) {
    throw ParameterError("split_cocycle: frequency " + std::to_string(top) +
                         " exceeds the resonance truncation bound " +
                         std::to_string(res.truncation_bound));
  }
  CocycleSplit split;
  split.h1 = h.filtered([&](std::int64_t m) { return m == 0 || res.in_M(m); });
  split.tail = h.filtered([&](std::int64_t m) { return m != 0 && !res.in_M(m); });

  std::vector<std::int64_t> freqs;
  std::vector<std::complex<long double>> coefs;
  for (const auto& t : split.tail.terms()) {
    const CertifiedFrac fr = centered_frac(alpha, mpz_class(static_cast<long>(t.m)));
    if (fr.exact_zero) {
      throw ResonanceError("split_cocycle: e(m alpha) = 1 at m = " + std::to_string(t.m) +
                           " outside M; psi is undefined");
    }
    const std::complex<long double> c(t.c.real(), t.c.imag());
    freqs.push_back(t.m);
    coefs.push_back(c * inverse_step(fr.value));

    if (alpha.is_rational()) continue;
    const mpz_class am(static_cast<long>(std::llabs(t.m)));
    auto it = std::upper_bound(cf.q.begin() + 1, cf.q.end(), am);
    const std::size_t k = static_cast<std::size_t>(it - cf.q.begin()) - 1;
    if (k + 1 >= cf.q.size()) continue;
    SmallDenominatorCheck chk;
    chk.m = t.m;
    chk.k = k;
    chk.norm = std::abs(fr.value);
    if (!mpz_divisible_p(am.get_mpz_t(), cf.q[k].get_mpz_t())) {
      chk.branch = 1;
      chk.bound = 1.0L / (2.0L * static_cast<long double>(am.get_d()));
    } else if (k >= 3) {
      chk.branch = 2;
      const mpz_class mk = am / cf.q[k];
      chk.bound = static_cast<long double>(mk.get_d()) /
                  static_cast<long double>(mpz_class(cf.q[k] + cf.q[k + 1]).get_d());
    }
    if (chk.branch != 0 && chk.norm < chk.bound * (1.0L - 1e-15L)) {
      throw InvariantViolation("split_cocycle: ||m alpha|| = " + std::to_string(static_cast<double>(chk.norm)) +
                               " below the small-denominator bound " +
                               std::to_string(static_cast<double>(chk.bound)) + " at m = " +
                               std::to_string(t.m));
    }
    split.checks.push_back(chk);
  }
  split.psi = PsiEvaluator(std::move(freqs), std::move(coefs), h.C(), h.tau());
  return split;
}

double coboundary_residual(const CocycleSplit& split, const FourierCocycle& h,
                           long double alpha, long double x) {
  const long double lhs = static_cast<long double>(split.psi(wrap01(x + alpha))) - split.psi(x);
  const long double rhs = static_cast<long double>(h(x)) - split.h1(x);
  return static_cast<double>(std::abs(lhs - rhs));
}

BirkhoffEvaluator::BirkhoffEvaluator(const FourierCocycle& h1, const ExactAlpha& alpha,
                                     const mpz_class& n) {
  if (n < 0) throw DomainError("birkhoff: n must be >= 0");
  const long double nl = static_cast<long double>(n.get_d());
  for (const auto& t : h1.terms()) {
    const std::complex<long double> c(t.c.real(), t.c.imag());
    std::complex<long double> coef;
    if (t.m == 0) {
      constant_ = c.real() * nl;
      continue;
    }
    if (n == 0) continue;
    const mpz_class m(static_cast<long>(t.m));
    const CertifiedFrac theta = centered_frac(alpha, m);
    if (theta.exact_zero) {
      coef = c * nl;  // every step contributes the same phase
    } else {
      const CertifiedFrac phi = centered_frac(alpha, m * n);
      coef = c * geometric_ratio(phi.exact_zero ? 0.0L : phi.value, theta.value);
    }
    freqs_.push_back(t.m);
    coefs_.push_back(coef);
    terms_.push_back({t.m, std::complex<double>(static_cast<double>(coef.real()),
                                                static_cast<double>(coef.imag()))});
    dev_lip_ += 2.0L * kPi * std::abs(static_cast<long double>(t.m)) * std::abs(coef);
  }
}

double BirkhoffEvaluator::deviation(long double x) const {
  long double s = 0.0L;
  for (std::size_t i = 0; i < freqs_.size(); ++i)
    s += (coefs_[i] * e_turns(static_cast<long double>(freqs_[i]) * x)).real();
  return static_cast<double>(s);
}

double BirkhoffEvaluator::operator()(long double x) const {
  return static_cast<double>(constant_ + deviation(x));
}

double BirkhoffEvaluator::lipschitz() const { return static_cast<double>(dev_lip_); }

double birkhoff_sum(const FourierCocycle& h1, const ExactAlpha& alpha, long double x,
                    std::uint64_t n) {
  return BirkhoffEvaluator(h1, alpha, mpz_class(static_cast<unsigned long>(n)))(x);
}

BlockEstimateReport block_estimate_check(const FourierCocycle& h1, const ContinuedFraction& cf,
                                         const ResonanceData& res, std::size_t grid_size) {
  if (grid_size < 256) throw DomainError("block_estimate_check: grid_size must be >= 256");
  BlockEstimateReport report;
  if (res.E.empty()) {
    report.warnings.push_back("E is empty within depth " + std::to_string(cf.depth()) +
                              "; no rows");
    return report;
  }
  const long double s = 1.0L / res.tau + 2.0L;
  for (std::size_t t : res.E) {
    BlockEstimateRow row;
    row.t = t;
    row.q_t = cf.q[t];
    const BirkhoffEvaluator H(h1, cf.alpha, cf.q[t]);
    long double best = 0.0L;
    for (std::size_t j = 0; j < grid_size; ++j) {
      const long double x = static_cast<long double>(j) / static_cast<long double>(grid_size);
      best = std::max(best, static_cast<long double>(std::abs(H.deviation(x))));
    }
    row.grid_max = best;
    row.slack = H.deviation_lipschitz() / (2.0L * static_cast<long double>(grid_size));
    row.deviation = row.grid_max + row.slack;
    const long double log_bound = -s * static_cast<long double>(log_mpz(cf.q[t]));
    row.bound_power = std::exp(log_bound);
    row.ratio = row.deviation > 0.0L
                    ? static_cast<double>(std::exp(std::log(row.deviation) - log_bound))
                    : 0.0;
    report.max_ratio = std::max(report.max_ratio, row.ratio);
    report.rows.push_back(row);
  }
  return report;
}

double explicit_section_conjugacy(const std::function<double(long double)>& h,
                                  const std::function<double(long double)>& phi,
                                  long double a, SectionGroup group, std::size_t sample_count,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<long double> unif(0.0L, 1.0L);
  std::uniform_int_distribution<std::uint64_t> pick(0, group.order == 0 ? 0 : group.order - 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < sample_count; ++i) {
    const long double g = group.order == 0
                              ? unif(rng)
                              : static_cast<long double>(pick(rng)) /
                                    static_cast<long double>(group.order);
    const long double y = unif(rng);
    // pi(T(g, y)) = (g + a, y + h(g) - phi(g + a)); S(pi(g, y)) = (g + a, y - phi(g)).
    const long double ga = wrap01(g + a);
    const long double y1 = y + h(g) - phi(ga);
    const long double y2 = y - phi(g);
    worst = std::max(worst, circle_dist(y1, y2));
  }
  return worst;
}

}  // namespace moeb
