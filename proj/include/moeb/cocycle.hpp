#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "moeb/contfrac.hpp"

namespace moeb {

struct FourierTerm {
  std::int64_t m = 0;
  std::complex<double> c;
};

/// Real-valued trigonometric polynomial h(x) = sum_m c_m e(m x) with a
/// decay envelope |c_m| <= C |m|^{-tau1}, tau1 = 2/tau + 6.
class FourierCocycle {
 public:
  FourierCocycle() = default;

  /// Terms are merged by frequency and sorted. Throws DomainError if the
  /// terms are not conjugate-symmetric, tau <= 0, or a coefficient breaks
  /// the envelope. Without C the tightest envelope constant is used.
  static FourierCocycle from_terms(std::vector<FourierTerm> terms, double tau,
                                   std::optional<double> C = std::nullopt);
  /// c_m = C |m|^{-tau1} for 1 <= |m| <= support, c_0 = mean.
  static FourierCocycle envelope(double C, double tau, std::int64_t support, double mean = 0.0);

  const std::vector<FourierTerm>& terms() const { return terms_; }
  double C() const { return C_; }
  double tau() const { return tau_; }
  double tau1() const { return 2.0 / tau_ + 6.0; }
  bool empty() const { return terms_.empty(); }

  std::complex<double> coeff(std::int64_t m) const;
  double mean() const { return coeff(0).real(); }
  std::int64_t max_frequency() const;

  double operator()(long double x) const;
  /// sum 2 pi |m| |c_m|.
  double lipschitz() const;
  /// sum |c_m|.
  double sup_bound() const;

  /// Keeps the terms whose frequency satisfies keep(m).
  FourierCocycle filtered(const std::function<bool(std::int64_t)>& keep) const;

 private:
  std::vector<FourierTerm> terms_;
  double C_ = 0.0;
  double tau_ = 1.0;
};

/// Which branch of the small-denominator estimate applied to a frequency.
struct SmallDenominatorCheck {
  std::int64_t m = 0;
  std::size_t k = 0;  // q_k <= |m| < q_{k+1}
  int branch = 0;     // 1: q_k does not divide m, 2: m = m_k q_k, 0: unchecked (k < 3)
  long double norm = 0.0L;   // ||m alpha||
  long double bound = 0.0L;  // 1/(2|m|) or m_k/(q_k + q_{k+1})
};

/// psi(x) = sum_{m not in M, m != 0} c_m e(m x) / (e(m alpha) - 1).
class PsiEvaluator {
 public:
  PsiEvaluator() = default;
  PsiEvaluator(std::vector<std::int64_t> freqs, std::vector<std::complex<long double>> coefs,
               double C, double tau);

  double operator()(long double x) const;
  /// Only the terms with |m| <= B.
  double partial(long double x, std::int64_t B) const;
  /// Only the terms with lo < |m| <= hi.
  double band(long double x, std::int64_t lo, std::int64_t hi) const;
  /// Sup-norm bound on the omitted terms |m| > B under the decay envelope:
  /// C B^{-(1/tau+2)} / (1/tau + 2).
  double tail_bound(double B) const;
  std::size_t size() const { return freqs_.size(); }

 private:
  std::vector<std::int64_t> freqs_;
  std::vector<std::complex<long double>> coefs_;
  double C_ = 0.0;
  double tau_ = 1.0;
};

struct CocycleSplit {
  FourierCocycle h1;    // support in M plus the mean
  FourierCocycle tail;  // everything else
  PsiEvaluator psi;
  std::vector<SmallDenominatorCheck> checks;
};

/// Partitions h along M and builds psi. cf must reach past the largest
/// frequency of h (ParameterError otherwise). Throws ResonanceError when
/// e(m alpha) == 1 for some m outside M, and InvariantViolation when a
/// small-denominator bound fails.
CocycleSplit split_cocycle(const FourierCocycle& h, const ContinuedFraction& cf,
                           const ResonanceData& res);

/// psi(x + alpha) - psi(x) - (h - h1)(x).
double coboundary_residual(const CocycleSplit& split, const FourierCocycle& h,
                           long double alpha, long double x);

/// H_n(x) = sum_{i<n} h1(x + i alpha) through the closed form; the phases
/// m n alpha are reduced exactly before rounding.
class BirkhoffEvaluator {
 public:
  BirkhoffEvaluator(const FourierCocycle& h1, const ExactAlpha& alpha, const mpz_class& n);

  double operator()(long double x) const;
  /// H_n(x) - n c_0.
  double deviation(long double x) const;
  /// Lipschitz bound of H_n, sum 2 pi |m| |coefficient|.
  double lipschitz() const;
  long double deviation_lipschitz() const { return dev_lip_; }
  const std::vector<FourierTerm>& terms() const { return terms_; }

 private:
  long double constant_ = 0.0L;
  std::vector<std::int64_t> freqs_;
  std::vector<std::complex<long double>> coefs_;
  std::vector<FourierTerm> terms_;
  long double dev_lip_ = 0.0L;
};

double birkhoff_sum(const FourierCocycle& h1, const ExactAlpha& alpha, long double x,
                    std::uint64_t n);

struct BlockEstimateRow {
  std::size_t t = 0;
  mpz_class q_t;
  long double grid_max = 0.0L;     // max over the grid of |H_{q_t} - q_t c_0|
  long double slack = 0.0L;        // Lipschitz slack between grid points
  long double deviation = 0.0L;    // grid_max + slack
  long double bound_power = 0.0L;  // q_t^{-(1/tau + 2)}
  double ratio = 0.0;              // deviation / bound_power
};

struct BlockEstimateReport {
  std::vector<BlockEstimateRow> rows;
  std::vector<std::string> warnings;
  /// Largest ratio over the rows (the empirical constant).
  double max_ratio = 0.0;
};

/// One row per t in res.E. Throws DomainError for grid_size < 256.
BlockEstimateReport block_estimate_check(const FourierCocycle& h1, const ContinuedFraction& cf,
                                         const ResonanceData& res, std::size_t grid_size = 1024);

/// Group for the section conjugacy: the circle, or Z/qZ as {k/q}.
struct SectionGroup {
  std::uint64_t order = 0;  // 0 means the circle
};

/// max over sampled (g, y) of the torus distance between pi(T(g, y)) and
/// S(pi(g, y)), with T(g, y) = (g + a, y + h(g)), S(g, y) = (g + a, y) and
/// pi(g, y) = (g, y - phi(g)).
double explicit_section_conjugacy(const std::function<double(long double)>& h,
                                  const std::function<double(long double)>& phi,
                                  long double a, SectionGroup group, std::size_t sample_count,
                                  std::uint64_t seed = 1);

}  // namespace moeb
