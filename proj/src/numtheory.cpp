#include "moeb/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "moeb/errors.hpp"

namespace moeb {

namespace {

std::vector<std::uint32_t> simple_primes(std::uint64_t bound) {
  std::vector<std::uint32_t> primes;
  if (bound < 2) return primes;
  std::vector<bool> composite(bound + 1, false);
  for (std::uint64_t i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    primes.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return primes;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

}  // namespace

MobiusTable::MobiusTable(std::uint64_t limit, std::uint64_t max_limit) : limit_(limit) {
  if (limit == 0) throw SizingError("mobius table: limit must be >= 1");
  if (limit > max_limit) {
    throw SizingError("mobius table: limit " + std::to_string(limit) + " exceeds memory cap " +
                      std::to_string(max_limit));
  }
  values_.assign(limit + 1, 0);
  const std::uint64_t root = isqrt(limit);
  const std::vector<std::uint32_t> small = simple_primes(root);
  primes_ = small;

  std::vector<std::int8_t> mu_seg;
  std::vector<std::uint64_t> prod;
  for (std::uint64_t lo = 1; lo <= limit; lo += kSegment) {
    const std::uint64_t hi = std::min(limit, lo + kSegment - 1);
    const std::size_t len = hi - lo + 1;
    mu_seg.assign(len, 1);
    prod.assign(len, 1);
    for (std::uint32_t p : small) {
      const std::uint64_t pp = std::uint64_t{p} * p;
      if (std::uint64_t{p} > hi) break;
      for (std::uint64_t m = (lo + p - 1) / p * p; m <= hi; m += p) {
        mu_seg[m - lo] = static_cast<std::int8_t>(-mu_seg[m - lo]);
        prod[m - lo] *= p;
      }
      for (std::uint64_t m = (lo + pp - 1) / pp * pp; m <= hi; m += pp) mu_seg[m - lo] = 0;
    }
    for (std::uint64_t n = lo; n <= hi; ++n) {
      const std::size_t i = n - lo;
      int mu = mu_seg[i];
      // At most one prime factor exceeds sqrt(limit).
      if (mu != 0 && prod[i] != n) mu = -mu;
      values_[n] = static_cast<std::int8_t>(mu);
      if (n > root && prod[i] == 1) primes_.push_back(static_cast<std::uint32_t>(n));
    }
  }
  values_[0] = 0;
}

int MobiusTable::at(std::uint64_t n) const {
  if (n == 0 || n > limit_) {
    throw SizingError("mobius table: index " + std::to_string(n) + " outside [1, " +
                      std::to_string(limit_) + "]");
  }
  return values_[n];
}

MobiusTable build_mobius_table(std::uint64_t limit, std::uint64_t max_limit) {
  return MobiusTable(limit, max_limit);
}

std::int64_t mertens(const MobiusTable& table, std::uint64_t N) {
  if (N > table.limit()) {
    throw SizingError("mertens: N = " + std::to_string(N) + " exceeds table limit " +
                      std::to_string(table.limit()));
  }
  std::int64_t sum = 0;
  for (std::uint64_t n = 1; n <= N; ++n) sum += table.mu(n);
  return sum;
}

std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t result = n;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

namespace {

// One cyclic factor of (Z/qZ)*, realised inside the CRT component Z/p^e.
struct CyclicFactor {
  std::uint64_t prime_power;  // p^e of the CRT component
  std::uint64_t generator;    // generator of the factor, as a residue mod p^e
  std::uint64_t order;
  bool minus_one_factor;      // the <-1> factor of (Z/2^e)* for e >= 3
};

std::uint64_t primitive_root_mod_prime_power(std::uint64_t p, std::uint64_t pe) {
  const std::uint64_t ord = pe / p * (p - 1);
  std::vector<std::uint64_t> factors;
  std::uint64_t m = ord;
  for (std::uint64_t f = 2; f * f <= m; ++f) {
    if (m % f) continue;
    factors.push_back(f);
    while (m % f == 0) m /= f;
  }
  if (m > 1) factors.push_back(m);
  for (std::uint64_t g = 2; g < pe; ++g) {
    if (g % p == 0) continue;
    bool ok = true;
    for (auto f : factors) {
      if (powmod(g, ord / f, pe) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  return 1;
}

// e(phase), exact at the quarter turns.
std::complex<double> unit_root(double phase) {
  const double quarters = phase * 4.0;
  if (quarters == std::floor(quarters)) {
    static constexpr std::complex<double> kQuarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return kQuarter[static_cast<int>(quarters) % 4];
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * phase);
}

}  // namespace

CharacterTable dirichlet_characters(std::uint32_t q, std::uint32_t cap) {
  if (q == 0) throw SizingError("dirichlet_characters: modulus must be >= 1");
  if (q > cap) {
    throw SizingError("dirichlet_characters: modulus " + std::to_string(q) + " exceeds cap " +
                      std::to_string(cap));
  }
  std::vector<CyclicFactor> factors;
  std::uint64_t rest = q;
  for (std::uint64_t p = 2; p <= rest; ++p) {
    if (rest % p) continue;
    std::uint64_t pe = 1;
    while (rest % p == 0) {
      rest /= p;
      pe *= p;
    }
    if (p == 2) {
      if (pe == 4) factors.push_back({pe, 3, 2, false});
      if (pe >= 8) {
        factors.push_back({pe, pe - 1, 2, true});
        factors.push_back({pe, 5, pe / 4, false});
      }
    } else {
      factors.push_back({pe, primitive_root_mod_prime_power(p, pe), pe / p * (p - 1), false});
    }
  }

  // Discrete logs of every residue a mod q, one exponent per factor.
  // For the 2-power component with two factors, a = (-1)^s 5^t mod 2^e.
  const std::size_t nf = factors.size();
  std::vector<std::vector<std::int64_t>> logs(q, std::vector<std::int64_t>(nf, -1));
  std::vector<bool> unit(q, false);
  for (std::uint64_t a = 0; a < q; ++a) unit[a] = std::gcd(a, std::uint64_t{q}) == 1;
  for (std::size_t i = 0; i < nf; ++i) {
    const auto& f = factors[i];
    if (f.minus_one_factor) continue;  // filled together with the next factor
    const bool paired = i > 0 && factors[i - 1].minus_one_factor;
    for (std::uint64_t a = 0; a < q; ++a) {
      if (!unit[a]) continue;
      const std::uint64_t r = a % f.prime_power;
      std::uint64_t x = 1;
      for (std::uint64_t t = 0; t < f.order; ++t) {
        if (x == r) {
          logs[a][i] = static_cast<std::int64_t>(t);
          if (paired) logs[a][i - 1] = 0;
          break;
        }
        if (paired && (f.prime_power - x) % f.prime_power == r) {
          logs[a][i] = static_cast<std::int64_t>(t);
          logs[a][i - 1] = 1;
          break;
        }
        x = x * f.generator % f.prime_power;
      }
    }
  }

  CharacterTable table;
  table.modulus = q;
  std::vector<std::uint64_t> idx(nf, 0);
  while (true) {
    DirichletCharacter chi;
    chi.values.assign(q, {0.0, 0.0});
    chi.principal = std::all_of(idx.begin(), idx.end(), [](auto k) { return k == 0; });
    for (std::uint64_t a = 0; a < q; ++a) {
      if (!unit[a]) continue;
      double phase = 0.0;
      for (std::size_t i = 0; i < nf; ++i) {
        const std::uint64_t num = (idx[i] * static_cast<std::uint64_t>(logs[a][i])) % factors[i].order;
        phase += static_cast<double>(num) / static_cast<double>(factors[i].order);
      }
      phase -= std::floor(phase);
      chi.values[a] = unit_root(phase);
    }
    if (q == 1) chi.values[0] = {1.0, 0.0};
    table.characters.push_back(std::move(chi));
    std::size_t i = 0;
    while (i < nf) {
      if (++idx[i] < factors[i].order) break;
      idx[i] = 0;
      ++i;
    }
    if (i == nf) break;
  }
  return table;
}

double pretentious_distance_sq(const ArithmeticFunction& f, const ArithmeticFunction& g,
                               std::uint64_t N, const MobiusTable& table) {
  if (N > table.limit()) {
    throw SizingError("pretentious_distance_sq: prime list only reaches " +
                      std::to_string(table.limit()));
  }
  constexpr double kSlack = 1e-12;
  double sum = 0.0;
  double comp = 0.0;
  for (std::uint32_t p : table.primes()) {
    if (p > N) break;
    const auto fp = f(p);
    const auto gp = g(p);
    if (std::abs(fp) > 1.0 + kSlack || std::abs(gp) > 1.0 + kSlack) {
      throw DomainError("pretentious_distance_sq: value of modulus > 1 at prime " +
                        std::to_string(p));
    }
    const double term = (1.0 - std::real(fp * std::conj(gp))) / p;
    // Kahan summation keeps the ascending-prime order deterministic and tight.
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return std::max(sum, 0.0);
}

std::vector<double> default_t_grid(std::uint64_t N) {
  const double span = std::log(static_cast<double>(std::max<std::uint64_t>(N, 2)));
  std::vector<double> grid;
  grid.reserve(201);
  for (int i = 0; i < 201; ++i) grid.push_back(-span + 2.0 * span * i / 200.0);
  grid[100] = 0.0;
  return grid;
}

NonPretentiousResult mobius_non_pretentious(const MobiusTable& table, std::uint64_t N,
                                            std::uint32_t Q, std::span<const double> t_grid,
                                            std::uint32_t character_cap) {
  if (t_grid.empty()) throw DomainError("mobius_non_pretentious: empty t grid");
  if (Q == 0) throw DomainError("mobius_non_pretentious: Q must be >= 1");
  if (Q > character_cap) {
    throw SizingError("mobius_non_pretentious: Q = " + std::to_string(Q) +
                      " exceeds character cap " + std::to_string(character_cap));
  }
  if (N > table.limit()) {
    throw SizingError("mobius_non_pretentious: N exceeds sieve limit " +
                      std::to_string(table.limit()));
  }
  std::vector<std::uint32_t> primes;
  std::vector<double> logp;
  for (std::uint32_t p : table.primes()) {
    if (p > N) break;
    primes.push_back(p);
    logp.push_back(std::log(static_cast<double>(p)));
  }

  NonPretentiousResult result;
  bool first = true;
  for (std::uint32_t q = 1; q <= Q; ++q) {
    const CharacterTable chars = dirichlet_characters(q, character_cap);
    for (std::uint32_t ci = 0; ci < chars.characters.size(); ++ci) {
      const auto& chi = chars.characters[ci];
      for (double t : t_grid) {
        // mu(p) = -1, so 1 - Re(mu(p) conj(chi(p) p^{it})) = 1 + Re(chi(p) p^{it}).
        double sum = 0.0;
        double comp = 0.0;
        for (std::size_t k = 0; k < primes.size(); ++k) {
          const auto c = chi(primes[k]) * std::polar(1.0, t * logp[k]);
          const double term = (1.0 + c.real()) / primes[k];
          const double y = term - comp;
          const double s = sum + y;
          comp = (s - sum) - y;
          sum = s;
        }
        PretentiousCandidate cand{q, ci, t, std::max(sum, 0.0)};
        if (first || cand.distance_sq < result.min_distance_sq) {
          result.min_distance_sq = cand.distance_sq;
          result.witness = cand;
          first = false;
        }
        result.candidates.push_back(cand);
      }
    }
  }
  return result;
}

}  // namespace moeb
