#include "moeb/complexity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "moeb/circle.hpp"
#include "moeb/errors.hpp"

namespace moeb {

namespace {

constexpr std::size_t kTile = 32;
// Orbit storage above this many bytes is refused.
constexpr std::size_t kOrbitBytesCap = std::size_t{1} << 30;

using PairSink = std::function<void(std::size_t ci, std::size_t a, std::size_t b, double dbar)>;

void check_n_list(const std::vector<std::uint64_t>& n_list) {
  if (n_list.empty()) throw DomainError("n_list must not be empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0) throw DomainError("n must be >= 1");
    if (i && n_list[i] <= n_list[i - 1]) throw DomainError("n_list must be strictly ascending");
  }
}

// Coordinates of T^i(point a) for i < n, laid out as coord[i * P + a].
void orbit_coordinates(const OrbitCloud& cloud, std::uint64_t n, bool need_y,
                       std::vector<double>& xs, std::vector<double>& ys) {
  const std::size_t P = cloud.size();
  const std::size_t bytes = n * P * sizeof(double) * (need_y ? 2 : 1);
  if (bytes > kOrbitBytesCap) {
    throw SizingError("orbit storage of " + std::to_string(bytes >> 20) +
                      " MiB exceeds the cap; reduce samples or n");
  }
  xs.assign(n * P, 0.0);
  if (need_y) ys.assign(n * P, 0.0);
  for (std::size_t a = 0; a < P; ++a) {
    State s = cloud.points[a];
    for (std::uint64_t i = 0; i < n; ++i) {
      xs[i * P + a] = s.x;
      if (need_y) ys[i * P + a] = s.y;
      if (i + 1 < n) s = cloud.system->step(s);
    }
  }
}

template <bool Torus>
void tile_kernel(const OrbitCloud& cloud, const std::vector<std::uint64_t>& n_list,
                 const PairSink& sink) {
  const std::size_t P = cloud.size();
  const std::uint64_t n_max = n_list.back();
  std::vector<double> xs, ys;
  orbit_coordinates(cloud, n_max, Torus, xs, ys);
  std::vector<double> acc(kTile * kTile);
  for (std::size_t a0 = 0; a0 < P; a0 += kTile) {
    const std::size_t a1 = std::min(P, a0 + kTile);
    for (std::size_t b0 = a0; b0 < P; b0 += kTile) {
      const std::size_t b1 = std::min(P, b0 + kTile);
      const std::size_t bw = b1 - b0;
      std::fill(acc.begin(), acc.end(), 0.0);
      std::size_t ci = 0;
      for (std::uint64_t i = 0; i < n_max; ++i) {
        const double* xi = xs.data() + i * P;
        const double* yi = Torus ? ys.data() + i * P : nullptr;
        for (std::size_t a = a0; a < a1; ++a) {
          double* row = acc.data() + (a - a0) * kTile;
          const double xa = xi[a];
          const double* xb = xi + b0;
          if constexpr (Torus) {
            const double ya = yi[a];
            const double* yb = yi + b0;
            for (std::size_t b = 0; b < bw; ++b) {
              double dx = std::abs(xa - xb[b]);
              dx = dx < 1.0 - dx ? dx : 1.0 - dx;
              double dy = std::abs(ya - yb[b]);
              dy = dy < 1.0 - dy ? dy : 1.0 - dy;
              row[b] += dx > dy ? dx : dy;
            }
          } else {
            for (std::size_t b = 0; b < bw; ++b) {
              double dx = std::abs(xa - xb[b]);
              row[b] += dx < 1.0 - dx ? dx : 1.0 - dx;
            }
          }
        }
        if (i + 1 == n_list[ci]) {
          const double inv = 1.0 / static_cast<double>(n_list[ci]);
          for (std::size_t a = a0; a < a1; ++a)
            for (std::size_t b = std::max(b0, a + 1); b < b1; ++b)
              sink(ci, a, b, acc[(a - a0) * kTile + (b - b0)] * inv);
          ++ci;
        }
      }
    }
  }
}

void shift_kernel(const OrbitCloud& cloud, const std::vector<std::uint64_t>& n_list,
                  const PairSink& sink) {
  const std::size_t P = cloud.size();
  for (std::size_t a = 0; a < P; ++a) {
    const auto& wa = cloud.points[a].word;
    for (std::size_t b = a + 1; b < P; ++b) {
      const auto& wb = cloud.points[b].word;
      std::uint64_t mask = 0;
      for (std::size_t j = 0; j < 64; ++j) mask |= std::uint64_t{wa[j] != wb[j]} << j;
      double acc = 0.0;
      std::size_t ci = 0;
      for (std::uint64_t i = 0; i < n_list.back(); ++i) {
        const std::uint64_t m = i < 64 ? mask >> i : 0;
        if (m) acc += std::ldexp(1.0, -std::countr_zero(m));
        if (i + 1 == n_list[ci]) sink(ci++, a, b, acc / static_cast<double>(i + 1));
      }
    }
  }
}

void generic_kernel(const OrbitCloud& cloud, const std::vector<std::uint64_t>& n_list,
                    const PairSink& sink) {
  const std::size_t P = cloud.size();
  const std::uint64_t n_max = n_list.back();
  if (n_max * P * sizeof(State) > kOrbitBytesCap) {
    throw SizingError("generic orbit storage exceeds the cap; reduce samples or n");
  }
  std::vector<State> orbit(n_max * P);
  for (std::size_t a = 0; a < P; ++a) {
    State s = cloud.points[a];
    for (std::uint64_t i = 0; i < n_max; ++i) {
      orbit[i * P + a] = s;
      if (i + 1 < n_max) s = cloud.system->step(s);
    }
  }
  for (std::size_t a = 0; a < P; ++a) {
    for (std::size_t b = a + 1; b < P; ++b) {
      double acc = 0.0;
      std::size_t ci = 0;
      for (std::uint64_t i = 0; i < n_max; ++i) {
        acc += cloud.system->metric(orbit[i * P + a], orbit[i * P + b]);
        if (i + 1 == n_list[ci]) sink(ci++, a, b, acc / static_cast<double>(i + 1));
      }
    }
  }
}

void accumulate_pairs(const OrbitCloud& cloud, const std::vector<std::uint64_t>& n_list,
                      const PairSink& sink) {
  check_n_list(n_list);
  if (!cloud.system) throw DomainError("cloud has no system");
  switch (cloud.system->metric_kind) {
    case MetricKind::Circle:
      return tile_kernel<false>(cloud, n_list, sink);
    case MetricKind::TorusSup:
      return tile_kernel<true>(cloud, n_list, sink);
    case MetricKind::Shift:
      return shift_kernel(cloud, n_list, sink);
    case MetricKind::Generic:
      return generic_kernel(cloud, n_list, sink);
  }
}

// Covered mass strictly above 1 - epsilon. The threshold is padded by a
// relative 1e-12 so that decimal epsilons such as 0.05 are not met by ties
// that only clear the binary value of epsilon.
struct MassTarget {
  bool uniform;
  long double need;  // count threshold or weight threshold
  bool met(long double have) const { return have > need; }
};

MassTarget mass_target(const OrbitCloud& cloud, double epsilon) {
  const long double keep = 1.0L - static_cast<long double>(epsilon) + 1e-12L;
  if (cloud.uniform) return {true, keep * static_cast<long double>(cloud.size())};
  return {false, keep};
}

long double masked_mass(const OrbitCloud& cloud, const std::uint64_t* row,
                        const std::vector<std::uint64_t>& live, std::size_t words) {
  if (cloud.uniform) {
    std::uint64_t c = 0;
    for (std::size_t w = 0; w < words; ++w) c += std::popcount(row[w] & live[w]);
    return static_cast<long double>(c);
  }
  long double s = 0.0L;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t m = row[w] & live[w];
    while (m) {
      const int b = std::countr_zero(m);
      s += cloud.weights[w * 64 + static_cast<std::size_t>(b)];
      m &= m - 1;
    }
  }
  return s;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
}

}  // namespace

OrbitCloud OrbitCloud::sample(std::shared_ptr<const SystemInstance> system, std::size_t count,
                              std::uint64_t seed) {
  if (count == 0) throw DomainError("cloud: sample count must be >= 1");
  OrbitCloud c;
  c.points = system->sample(count, seed);
  c.weights.assign(count, 1.0 / static_cast<double>(count));
  c.provenance = system->sampler_tag + " seed=" + std::to_string(seed);
  if (system->sampler_tag == "orbit") {
    c.provenance += " burn_in=" + std::to_string(kOrbitBurnIn) +
                    " stride=" + std::to_string(kOrbitStride);
  }
  c.system = std::move(system);
  return c;
}

OrbitCloud OrbitCloud::weighted(std::shared_ptr<const SystemInstance> system,
                                std::vector<State> points, std::vector<double> weights) {
  if (points.empty() || points.size() != weights.size()) {
    throw DomainError("cloud: need one weight per point");
  }
  long double total = 0.0L;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("cloud: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0L) > 1e-12L) throw DomainError("cloud: weights must sum to 1");
  OrbitCloud c;
  c.system = std::move(system);
  c.points = std::move(points);
  c.weights = std::move(weights);
  c.uniform = std::all_of(c.weights.begin(), c.weights.end(),
                          [&](double w) { return w == c.weights.front(); });
  c.provenance = "weighted atoms";
  return c;
}

double dbar_distance(const SystemInstance& system, const State& x, const State& y,
                     std::uint64_t n) {
  if (n == 0) throw DomainError("dbar_distance: n must be >= 1");
  State a = x, b = y;
  double s = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    s += system.metric(a, b);
    if (i + 1 < n) {
      a = system.step(a);
      b = system.step(b);
    }
  }
  return s / static_cast<double>(n);
}

std::vector<std::vector<NeighborSets>> neighbor_sets(const OrbitCloud& cloud,
                                                     const std::vector<std::uint64_t>& n_list,
                                                     const std::vector<double>& eps_list) {
  for (double e : eps_list) check_epsilon(e);
  const std::size_t P = cloud.size();
  const std::size_t words = (P + 63) / 64;
  std::vector<std::vector<NeighborSets>> out(n_list.size());
  for (auto& per_n : out) {
    per_n.resize(eps_list.size());
    for (auto& s : per_n) {
      s.size = P;
      s.words = words;
      s.bits.assign(P * words, 0);
      for (std::size_t i = 0; i < P; ++i) s.bits[i * words + i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }
  accumulate_pairs(cloud, n_list, [&](std::size_t ci, std::size_t a, std::size_t b, double d) {
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
      if (!(d < eps_list[e])) continue;
      auto& s = out[ci][e];
      s.bits[a * words + b / 64] |= std::uint64_t{1} << (b % 64);
      s.bits[b * words + a / 64] |= std::uint64_t{1} << (a % 64);
    }
  });
  return out;
}

std::vector<double> pairwise_dbar(const OrbitCloud& cloud, std::uint64_t n) {
  const std::size_t P = cloud.size();
  std::vector<double> out(P * (P - 1) / 2);
  accumulate_pairs(cloud, {n}, [&](std::size_t, std::size_t a, std::size_t b, double d) {
    out[a * P - a * (a + 1) / 2 + (b - a - 1)] = d;
  });
  return out;
}

std::string to_string(CoverMethod m) { return m == CoverMethod::Greedy ? "greedy" : "exact"; }

std::string to_string(GrowthClass c) {
  switch (c) {
    case GrowthClass::Bounded: return "bounded";
    case GrowthClass::Polynomial: return "polynomial";
    case GrowthClass::Exponential: return "exponential";
    case GrowthClass::Inconclusive: return "inconclusive";
    case GrowthClass::Withheld: return "withheld";
  }
  return "withheld";
}

CoverResult cover_from_sets(const OrbitCloud& cloud, const NeighborSets& sets, double epsilon,
                            CoverMethod method) {
  check_epsilon(epsilon);
  const std::size_t P = cloud.size();
  const std::size_t words = sets.words;
  const MassTarget target = mass_target(cloud, epsilon);
  CoverResult res;
  res.method = method;
  auto finish = [&](long double have) {
    res.count = res.centers.size();
    res.covered_mass = target.uniform
                           ? static_cast<double>(have / static_cast<long double>(P))
                           : static_cast<double>(have);
    if (!target.met(have)) {
      throw InvariantViolation("covering: returned centers cover only " +
                               std::to_string(res.covered_mass) + " <= 1 - epsilon");
    }
    return res;
  };

  if (method == CoverMethod::Greedy) {
    std::vector<std::uint64_t> live(words, ~std::uint64_t{0});
    if (P % 64) live.back() = (std::uint64_t{1} << (P % 64)) - 1;
    long double have = 0.0L;
    while (!target.met(have)) {
      std::size_t best = P;
      long double best_gain = 0.0L;
      for (std::size_t c = 0; c < P; ++c) {
        const long double g = masked_mass(cloud, sets.row(c), live, words);
        if (g > best_gain) {
          best_gain = g;
          best = c;
        }
      }
      if (best == P) break;  // nothing left to gain
      res.centers.push_back(best);
      have += best_gain;
      for (std::size_t w = 0; w < words; ++w) live[w] &= ~sets.row(best)[w];
    }
    return finish(have);
  }

  if (P > kExactCoverLimit) {
    throw SizingError("exact covering is limited to " + std::to_string(kExactCoverLimit) +
                      " points, got " + std::to_string(P));
  }
  std::vector<std::uint32_t> rows(P);
  for (std::size_t i = 0; i < P; ++i) rows[i] = static_cast<std::uint32_t>(sets.row(i)[0]);
  auto mass_of = [&](std::uint32_t m) {
    if (target.uniform) return static_cast<long double>(std::popcount(m));
    long double s = 0.0L;
    for (std::size_t i = 0; i < P; ++i)
      if ((m >> i) & 1u) s += cloud.weights[i];
    return s;
  };
  const std::uint32_t full = P == 32 ? ~0u : (1u << P) - 1;
  for (std::size_t k = 1; k <= P; ++k) {
    // Gosper's hack walks the k-subsets in increasing order.
    std::uint32_t sub = (1u << k) - 1;
    while (sub <= full) {
      std::uint32_t uni = 0;
      for (std::uint32_t m = sub; m; m &= m - 1) uni |= rows[std::countr_zero(m)];
      const long double have = mass_of(uni);
      if (target.met(have)) {
        for (std::uint32_t m = sub; m; m &= m - 1) res.centers.push_back(std::countr_zero(m));
        return finish(have);
      }
      const std::uint32_t c = sub & (~sub + 1);
      const std::uint32_t r = sub + c;
      if (r == 0) break;
      sub = (((r ^ sub) >> 2) / c) | r;
    }
  }
  return finish(0.0L);
}

CoverResult covering_number(const OrbitCloud& cloud, std::uint64_t n, double epsilon,
                            CoverMethod method) {
  check_epsilon(epsilon);
  if (method == CoverMethod::Exact && cloud.size() > kExactCoverLimit) {
    throw SizingError("exact covering is limited to " + std::to_string(kExactCoverLimit) +
                      " points, got " + std::to_string(cloud.size()));
  }
  const auto sets = neighbor_sets(cloud, {n}, {epsilon});
  return cover_from_sets(cloud, sets[0][0], epsilon, method);
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw DomainError("least_squares: need at least two points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("least_squares: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    f.residual += r * r;
  }
  return f;
}

GrowthClass classify(const std::vector<ProfileRow>& rows, LinearFit* poly, LinearFit* expo) {
  if (rows.size() < 3) return GrowthClass::Withheld;
  std::vector<double> ln, n, ls;
  for (const auto& r : rows) {
    ln.push_back(std::log(static_cast<double>(r.n)));
    n.push_back(static_cast<double>(r.n));
    ls.push_back(std::log(static_cast<double>(r.S)));
  }
  const LinearFit p = least_squares(ln, ls);
  const LinearFit e = least_squares(n, ls);
  if (poly) *poly = p;
  if (expo) *expo = e;
  const std::size_t k = rows.size();
  if (rows[k - 1].S == rows[k - 2].S && rows[k - 2].S == rows[k - 3].S) return GrowthClass::Bounded;
  if (e.residual > 1.5 * p.residual) return GrowthClass::Polynomial;
  if (p.residual > 1.5 * e.residual) return GrowthClass::Exponential;
  return GrowthClass::Inconclusive;
}

std::vector<CoveringProfile> complexity_profile(const OrbitCloud& cloud,
                                                const std::vector<double>& eps_list,
                                                const std::vector<std::uint64_t>& n_list,
                                                double tau) {
  if (!(tau > 0.0)) throw DomainError("complexity_profile: tau must be > 0");
  const auto sets = neighbor_sets(cloud, n_list, eps_list);
  std::vector<CoveringProfile> out;
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    CoveringProfile prof;
    prof.epsilon = eps_list[e];
    prof.tau = tau;
    prof.liminf_readout = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      const CoverResult c = cover_from_sets(cloud, sets[i][e], eps_list[e], CoverMethod::Greedy);
      prof.rows.push_back({n_list[i], c.count, CoverMethod::Greedy, c.covered_mass});
      prof.liminf_readout = std::min(
          prof.liminf_readout,
          static_cast<double>(c.count) / std::pow(static_cast<double>(n_list[i]), tau));
    }
    if (n_list.size() >= 2) {
      std::vector<double> ln, n, ls;
      for (const auto& r : prof.rows) {
        ln.push_back(std::log(static_cast<double>(r.n)));
        n.push_back(static_cast<double>(r.n));
        ls.push_back(std::log(static_cast<double>(r.S)));
      }
      prof.polynomial = least_squares(ln, ls);
      prof.exponential = least_squares(n, ls);
    }
    prof.classification = classify(prof.rows);
    prof.note = n_list.size() < 3 ? "fewer than three n values; classification withheld"
                                  : "witnessed along n_list only";
    out.push_back(std::move(prof));
  }
  return out;
}

VisitFrequencyResult visit_frequency_check(const OrbitCloud& cloud,
                                           const std::function<bool(const State&)>& K,
                                           std::uint64_t n, double epsilon) {
  check_epsilon(epsilon);
  if (n == 0) throw DomainError("visit_frequency_check: n must be >= 1");
  VisitFrequencyResult r;
  long double rk = 0.0L, re = 0.0L;
  for (std::size_t a = 0; a < cloud.size(); ++a) {
    State s = cloud.points[a];
    if (K(s)) rk += cloud.weights[a];
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      hits += K(s);
      if (i + 1 < n) s = cloud.system->step(s);
    }
    if (static_cast<long double>(hits) <= (1.0L - epsilon) * static_cast<long double>(n))
      re += cloud.weights[a];
  }
  r.rho_K = static_cast<double>(rk);
  r.rho_E = static_cast<double>(re);
  r.precondition_ok = rk > 1.0L - static_cast<long double>(epsilon) * epsilon;
  r.passed = r.precondition_ok && r.rho_E < epsilon;
  r.report = r.precondition_ok
                 ? (r.passed ? "rho(E_n) < epsilon" : "rho(E_n) >= epsilon")
                 : "precondition violated: rho(K) <= 1 - epsilon^2; check skipped";
  return r;
}

GridCoverResult resonant_grid_cover(const FourierCocycle& h1, const ContinuedFraction& cf,
                                  const ResonanceData& res, std::size_t t, double epsilon,
                                  std::size_t samples, std::uint64_t seed, std::uint64_t max_n) {
  check_epsilon(epsilon);
  if (std::find(res.E.begin(), res.E.end(), t) == res.E.end()) {
    throw DomainError("resonant_grid_cover: t = " + std::to_string(t) + " is not in E");
  }
  GridCoverResult g;
  g.t = t;
  g.q_t = cf.q[t];
  const auto power = static_cast<unsigned>(std::floor(1.0 / res.tau)) + 2;
  mpz_pow_ui(g.n_t.get_mpz_t(), g.q_t.get_mpz_t(), power);
  if (g.n_t > max_n) {
    throw SizingError("resonant_grid_cover: n_t = " + g.n_t.get_str() + " exceeds " +
                      std::to_string(max_n));
  }
  const std::uint64_t n_t = g.n_t.get_ui();
  const auto three_eps = static_cast<std::uint64_t>(std::floor(3.0 / epsilon + 1e-9));
  const std::uint64_t cells_per_q = three_eps + 1;
  const auto l_eps = static_cast<std::uint64_t>(std::ceil(3.0 / epsilon - 1e-9));
  const auto l_lip = static_cast<std::uint64_t>(std::ceil(h1.lipschitz()));
  g.L = std::max<std::uint64_t>({l_eps, l_lip, 1});
  g.grid_count = mpz_class(static_cast<unsigned long>(g.L * g.L)) * g.q_t *
                 static_cast<unsigned long>(cells_per_q);
  const long double columns =
      static_cast<long double>(g.L) * static_cast<long double>(g.q_t.get_d()) * cells_per_q;
  const long double dx = 1.0L / columns;
  g.cell_width = static_cast<double>(dx);

  // Frequencies of h1 with their phases e(m alpha).
  std::vector<std::int64_t> ms;
  std::vector<std::complex<long double>> cs, steps;
  std::vector<long double> thetas;
  for (const auto& term : h1.terms()) {
    if (term.m == 0) continue;
    ms.push_back(term.m);
    cs.emplace_back(term.c.real(), term.c.imag());
    const CertifiedFrac th = centered_frac(cf.alpha, mpz_class(static_cast<long>(term.m)));
    thetas.push_back(th.exact_zero ? 0.0L : th.value);
    steps.push_back(e_turns(thetas.back()));
  }

  // Lip(H_i) <= sum 2 pi |m| |c_m| |sin(pi i theta_m) / sin(pi theta_m)|.
  constexpr long double kPi = std::numbers::pi_v<long double>;
  const long double inv_L = 1.0L / static_cast<long double>(g.L);
  long double total = 0.0L;
  for (std::uint64_t i = 0; i < n_t; ++i) {
    long double lip = 0.0L;
    for (std::size_t k = 0; k < ms.size(); ++k) {
      long double ratio;
      if (thetas[k] == 0.0L) {
        ratio = static_cast<long double>(i);
      } else {
        const long double num = std::abs(std::sin(kPi * wrap01(static_cast<long double>(i) * thetas[k])));
        ratio = std::min<long double>(static_cast<long double>(i), num / std::abs(std::sin(kPi * thetas[k])));
      }
      lip += 2.0L * kPi * std::abs(static_cast<long double>(ms[k])) * std::abs(cs[k]) * ratio;
    }
    total += std::max(dx, inv_L + lip * dx);
  }
  g.certified_bound = static_cast<double>(total / static_cast<long double>(n_t) * (1.0L + 1e-12L));
  g.certified = g.certified_bound < epsilon;

  // Direct dbar_{n_t} from random points to their grid corners.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<long double> u(0.0L, 1.0L);
  for (std::size_t s = 0; s < samples; ++s) {
    const long double x = u(rng), y = u(rng);
    const long double xs = std::floor(x * columns) / columns;
    const long double ys = std::floor(y * static_cast<long double>(g.L)) * inv_L;
    const double ddx = circle_dist(x, xs);
    // h1(x + i alpha) - h1(xs + i alpha) = sum c_m (e(m x) - e(m xs)) e(m i alpha).
    std::vector<std::complex<long double>> z(ms.size());
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const long double mk = static_cast<long double>(ms[k]);
      z[k] = cs[k] * (e_turns(mk * x) - e_turns(mk * xs));
    }
    long double D = 0.0L, sum = 0.0L;
    for (std::uint64_t i = 0; i < n_t; ++i) {
      sum += std::max<long double>(ddx, circle_dist(y - ys + D, 0.0L));
      long double inc = 0.0L;
      for (std::size_t k = 0; k < ms.size(); ++k) {
        inc += z[k].real();
        z[k] *= steps[k];
      }
      D += inc;
    }
    const double dbar = static_cast<double>(sum / static_cast<long double>(n_t));
    g.sampled_max = std::max(g.sampled_max, dbar);
    ++g.sampled;
  }
  g.sampled_ok = g.sampled_max < epsilon && g.sampled_max <= g.certified_bound;
  return g;
}

}  // namespace moeb
