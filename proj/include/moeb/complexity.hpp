#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "moeb/cocycle.hpp"
#include "moeb/dynamics.hpp"

namespace moeb {

/// Empirical measure: weighted atoms of one system.
struct OrbitCloud {
  std::shared_ptr<const SystemInstance> system;
  std::vector<State> points;
  std::vector<double> weights;
  std::string provenance;
  bool uniform = true;

  std::size_t size() const { return points.size(); }

  /// count samples from the system's sampler, equal weights.
  static OrbitCloud sample(std::shared_ptr<const SystemInstance> system, std::size_t count,
                           std::uint64_t seed);
  /// Throws DomainError unless weights are nonnegative and sum to 1 (1e-12).
  static OrbitCloud weighted(std::shared_ptr<const SystemInstance> system,
                             std::vector<State> points, std::vector<double> weights);
};

/// (1/n) sum_{i<n} d(T^i x, T^i y). Throws DomainError for n == 0.
double dbar_distance(const SystemInstance& system, const State& x, const State& y,
                     std::uint64_t n);

/// Row i has bit j set iff dbar_n(x_i, x_j) < epsilon.
struct NeighborSets {
  std::size_t size = 0;
  std::size_t words = 0;
  std::vector<std::uint64_t> bits;  // size * words

  bool test(std::size_t i, std::size_t j) const {
    return (bits[i * words + j / 64] >> (j % 64)) & 1u;
  }
  const std::uint64_t* row(std::size_t i) const { return bits.data() + i * words; }
};

/// One accumulation pass over the orbits: result[a][b] holds the ball
/// relation for n_list[a] and eps_list[b]. n_list must be ascending.
std::vector<std::vector<NeighborSets>> neighbor_sets(const OrbitCloud& cloud,
                                                     const std::vector<std::uint64_t>& n_list,
                                                     const std::vector<double>& eps_list);

/// Packed upper triangle of dbar_n over all pairs i < j, index
/// i*P - i*(i+1)/2 + (j - i - 1).
std::vector<double> pairwise_dbar(const OrbitCloud& cloud, std::uint64_t n);

enum class CoverMethod { Greedy, Exact };
std::string to_string(CoverMethod m);

struct CoverResult {
  std::size_t count = 0;
  std::vector<std::size_t> centers;
  double covered_mass = 0.0;
  CoverMethod method = CoverMethod::Greedy;
};

inline constexpr std::size_t kExactCoverLimit = 20;

/// Centers are cloud points; balls are open. Greedy takes the point that
/// covers the most uncovered mass (lowest index on ties) until the covered
/// mass exceeds 1 - epsilon. Exact is exhaustive search (SizingError above
/// kExactCoverLimit points).
CoverResult covering_number(const OrbitCloud& cloud, std::uint64_t n, double epsilon,
                            CoverMethod method);
CoverResult cover_from_sets(const OrbitCloud& cloud, const NeighborSets& sets, double epsilon,
                            CoverMethod method);

enum class GrowthClass { Bounded, Polynomial, Exponential, Inconclusive, Withheld };
std::string to_string(GrowthClass c);

struct ProfileRow {
  std::uint64_t n = 0;
  std::size_t S = 0;
  CoverMethod method = CoverMethod::Greedy;
  double covered_mass = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // sum of squared residuals
};

/// Least squares y = slope x + intercept. Needs two distinct x values.
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct CoveringProfile {
  double epsilon = 0.0;
  double tau = 1.0;
  std::vector<ProfileRow> rows;
  GrowthClass classification = GrowthClass::Withheld;
  LinearFit polynomial;   // log S against log n
  LinearFit exponential;  // log S against n
  /// min over n_list of S_n / n^tau: an upper-bound witness along n_list,
  /// not the liminf itself.
  double liminf_readout = 0.0;
  std::string note;
};

/// Greedy rows for every (epsilon, n). Bounded: last three S_n equal.
/// Otherwise polynomial vs exponential by least-squares residual ratio
/// above 1.5, else inconclusive. Fewer than three rows: withheld.
std::vector<CoveringProfile> complexity_profile(const OrbitCloud& cloud,
                                                const std::vector<double>& eps_list,
                                                const std::vector<std::uint64_t>& n_list,
                                                double tau);

GrowthClass classify(const std::vector<ProfileRow>& rows, LinearFit* poly = nullptr,
                     LinearFit* expo = nullptr);

struct VisitFrequencyResult {
  double rho_K = 0.0;
  double rho_E = 0.0;
  bool precondition_ok = false;  // rho(K) > 1 - epsilon^2
  bool passed = false;           // rho(E_n) < epsilon, only meaningful with the precondition
  std::string report;
};

/// E_n = {x : (1/n) #{i < n : T^i x in K} <= 1 - epsilon} over the cloud.
VisitFrequencyResult visit_frequency_check(const OrbitCloud& cloud,
                                           const std::function<bool(const State&)>& K,
                                           std::uint64_t n, double epsilon);

/// Certified cover of the torus by the grid
///   F_t = {(i / (L q_t ([3/eps]+1)), j / L)}
/// in dbar_{n_t}-balls of radius eps for S(x, y) = (x + alpha, y + h1(x)),
/// n_t = q_t^{[1/tau] + 2}.
struct GridCoverResult {
  std::size_t t = 0;
  mpz_class q_t;
  mpz_class n_t;
  std::uint64_t L = 0;
  mpz_class grid_count;  // L^2 q_t ([3/eps] + 1)
  double cell_width = 0.0;
  /// Upper bound of dbar_{n_t} between any torus point and its grid corner.
  double certified_bound = 0.0;
  bool certified = false;
  /// Largest directly computed dbar_{n_t} over random sample points.
  double sampled_max = 0.0;
  std::size_t sampled = 0;
  bool sampled_ok = false;
};

/// Throws DomainError unless t is in res.E, and SizingError if n_t exceeds
/// max_n (the bound is a sum over n_t steps).
GridCoverResult resonant_grid_cover(const FourierCocycle& h1, const ContinuedFraction& cf,
                                  const ResonanceData& res, std::size_t t, double epsilon,
                                  std::size_t samples = 128, std::uint64_t seed = 5,
                                  std::uint64_t max_n = 50'000'000);

}  // namespace moeb
