#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "moeb/cocycle.hpp"
#include "moeb/contfrac.hpp"

namespace moeb {

/// A point of any supported state space. Circle systems use x; the torus
/// and group extensions use (x, y); shifts use the first `word` symbols.
struct State {
  double x = 0.0;
  double y = 0.0;
  std::array<std::uint8_t, 64> word{};

  bool operator==(const State&) const = default;
};

enum class SystemKind { Rotation, Skew2, GroupSkew, Shift, Custom };
enum class StateSpace { Circle, Torus2, GroupCircle, Shift, Other };

/// How the pairwise kernels can evaluate the step metric. Generic falls
/// back to calling step and metric.
enum class MetricKind { Circle, TorusSup, Shift, Generic };

using StepFn = std::function<State(const State&)>;
using MetricFn = std::function<double(const State&, const State&)>;
using SamplerFn = std::function<std::vector<State>(std::size_t count, std::uint64_t seed)>;

struct SystemInstance {
  SystemKind kind = SystemKind::Custom;
  StateSpace space = StateSpace::Other;
  MetricKind metric_kind = MetricKind::Generic;
  StepFn step;
  MetricFn metric;
  SamplerFn sample;
  /// "haar", "orbit", "bernoulli" or "pushforward".
  std::string sampler_tag;
  nlohmann::json descriptor;
  std::vector<std::string> warnings;

  // Defining data, when the kind has it.
  std::optional<ExactAlpha> alpha;
  long double alpha_value = 0.0L;
  std::optional<FourierCocycle> h;
  std::uint64_t group_order = 0;          // GroupSkew over Z/qZ
  std::vector<double> group_table;        // h(k/q) for GroupSkew over Z/qZ
  std::vector<double> shift_weights;      // Shift

  State iterate(State s, std::uint64_t n) const;
};

/// Builds a system from a JSON descriptor:
///   {"kind":"rotation","alpha":"sqrt2-1"}
///   {"kind":"skew2","alpha":"sqrt2-1","h":[[m,re,im],...],"tau":1,
///    "sampler":"haar"|"orbit","x0":[x,y]}
///   {"kind":"group_skew","order":q,"a":k,"h":[h(0),...,h((q-1)/q)]}
///   {"kind":"group_skew","alpha":"...","h":[[m,re,im],...]}   (circle group)
///   {"kind":"shift","weights":[p_0,...,p_{A-1}]}
/// Throws ConfigError naming the missing or malformed field.
SystemInstance make_system(const nlohmann::json& descriptor);

SystemInstance make_rotation(const ExactAlpha& alpha);
SystemInstance make_skew(const ExactAlpha& alpha, const FourierCocycle& h,
                         const std::string& sampler = "haar",
                         std::optional<std::array<double, 2>> orbit_start = std::nullopt);
SystemInstance make_group_skew(std::uint64_t order, std::uint64_t a, std::vector<double> table);
SystemInstance make_shift(std::vector<double> weights);

/// Orbit sampler constants.
inline constexpr std::uint64_t kOrbitBurnIn = 10000;
inline constexpr std::uint64_t kOrbitStride = 7;

/// Truncated family metric sum_{l <= L} |g_l(a) - g_l(b)| / (2^l (2 |g_l| + 1)).
struct FunctionFamilyMetric {
  std::vector<std::function<std::complex<double>(const State&)>> functions;
  std::vector<double> sup_norms;

  double operator()(const State& a, const State& b) const;
  std::size_t L() const { return functions.size(); }
  /// sum_{l > L} 2^-l = 2^-L, the most the omitted terms can add.
  double truncation_slack() const;
};

/// Throws DomainError if L_max is 0, the sizes differ, or a norm is not finite.
FunctionFamilyMetric function_family_metric(
    std::vector<std::function<std::complex<double>(const State&)>> functions,
    std::vector<double> sup_norms, std::size_t L_max);

/// step' = pi o step o pi^{-1}, sampler pushed forward by pi. Throws
/// ConjugacyError if pi and pi_inverse fail to invert each other (residual
/// above tol in either metric) on check_samples sampled states.
SystemInstance conjugate_system(const SystemInstance& system, StepFn pi, StepFn pi_inverse,
                                MetricFn metric, std::size_t check_samples = 1000,
                                double tol = 1e-9, std::uint64_t seed = 99);

/// Sup-metric on the torus and the shift metric, exposed for reuse.
double torus_sup_metric(const State& a, const State& b);
double shift_metric(const State& a, const State& b);

}  // namespace moeb
