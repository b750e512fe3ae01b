#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "moeb/dynamics.hpp"
#include "moeb/numtheory.hpp"

namespace moeb {

/// One term c e(a x + b y) of a trigonometric polynomial on the circle or
/// the torus.
struct TrigTerm {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::complex<double> c;
};

struct Observable {
  std::vector<TrigTerm> terms;

  std::complex<double> operator()(const State& s) const;
  /// sum |c|, an upper bound for max |f|.
  double sup_bound() const;
  /// sum 2 pi (|a| + |b|) |c|, a Lipschitz constant for the sup metric.
  double lipschitz() const;
  bool is_zero() const;

  /// JSON: [[a, b, re, im], ...] or [[a, re, im], ...] (b = 0).
  static Observable from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct CorrelationSeries {
  nlohmann::json system;
  Observable f;
  State x0;
  std::vector<std::uint64_t> checkpoints;
  /// (1/N_i) sum_{n <= N_i} mu(n) f(T^n x0).
  std::vector<std::complex<double>> values;
  /// The raw sums sum_{n <= N_i} mu(n) f(T^n x0).
  std::vector<std::complex<long double>> sums;
};

/// Streams the orbit once. Rotations and skew products are iterated in
/// long double from their defining data; other systems use their step.
/// Neumaier summation per component. Throws SizingError if a checkpoint
/// exceeds table.limit(), DomainError unless checkpoints ascend from 1.
CorrelationSeries correlation_sum(const MobiusTable& table, const SystemInstance& system,
                                  const Observable& f, const State& x0,
                                  const std::vector<std::uint64_t>& checkpoints);

struct ScheduleCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

struct ClaimRow {
  std::string name;
  double observed = 0.0;
  double claimed = 0.0;
  bool within = false;
};

struct BlockTraceOptions {
  std::size_t samples = 400;  // cloud size for the covering centers
  std::uint64_t seed = 1;
  double D = 1.0;  // the unspecified absolute constant in the bilinear bound
};

struct BlockTrace {
  std::uint64_t L = 0;
  double delta = 0.0;
  double W = 0.0;
  double epsilon = 0.0;
  double epsilon1 = 0.0;
  std::uint64_t N = 0;
  std::vector<State> centers;
  /// j_n for n = 1..N (index n - 1); kUnassigned for n outside E.
  std::vector<std::uint32_t> assignment;
  static constexpr std::uint32_t kUnassigned = 0xffffffffu;
  std::uint64_t assigned = 0;
  double max_assigned_distance = 0.0;

  std::complex<double> direct_average;   // (1/N) sum mu(n) f(T^n x)
  std::complex<double> block_average;    // (1/N) sum (1/L) sum_l mu(n+l) f(T^l x_{j_n})
  double block_difference = 0.0;  // |direct - block|
  double block_magnitude = 0.0;   // |block|

  std::vector<ScheduleCheck> schedule;
  bool schedule_ok = false;
  std::vector<ClaimRow> claims;
  std::string note;
};

/// epsilon_1 = 0.99 min(eps^2, (eps / Lip f)^2), so d < sqrt(epsilon_1)
/// forces |f(y) - f(z)| < eps. Centers come from a greedy cover of a sampled
/// cloud at radius epsilon_1 in dbar_L. Schedule failures are reported, not
/// raised. Throws SizingError if the sieve does not reach N + L.
BlockTrace block_decomposition_trace(const MobiusTable& table, const SystemInstance& system,
                                     const Observable& f, const State& x0, std::uint64_t L,
                                     double delta, double epsilon, std::uint64_t N,
                                     const BlockTraceOptions& options = {});

nlohmann::json to_json(const BlockTrace& trace);

/// Minimal line chart. Nonpositive values are dropped on log axes.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
std::string line_chart_svg(const std::string& title, const std::vector<SvgSeries>& series,
                           bool log_x, bool log_y);

struct RunReport {
  std::filesystem::path directory;
  nlohmann::json summary;
  std::vector<std::string> files;
};

/// Experiments: sieve-check, lemma54, covering-profile, correlation,
/// mrt-bilinear, block-trace. Writes series.csv, summary.json and
/// plot.svg under out_root/<experiment>-<UTC timestamp>[-k]. Throws
/// ConfigError naming the missing field or listing the schema.
RunReport run_experiment(const nlohmann::json& config, const std::filesystem::path& out_root);

/// The config schema, as printed on usage errors.
std::string experiment_schema();

/// Version string recorded in every summary.
std::string code_version();

}  // namespace moeb
