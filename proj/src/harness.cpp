#include "moeb/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

#include "moeb/circle.hpp"
#include "moeb/cocycle.hpp"
#include "moeb/complexity.hpp"
#include "moeb/contfrac.hpp"
#include "moeb/errors.hpp"
#include "moeb/mrt.hpp"

#ifndef MOEB_VERSION
#define MOEB_VERSION "unknown"
#endif

namespace moeb {

using nlohmann::json;

namespace {

// Neumaier compensated sum.
struct CompensatedSum {
  long double sum = 0.0L;
  long double comp = 0.0L;

  void add(long double v) {
    const long double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  long double value() const { return sum + comp; }
};

// T^n x0 for n = 1, 2, ... Rotations and skew products run in long double
// from alpha and h; anything else goes through the step function.
class OrbitStream {
 public:
  OrbitStream(const SystemInstance& system, const State& x0) : system_(system), state_(x0) {
    closed_form_ = system.alpha.has_value() && system.group_order == 0 &&
                   system.metric_kind != MetricKind::Generic &&
                   (system.kind == SystemKind::Rotation || system.h.has_value());
    x0_ = x0.x;
    y_ = x0.y;
  }

  const State& next() {
    ++n_;
    if (!closed_form_) {
      state_ = system_.step(state_);
      return state_;
    }
    // y_{n} = y_{n-1} + h(x_{n-1}), x_n = x0 + n alpha.
    if (system_.h) {
      const long double xprev = wrap01(x0_ + static_cast<long double>(n_ - 1) * system_.alpha_value);
      y_ = wrap01(y_ + (*system_.h)(xprev));
      state_.y = static_cast<double>(y_);
    }
    state_.x = static_cast<double>(wrap01(x0_ + static_cast<long double>(n_) * system_.alpha_value));
    return state_;
  }

 private:
  const SystemInstance& system_;
  State state_;
  bool closed_form_ = false;
  long double x0_ = 0.0L;
  long double y_ = 0.0L;
  std::uint64_t n_ = 0;
};

void check_state_space(const SystemInstance& system) {
  if (system.space == StateSpace::Shift) {
    throw DomainError("observables are trigonometric polynomials on the circle or torus; "
                      "shift systems are not supported here");
  }
}

// Coordinates of circle and torus states already lie in [0, 1).
inline double unit_dist(double a, double b) {
  const double d = std::abs(a - b);
  return d < 1.0 - d ? d : 1.0 - d;
}

inline double step_metric(const SystemInstance& s, const State& a, const State& b) {
  switch (s.metric_kind) {
    case MetricKind::Circle: return unit_dist(a.x, b.x);
    case MetricKind::TorusSup: return std::max(unit_dist(a.x, b.x), unit_dist(a.y, b.y));
    default: return s.metric(a, b);
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::complex<double> Observable::operator()(const State& s) const {
  std::complex<double> v = 0.0;
  for (const auto& t : terms) {
    const long double arg = static_cast<long double>(t.a) * s.x + static_cast<long double>(t.b) * s.y;
    const auto e = e_turns(arg);
    v += t.c * std::complex<double>(static_cast<double>(e.real()), static_cast<double>(e.imag()));
  }
  return v;
}

double Observable::sup_bound() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.c);
  return s;
}

double Observable::lipschitz() const {
  double s = 0.0;
  for (const auto& t : terms)
    s += 2.0 * std::numbers::pi * static_cast<double>(std::llabs(t.a) + std::llabs(t.b)) * std::abs(t.c);
  return s;
}

bool Observable::is_zero() const {
  return std::all_of(terms.begin(), terms.end(), [](const TrigTerm& t) { return t.c == 0.0; });
}

Observable Observable::from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("observable: expected a list of [a, b, re, im] rows");
  Observable f;
  try {
    for (const auto& row : j) {
      if (!row.is_array() || row.size() < 3 || row.size() > 4) {
        throw ConfigError("observable: rows must be [a, b, re, im] or [a, re, im]");
      }
      TrigTerm t;
      t.a = row[0].get<std::int64_t>();
      if (row.size() == 4) {
        t.b = row[1].get<std::int64_t>();
        t.c = {row[2].get<double>(), row[3].get<double>()};
      } else {
        t.c = {row[1].get<double>(), row[2].get<double>()};
      }
      f.terms.push_back(t);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("observable: malformed row: ") + e.what());
  }
  return f;
}

json Observable::to_json() const {
  json j = json::array();
  for (const auto& t : terms) j.push_back({t.a, t.b, t.c.real(), t.c.imag()});
  return j;
}

CorrelationSeries correlation_sum(const MobiusTable& table, const SystemInstance& system,
                                  const Observable& f, const State& x0,
                                  const std::vector<std::uint64_t>& checkpoints) {
  check_state_space(system);
  if (checkpoints.empty()) throw DomainError("correlation: no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] == 0 || (i && checkpoints[i] <= checkpoints[i - 1])) {
      throw DomainError("correlation: checkpoints must be positive and strictly ascending");
    }
  }
  if (checkpoints.back() > table.limit()) {
    throw SizingError("correlation: checkpoint " + std::to_string(checkpoints.back()) +
                      " exceeds the sieve limit " + std::to_string(table.limit()));
  }
  CorrelationSeries out;
  out.system = system.descriptor;
  out.f = f;
  out.x0 = x0;
  out.checkpoints = checkpoints;
  OrbitStream orbit(system, x0);
  CompensatedSum re, im;
  std::size_t ci = 0;
  for (std::uint64_t n = 1; n <= checkpoints.back(); ++n) {
    const State& s = orbit.next();
    const int m = table.mu(n);
    if (m != 0) {
      const auto v = f(s);
      re.add(m * static_cast<long double>(v.real()));
      im.add(m * static_cast<long double>(v.imag()));
    }
    if (n == checkpoints[ci]) {
      const std::complex<long double> total(re.value(), im.value());
      out.sums.push_back(total);
      out.values.emplace_back(static_cast<double>(total.real() / n), static_cast<double>(total.imag() / n));
      ++ci;
    }
  }
  return out;
}

BlockTrace block_decomposition_trace(const MobiusTable& table, const SystemInstance& system,
                                     const Observable& f, const State& x0, std::uint64_t L,
                                     double delta, double epsilon, std::uint64_t N,
                                     const BlockTraceOptions& options) {
  check_state_space(system);
  if (L == 0 || N == 0) throw DomainError("block trace: L and N must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("block trace: epsilon must lie in (0, 1)");
  if (!(delta > 0.0)) throw DomainError("block trace: delta must be > 0");
  if (N + L > table.limit()) {
    throw SizingError("block trace: the sieve must reach N + L = " + std::to_string(N + L));
  }
  BlockTrace tr;
  tr.L = L;
  tr.delta = delta;
  tr.epsilon = epsilon;
  tr.N = N;
  tr.W = std::pow(static_cast<double>(L), delta);
  const double lip = f.lipschitz();
  const double e2 = epsilon * epsilon;
  tr.epsilon1 = 0.99 * (lip > 0.0 ? std::min(e2, (epsilon / lip) * (epsilon / lip)) : e2);

  // Centers: greedy cover of a sampled cloud in dbar_L at radius epsilon_1.
  auto shared = std::make_shared<const SystemInstance>(system);
  const auto cloud = OrbitCloud::sample(shared, options.samples, options.seed);
  const auto cover = covering_number(cloud, L, tr.epsilon1, CoverMethod::Greedy);
  for (std::size_t c : cover.centers) tr.centers.push_back(cloud.points[c]);
  const std::size_t m = tr.centers.size();

  const double logL = std::log(static_cast<double>(L));
  tr.schedule = {
      {"0 < delta < 1/500", delta, 1.0 / 500.0, delta < 1.0 / 500.0},
      {"W = L^delta >= max(10, log^20 L)", tr.W, std::max(10.0, std::pow(logL, 20.0)),
       tr.W >= std::max(10.0, std::pow(logL, 20.0))},
      {"epsilon_1 < epsilon^2", tr.epsilon1, e2, tr.epsilon1 < e2},
      {"S_L(epsilon_1) < epsilon^3 L^(delta/20) / (2D)", static_cast<double>(m),
       e2 * epsilon * std::pow(static_cast<double>(L), delta / 20.0) / (2.0 * options.D),
       static_cast<double>(m) <
           e2 * epsilon * std::pow(static_cast<double>(L), delta / 20.0) / (2.0 * options.D)},
  };
  tr.schedule_ok = std::all_of(tr.schedule.begin(), tr.schedule.end(),
                               [](const ScheduleCheck& c) { return c.ok; });

  // Center orbits: C[l * m + j] = T^l x_j, F likewise with f applied.
  std::vector<State> C(L * m);
  std::vector<std::complex<double>> F(L * m);
  for (std::size_t j = 0; j < m; ++j) {
    State s = tr.centers[j];
    for (std::uint64_t l = 0; l < L; ++l) {
      C[l * m + j] = s;
      F[l * m + j] = f(s);
      s = system.step(s);
    }
  }

  // f along the orbit, fo[k] = f(T^k x0) for 1 <= k <= N + L - 1, and a
  // ring of the last L states.
  std::vector<std::complex<double>> fo(N + L);
  std::vector<State> ring(L);
  OrbitStream orbit(system, x0);
  auto advance = [&](std::uint64_t k) {
    const State& s = orbit.next();
    ring[k % L] = s;
    fo[k] = f(s);
  };
  for (std::uint64_t k = 1; k <= L; ++k) advance(k);

  tr.assignment.assign(N, BlockTrace::kUnassigned);
  const double cut = static_cast<double>(L) * tr.epsilon1;
  std::vector<std::uint32_t> active;
  std::vector<double> acc(m);
  CompensatedSum dre, dim, bre, bim, sre, sim;
  double gap_e = 0.0;  // max over n in E of (1/L) sum |f(T^{n+l} x) - f(T^l x_{j_n})|
  const double invL = 1.0 / static_cast<double>(L);
  for (std::uint64_t n = 1; n <= N; ++n) {
    // Ring holds T^n .. T^{n+L-1}.
    active.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      active[j] = static_cast<std::uint32_t>(j);
      acc[j] = 0.0;
    }
    for (std::uint64_t l = 0; l < L && !active.empty(); ++l) {
      const State& y = ring[(n + l) % L];
      std::size_t keep = 0;
      for (std::uint32_t j : active) {
        acc[j] += step_metric(system, y, C[l * m + j]);
        if (acc[j] < cut) active[keep++] = j;
      }
      active.resize(keep);
    }
    std::uint32_t jn = BlockTrace::kUnassigned;
    for (std::uint32_t j : active)
      if (jn == BlockTrace::kUnassigned || acc[j] < acc[jn]) jn = j;
    if (jn != BlockTrace::kUnassigned) {
      const double d = acc[jn] * invL;
      if (!(d < tr.epsilon1)) throw InvariantViolation("block trace: assigned center is not within epsilon_1");
      tr.max_assigned_distance = std::max(tr.max_assigned_distance, d);
      ++tr.assigned;
    }
    tr.assignment[n - 1] = jn;
    const std::size_t jj = jn == BlockTrace::kUnassigned ? 0 : jn;

    const int mu_n = table.mu(n);
    dre.add(mu_n * fo[n].real());
    dim.add(mu_n * fo[n].imag());
    std::complex<double> blk = 0.0, smooth = 0.0;
    double gap = 0.0;
    for (std::uint64_t l = 0; l < L; ++l) {
      const int mu = table.mu(n + l);
      const auto fc = m ? F[l * m + jj] : std::complex<double>(0.0);
      blk += static_cast<double>(mu) * fc;
      smooth += static_cast<double>(mu) * fo[n + l];
      gap += std::sqrt(std::norm(fo[n + l] - fc));
    }
    bre.add(blk.real() * invL);
    bim.add(blk.imag() * invL);
    sre.add(smooth.real() * invL);
    sim.add(smooth.imag() * invL);
    if (jn != BlockTrace::kUnassigned) gap_e = std::max(gap_e, gap * invL);
    if (n < N) advance(n + L);
  }
  const long double invN = 1.0L / static_cast<long double>(N);
  tr.direct_average = {static_cast<double>(dre.value() * invN), static_cast<double>(dim.value() * invN)};
  tr.block_average = {static_cast<double>(bre.value() * invN), static_cast<double>(bim.value() * invN)};
  const std::complex<double> smooth_avg(static_cast<double>(sre.value() * invN),
                                        static_cast<double>(sim.value() * invN));
  tr.block_difference = std::abs(tr.direct_average - tr.block_average);
  tr.block_magnitude = std::abs(tr.block_average);

  const double visit = static_cast<double>(tr.assigned) / static_cast<double>(N);
  auto row = [](std::string name, double obs, double claim, bool below) {
    return ClaimRow{std::move(name), obs, claim, below ? obs < claim : obs > claim};
  };
  tr.claims = {
      row("|direct - shifted average| vs 2L/N", std::abs(tr.direct_average - smooth_avg),
          2.0 * L / static_cast<double>(N), true),
      row("visit fraction of E vs 1 - epsilon^2", visit, 1.0 - e2, false),
      row("max over E of mean |f(T^l T^n x) - f(T^l x_jn)| vs 3 epsilon", gap_e, 3.0 * epsilon, true),
      row("|direct - block| vs 5 epsilon", tr.block_difference, 5.0 * epsilon, true),
      row("|block| vs 3 epsilon", tr.block_magnitude, 3.0 * epsilon, true),
  };
  tr.note = "observed against claimed bounds that hold only for sufficiently large N; "
            "rows are diagnostics, not assertions";
  if (f.sup_bound() > 1.0) tr.note += "; max|f| may exceed 1, which the claimed bounds assume";
  if (!tr.schedule_ok) tr.note += "; parameter schedule not met (see schedule)";
  return tr;
}

json to_json(const BlockTrace& tr) {
  json j;
  j["L"] = tr.L;
  j["delta"] = tr.delta;
  j["W"] = tr.W;
  j["epsilon"] = tr.epsilon;
  j["epsilon1"] = tr.epsilon1;
  j["N"] = tr.N;
  j["centers"] = tr.centers.size();
  j["assigned"] = tr.assigned;
  j["max_assigned_distance"] = tr.max_assigned_distance;
  j["direct_average"] = {tr.direct_average.real(), tr.direct_average.imag()};
  j["block_average"] = {tr.block_average.real(), tr.block_average.imag()};
  j["block_difference"] = tr.block_difference;
  j["block_magnitude"] = tr.block_magnitude;
  j["schedule_ok"] = tr.schedule_ok;
  j["schedule"] = json::array();
  for (const auto& c : tr.schedule)
    j["schedule"].push_back({{"check", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"ok", c.ok}});
  j["claims"] = json::array();
  for (const auto& c : tr.claims)
    j["claims"].push_back(
        {{"name", c.name}, {"observed", c.observed}, {"claimed", c.claimed}, {"within", c.within}});
  j["note"] = tr.note;
  return j;
}

std::string line_chart_svg(const std::string& title, const std::vector<SvgSeries>& series,
                           bool log_x, bool log_y) {
  constexpr double W = 640, H = 400, ml = 70, mr = 20, mt = 40, mb = 50;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0) && (!log_y || y > 0);
  };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double v) { return H - mb - (ty(v) - y0) / (y1 - y0) * (H - mt - mb); };
  auto label = [](double v, bool lg) { return fmt_short(lg ? std::pow(10.0, v) : v); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n";
  o << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
    << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << ml << "\" y=\"" << H - mb + 18 << "\">" << label(x0, log_x) << "</text>\n";
  o << "<text x=\"" << W - mr << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"end\">"
    << label(x1, log_x) << "</text>\n";
  o << "<text x=\"" << ml - 6 << "\" y=\"" << H - mb << "\" text-anchor=\"end\">" << label(y0, log_y)
    << "</text>\n";
  o << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 4 << "\" text-anchor=\"end\">" << label(y1, log_y)
    << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = colors[k % 6];
    o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (usable(s.x[i], s.y[i])) o << fmt_short(px(s.x[i])) << ',' << fmt_short(py(s.y[i])) << ' ';
    o << "\"/>\n";
    o << "<text x=\"" << W - mr - 4 << "\" y=\"" << mt + 14 * (k + 1) << "\" text-anchor=\"end\" fill=\""
      << col << "\">" << s.label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string code_version() { return MOEB_VERSION; }

std::string experiment_schema() {
  return R"(config schema (JSON object):
  "experiment": one of sieve-check, lemma54, covering-profile, correlation, mrt-bilinear, block-trace
  "seed": integer (default 1)
  sieve-check:      "limit", optional "oracle_limit"
  lemma54:          "alpha", optional "tau", "C", "support", "depth", "grid"
  covering-profile: "system", "eps", "ns", optional "samples", "tau"
  correlation:      "system", "observable", "x0", "checkpoints"
  mrt-bilinear:     "N" (list), "L", optional "P1", "Q1"
  block-trace:      "system", "observable", "x0", "L", "delta", "epsilon", "N",
                    optional "samples", "D"
  "system" is a descriptor object or a path to one; "observable" is [[a, b, re, im], ...].)";
}

namespace {

const json& need(const json& c, const char* field) {
  if (!c.contains(field)) {
    throw ConfigError(std::string("config: missing field '") + field + "'\n" + experiment_schema());
  }
  return c.at(field);
}

SystemInstance system_from(const json& c) {
  const json& s = need(c, "system");
  if (s.is_string()) {
    std::ifstream in(s.get<std::string>());
    if (!in) throw ConfigError("config: cannot open system file '" + s.get<std::string>() + "'");
    json d;
    try {
      in >> d;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: system file is not JSON: ") + e.what());
    }
    return make_system(d);
  }
  return make_system(s);
}

State state_from(const json& c, const char* field) {
  const json& v = need(c, field);
  if (!v.is_array() || v.empty() || v.size() > 2) {
    throw ConfigError(std::string("config: '") + field + "' must be [x] or [x, y]");
  }
  State s;
  s.x = v[0].get<double>();
  if (v.size() == 2) s.y = v[1].get<double>();
  return s;
}

std::filesystem::path fresh_directory(const std::filesystem::path& root, const std::string& name) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
  const std::string base = name + "-" + stamp;
  std::filesystem::path dir = root / base;
  for (int k = 1; std::filesystem::exists(dir); ++k) dir = root / (base + "-" + std::to_string(k));
  std::filesystem::create_directories(dir);
  return dir;
}

struct Output {
  std::string csv;
  json results;
  std::string svg;
};

Output run_sieve_check(const json& c) {
  const auto limit = need(c, "limit").get<std::uint64_t>();
  const auto oracle_limit = std::min<std::uint64_t>(limit, c.value("oracle_limit", 100000));
  const MobiusTable table(limit);
  std::uint64_t mismatches = 0;
  for (std::uint64_t n = 1; n <= oracle_limit; ++n) {
    std::uint64_t k = n;
    int sign = 1;
    for (std::uint64_t p = 2; p * p <= k; ++p) {
      if (k % p) continue;
      k /= p;
      if (k % p == 0) {
        sign = 0;
        break;
      }
      sign = -sign;
    }
    if (sign != 0 && k > 1) sign = -sign;
    mismatches += sign != table.mu(n);
  }
  Output o;
  o.csv = "N,mertens,mertens_over_N\n";
  SvgSeries s{"|M(N)|/N", {}, {}};
  std::int64_t M = 0;
  std::uint64_t next = 10;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    M += table.mu(n);
    if (n == next || n == limit) {
      const double r = static_cast<double>(M) / static_cast<double>(n);
      o.csv += std::to_string(n) + "," + std::to_string(M) + "," + fmt(r) + "\n";
      s.x.push_back(static_cast<double>(n));
      s.y.push_back(std::abs(r));
      if (n == next) next *= 10;
    }
  }
  o.results = {{"limit", limit},
               {"oracle_limit", oracle_limit},
               {"mismatches", mismatches},
               {"mertens", M},
               {"primes", table.primes().size()}};
  o.svg = line_chart_svg("Mertens function", {s}, true, true);
  return o;
}

Output run_lemma54(const json& c) {
  const auto alpha = parse_alpha(need(c, "alpha").get<std::string>());
  const double tau = c.value("tau", 1.0);
  const double C = c.value("C", 1.0);
  const auto support = c.value("support", std::int64_t{200});
  const auto depth = c.value("depth", std::size_t{6});
  const auto grid = c.value("grid", std::size_t{1024});
  const auto cf = expand(alpha, depth);
  const auto res = resonance_sets(cf, tau, support);
  const auto split = split_cocycle(FourierCocycle::envelope(C, tau, support), cf, res);
  const auto rep = block_estimate_check(split.h1, cf, res, grid);
  Output o;
  o.csv = "t,q_t,deviation,bound_power,ratio\n";
  SvgSeries s{"deviation / bound", {}, {}};
  json rows = json::array();
  for (const auto& r : rep.rows) {
    o.csv += std::to_string(r.t) + "," + r.q_t.get_str() + "," + fmt(static_cast<double>(r.deviation)) +
             "," + fmt(static_cast<double>(r.bound_power)) + "," + fmt(r.ratio) + "\n";
    s.x.push_back(r.q_t.get_d());
    s.y.push_back(r.ratio);
    rows.push_back({{"t", r.t}, {"q_t", r.q_t.get_str()}, {"ratio", r.ratio}});
  }
  json E = res.E;
  o.results = {{"E", E},
               {"M_size", res.M.size()},
               {"rows", rows},
               {"max_ratio", rep.max_ratio},
               {"small_denominator_checks", split.checks.size()},
               {"warnings", rep.warnings}};
  o.svg = line_chart_svg("Block estimate ratio", {s}, true, true);
  return o;
}

Output run_covering_profile(const json& c, std::uint64_t seed) {
  auto sys = std::make_shared<const SystemInstance>(system_from(c));
  const auto eps = need(c, "eps").get<std::vector<double>>();
  const auto ns = need(c, "ns").get<std::vector<std::uint64_t>>();
  const auto samples = c.value("samples", std::size_t{500});
  const double tau = c.value("tau", 1.0);
  const auto cloud = OrbitCloud::sample(sys, samples, seed);
  const auto profiles = complexity_profile(cloud, eps, ns, tau);
  Output o;
  o.csv = "epsilon,n,Sn,method,covered_mass\n";
  std::vector<SvgSeries> series;
  json per = json::array();
  for (const auto& p : profiles) {
    SvgSeries s{"eps=" + fmt_short(p.epsilon), {}, {}};
    for (const auto& r : p.rows) {
      o.csv += fmt(p.epsilon) + "," + std::to_string(r.n) + "," + std::to_string(r.S) + "," +
               to_string(r.method) + "," + fmt(r.covered_mass) + "\n";
      s.x.push_back(static_cast<double>(r.n));
      s.y.push_back(static_cast<double>(r.S));
    }
    series.push_back(std::move(s));
    per.push_back({{"epsilon", p.epsilon},
                   {"classification", to_string(p.classification)},
                   {"polynomial_exponent", p.polynomial.slope},
                   {"exponential_rate", p.exponential.slope},
                   {"liminf_readout", p.liminf_readout},
                   {"note", p.note}});
  }
  o.results = {{"provenance", cloud.provenance}, {"profiles", per}, {"warnings", sys->warnings}};
  o.svg = line_chart_svg("Covering numbers S_n", series, true, true);
  return o;
}

Output run_correlation(const json& c) {
  const auto sys = system_from(c);
  const auto f = Observable::from_json(need(c, "observable"));
  const State x0 = state_from(c, "x0");
  const auto cps = need(c, "checkpoints").get<std::vector<std::uint64_t>>();
  if (cps.empty()) throw ConfigError("config: 'checkpoints' must not be empty");
  const MobiusTable table(cps.back());
  const auto series = correlation_sum(table, sys, f, x0, cps);
  Output o;
  o.csv = "N,re,im,abs\n";
  SvgSeries s{"|correlation|", {}, {}};
  json vals = json::array();
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const auto v = series.values[i];
    o.csv += std::to_string(cps[i]) + "," + fmt(v.real()) + "," + fmt(v.imag()) + "," +
             fmt(std::abs(v)) + "\n";
    s.x.push_back(static_cast<double>(cps[i]));
    s.y.push_back(std::abs(v));
    vals.push_back({{"N", cps[i]}, {"abs", std::abs(v)}});
  }
  o.results = {{"values", vals}, {"sup_f", f.sup_bound()}, {"warnings", sys.warnings}};
  o.svg = line_chart_svg("Mobius correlation decay", {s}, true, true);
  return o;
}

Output run_mrt_bilinear(const json& c) {
  const auto Ns = need(c, "N").get<std::vector<std::uint64_t>>();
  const auto L = need(c, "L").get<std::uint64_t>();
  if (Ns.empty()) throw ConfigError("config: 'N' must not be empty");
  const bool ladder = c.contains("P1") || c.contains("Q1");
  const std::uint64_t top = *std::max_element(Ns.begin(), Ns.end());
  const MobiusTable table(top + L);
  Output o;
  o.csv = "N,L,bilinear_avg,complement_ratio\n";
  SvgSeries s{"bilinear average", {}, {}};
  json rows = json::array();
  for (std::uint64_t N : Ns) {
    double avg, ratio = 0.0;
    if (ladder) {
      const auto N0 = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(N))));
      const auto lad = build_ladder(need(c, "P1").get<double>(), need(c, "Q1").get<double>(), N0, N);
      avg = bilinear_mobius_average(table, &lad, N, L);
      ratio = complement_density(lad, table).complement_ratio;
    } else {
      avg = bilinear_mobius_average(table, nullptr, N, L);
    }
    o.csv += std::to_string(N) + "," + std::to_string(L) + "," + fmt(avg) + "," + fmt(ratio) + "\n";
    s.x.push_back(static_cast<double>(N));
    s.y.push_back(avg);
    rows.push_back({{"N", N}, {"L", L}, {"bilinear_avg", avg}, {"complement_ratio", ratio}});
  }
  o.results = {{"rows", rows}, {"restricted_to_typical_set", ladder}};
  o.svg = line_chart_svg("Bilinear Mobius average", {s}, true, true);
  return o;
}

Output run_block_trace(const json& c, std::uint64_t seed) {
  const auto sys = system_from(c);
  const auto f = Observable::from_json(need(c, "observable"));
  const State x0 = state_from(c, "x0");
  const auto L = need(c, "L").get<std::uint64_t>();
  const double delta = need(c, "delta").get<double>();
  const double eps = need(c, "epsilon").get<double>();
  const auto N = need(c, "N").get<std::uint64_t>();
  BlockTraceOptions opt;
  opt.samples = c.value("samples", opt.samples);
  opt.D = c.value("D", opt.D);
  opt.seed = seed;
  const MobiusTable table(N + L);
  const auto tr = block_decomposition_trace(table, sys, f, x0, L, delta, eps, N, opt);
  Output o;
  o.csv = "claim,observed,claimed,within\n";
  SvgSeries obs{"observed", {}, {}}, cl{"claimed", {}, {}};
  for (std::size_t i = 0; i < tr.claims.size(); ++i) {
    const auto& r = tr.claims[i];
    o.csv += "\"" + r.name + "\"," + fmt(r.observed) + "," + fmt(r.claimed) + "," +
             (r.within ? "true" : "false") + "\n";
    obs.x.push_back(static_cast<double>(i + 1));
    obs.y.push_back(r.observed);
    cl.x.push_back(static_cast<double>(i + 1));
    cl.y.push_back(r.claimed);
  }
  o.results = to_json(tr);
  o.svg = line_chart_svg("Block trace: observed vs claimed", {obs, cl}, false, true);
  return o;
}

}  // namespace

RunReport run_experiment(const json& config, const std::filesystem::path& out_root) {
  if (!config.is_object()) throw ConfigError("config: expected a JSON object\n" + experiment_schema());
  const json& name_j = need(config, "experiment");
  if (!name_j.is_string()) throw ConfigError("config: 'experiment' must be a string\n" + experiment_schema());
  const std::string name = name_j.get<std::string>();
  const auto seed = config.value("seed", std::uint64_t{1});
  Output out;
  try {
    if (name == "sieve-check") {
      out = run_sieve_check(config);
    } else if (name == "lemma54") {
      out = run_lemma54(config);
    } else if (name == "covering-profile") {
      out = run_covering_profile(config, seed);
    } else if (name == "correlation") {
      out = run_correlation(config);
    } else if (name == "mrt-bilinear") {
      out = run_mrt_bilinear(config);
    } else if (name == "block-trace") {
      out = run_block_trace(config, seed);
    } else {
      throw ConfigError("config: unknown experiment '" + name + "'\n" + experiment_schema());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: malformed field: ") + e.what() + "\n" + experiment_schema());
  }

  RunReport rep;
  rep.summary = {{"experiment", name},
                 {"seed", seed},
                 {"parameters", config},
                 {"version", code_version()},
                 {"results", out.results}};
  rep.directory = fresh_directory(out_root, name);
  auto write = [&](const std::string& file, const std::string& text) {
    std::ofstream os(rep.directory / file, std::ios::binary);
    os << text;
    if (!os) throw Error("could not write " + (rep.directory / file).string());
    rep.files.push_back(file);
  };
  write("series.csv", out.csv);
  write("summary.json", rep.summary.dump(2) + "\n");
  write("plot.svg", out.svg);
  return rep;
}

}  // namespace moeb
