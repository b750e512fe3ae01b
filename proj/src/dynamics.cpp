#include "moeb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "moeb/circle.hpp"
#include "moeb/errors.hpp"

namespace moeb {

namespace {

using nlohmann::json;

const json& require(const json& d, const char* field) {
  if (!d.is_object() || !d.contains(field)) {
    throw ConfigError(std::string("system descriptor: missing field '") + field + "'");
  }
  return d.at(field);
}

ExactAlpha alpha_field(const json& d, const char* field = "alpha") {
  const json& a = require(d, field);
  if (!a.is_string()) {
    throw ConfigError(std::string("system descriptor: '") + field +
                      "' must be an exact string such as \"sqrt2-1\" or \"2/7\"");
  }
  return parse_alpha(a.get<std::string>());
}

std::vector<FourierTerm> terms_field(const json& d, const char* field = "h") {
  const json& h = require(d, field);
  if (!h.is_array()) throw ConfigError(std::string("system descriptor: '") + field + "' must be a list");
  std::vector<FourierTerm> terms;
  for (const auto& row : h) {
    if (!row.is_array() || row.size() < 2 || row.size() > 3) {
      throw ConfigError(std::string("system descriptor: '") + field + "' rows must be [m, re, im]");
    }
    const double im = row.size() == 3 ? row[2].get<double>() : 0.0;
    terms.push_back({row[0].get<std::int64_t>(), {row[1].get<double>(), im}});
  }
  return terms;
}

double wrap(long double v) { return static_cast<double>(wrap01(v)); }

void warn_if_rational(SystemInstance& s, const ExactAlpha& a) {
  if (a.is_rational()) {
    s.warnings.push_back("alpha = " + a.describe() +
                         " is rational; the zero-entropy theorems here assume irrational alpha");
  }
}

}  // namespace

State SystemInstance::iterate(State s, std::uint64_t n) const {
  for (std::uint64_t i = 0; i < n; ++i) s = step(s);
  return s;
}

double torus_sup_metric(const State& a, const State& b) {
  return std::max(circle_dist(a.x, b.x), circle_dist(a.y, b.y));
}

double shift_metric(const State& a, const State& b) {
  for (std::size_t i = 0; i < a.word.size(); ++i)
    if (a.word[i] != b.word[i]) return std::ldexp(1.0, -static_cast<int>(i));
  return 0.0;
}

SystemInstance make_rotation(const ExactAlpha& alpha) {
  SystemInstance s;
  s.kind = SystemKind::Rotation;
  s.space = StateSpace::Circle;
  s.metric_kind = MetricKind::Circle;
  s.alpha = alpha;
  s.alpha_value = wrap01(centered_frac(alpha, 1).value);
  const long double a = s.alpha_value;
  s.step = [a](const State& p) {
    State q = p;
    q.x = wrap(p.x + a);
    return q;
  };
  s.metric = [](const State& p, const State& q) { return circle_dist(p.x, q.x); };
  s.sampler_tag = "haar";
  s.sample = [](std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<State> out(count);
    for (auto& p : out) p.x = u(rng);
    return out;
  };
  s.descriptor = {{"kind", "rotation"}, {"alpha", alpha.describe()}};
  warn_if_rational(s, alpha);
  return s;
}

SystemInstance make_skew(const ExactAlpha& alpha, const FourierCocycle& h,
                         const std::string& sampler, std::optional<std::array<double, 2>> orbit_start) {
  if (sampler != "haar" && sampler != "orbit") {
    throw ConfigError("system descriptor: 'sampler' must be \"haar\" or \"orbit\"");
  }
  SystemInstance s;
  s.kind = SystemKind::Skew2;
  s.space = StateSpace::Torus2;
  s.metric_kind = MetricKind::TorusSup;
  s.alpha = alpha;
  s.alpha_value = wrap01(centered_frac(alpha, 1).value);
  s.h = h;
  const long double a = s.alpha_value;
  auto hp = std::make_shared<const FourierCocycle>(h);
  s.step = [a, hp](const State& p) {
    State q = p;
    q.y = wrap(p.y + (*hp)(p.x));
    q.x = wrap(p.x + a);
    return q;
  };
  s.metric = torus_sup_metric;
  s.sampler_tag = sampler;
  if (sampler == "haar") {
    s.sample = [](std::size_t count, std::uint64_t seed) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::vector<State> out(count);
      for (auto& p : out) {
        p.x = u(rng);
        p.y = u(rng);
      }
      return out;
    };
  } else {
    auto step = s.step;
    s.sample = [step, orbit_start](std::size_t count, std::uint64_t seed) {
      State p;
      if (orbit_start) {
        p.x = (*orbit_start)[0];
        p.y = (*orbit_start)[1];
      } else {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        p.x = u(rng);
        p.y = u(rng);
      }
      for (std::uint64_t i = 0; i < kOrbitBurnIn; ++i) p = step(p);
      std::vector<State> out;
      out.reserve(count);
      for (std::size_t k = 0; k < count; ++k) {
        out.push_back(p);
        for (std::uint64_t i = 0; i < kOrbitStride; ++i) p = step(p);
      }
      return out;
    };
  }
  json hj = json::array();
  for (const auto& t : h.terms()) hj.push_back({t.m, t.c.real(), t.c.imag()});
  s.descriptor = {{"kind", "skew2"}, {"alpha", alpha.describe()}, {"h", hj},
                  {"tau", h.tau()}, {"sampler", sampler}};
  warn_if_rational(s, alpha);
  return s;
}

SystemInstance make_group_skew(std::uint64_t order, std::uint64_t a, std::vector<double> table) {
  if (order == 0) throw ConfigError("system descriptor: 'order' must be >= 1");
  if (table.size() != order) {
    throw ConfigError("system descriptor: 'h' must list " + std::to_string(order) + " values");
  }
  SystemInstance s;
  s.kind = SystemKind::GroupSkew;
  s.space = StateSpace::GroupCircle;
  s.metric_kind = MetricKind::TorusSup;
  s.group_order = order;
  s.group_table = table;
  a %= order;
  s.alpha_value = static_cast<long double>(a) / static_cast<long double>(order);
  auto tp = std::make_shared<const std::vector<double>>(std::move(table));
  s.step = [order, a, tp](const State& p) {
    const auto k = static_cast<std::uint64_t>(std::llround(p.x * static_cast<double>(order))) % order;
    State q = p;
    q.y = wrap(p.y + (*tp)[k]);
    q.x = static_cast<double>((k + a) % order) / static_cast<double>(order);
    return q;
  };
  s.metric = torus_sup_metric;
  s.sampler_tag = "haar";
  s.sample = [order](std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> k(0, order - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<State> out(count);
    for (auto& p : out) {
      p.x = static_cast<double>(k(rng)) / static_cast<double>(order);
      p.y = u(rng);
    }
    return out;
  };
  s.descriptor = {{"kind", "group_skew"}, {"order", order}, {"a", a}, {"h", *tp}};
  return s;
}

SystemInstance make_shift(std::vector<double> weights) {
  if (weights.empty() || weights.size() > 16) {
    throw ConfigError("system descriptor: 'weights' must list 1 to 16 probabilities");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("system descriptor: 'weights' must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("system descriptor: 'weights' must sum to 1");
  SystemInstance s;
  s.kind = SystemKind::Shift;
  s.space = StateSpace::Shift;
  s.metric_kind = MetricKind::Shift;
  s.shift_weights = weights;
  // The window keeps 64 symbols; a step drops the first and pads with 0.
  s.step = [](const State& p) {
    State q = p;
    std::copy(p.word.begin() + 1, p.word.end(), q.word.begin());
    q.word.back() = 0;
    return q;
  };
  s.metric = shift_metric;
  s.sampler_tag = "bernoulli";
  s.sample = [weights](std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    std::vector<State> out(count);
    for (auto& p : out)
      for (auto& c : p.word) c = static_cast<std::uint8_t>(pick(rng));
    return out;
  };
  s.descriptor = {{"kind", "shift"}, {"weights", weights}};
  return s;
}

SystemInstance make_system(const json& d) {
  const json& kind_j = require(d, "kind");
  if (!kind_j.is_string()) throw ConfigError("system descriptor: 'kind' must be a string");
  const std::string kind = kind_j.get<std::string>();
  try {
    if (kind == "rotation") return make_rotation(alpha_field(d));
    if (kind == "skew2") {
      const double tau = d.value("tau", 1.0);
      const auto h = FourierCocycle::from_terms(terms_field(d), tau);
      std::optional<std::array<double, 2>> x0;
      if (d.contains("x0")) x0 = d.at("x0").get<std::array<double, 2>>();
      return make_skew(alpha_field(d), h, d.value("sampler", std::string("haar")), x0);
    }
    if (kind == "group_skew") {
      if (d.contains("order")) {
        const auto order = require(d, "order").get<std::uint64_t>();
        const auto a = require(d, "a").get<std::uint64_t>();
        return make_group_skew(order, a, require(d, "h").get<std::vector<double>>());
      }
      const double tau = d.value("tau", 1.0);
      auto s = make_skew(alpha_field(d), FourierCocycle::from_terms(terms_field(d), tau),
                         d.value("sampler", std::string("haar")));
      s.kind = SystemKind::GroupSkew;
      s.space = StateSpace::GroupCircle;
      s.descriptor["kind"] = "group_skew";
      return s;
    }
    if (kind == "shift") return make_shift(require(d, "weights").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("system descriptor: malformed field: ") + e.what());
  }
  throw ConfigError("system descriptor: unknown kind '" + kind +
                    "' (expected rotation, skew2, group_skew or shift)");
}

double FunctionFamilyMetric::operator()(const State& a, const State& b) const {
  double s = 0.0;
  for (std::size_t l = 0; l < functions.size(); ++l) {
    const double w = std::ldexp(1.0, -static_cast<int>(l + 1)) / (2.0 * sup_norms[l] + 1.0);
    s += std::abs(functions[l](a) - functions[l](b)) * w;
  }
  return s;
}

double FunctionFamilyMetric::truncation_slack() const {
  return std::ldexp(1.0, -static_cast<int>(functions.size()));
}

FunctionFamilyMetric function_family_metric(
    std::vector<std::function<std::complex<double>(const State&)>> functions,
    std::vector<double> sup_norms, std::size_t L_max) {
  if (L_max == 0) throw DomainError("function_family_metric: L_max must be >= 1");
  if (functions.size() < L_max || sup_norms.size() < L_max) {
    throw DomainError("function_family_metric: fewer than L_max functions or norms");
  }
  functions.resize(L_max);
  sup_norms.resize(L_max);
  for (double n : sup_norms)
    if (!std::isfinite(n) || n < 0.0) throw DomainError("function_family_metric: bad sup-norm");
  return {std::move(functions), std::move(sup_norms)};
}

SystemInstance conjugate_system(const SystemInstance& system, StepFn pi, StepFn pi_inverse,
                                MetricFn metric, std::size_t check_samples, double tol,
                                std::uint64_t seed) {
  double worst = 0.0;
  for (const State& s : system.sample(check_samples, seed)) {
    worst = std::max(worst, system.metric(pi_inverse(pi(s)), s));
    const State t = pi(s);
    worst = std::max(worst, metric(pi(pi_inverse(t)), t));
  }
  if (!(worst <= tol)) {
    throw ConjugacyError("conjugate_system: pi and pi_inverse disagree by " +
                         std::to_string(worst) + " (tolerance " + std::to_string(tol) + ")");
  }
  SystemInstance out = system;
  out.metric_kind = MetricKind::Generic;
  out.metric = std::move(metric);
  const StepFn inner = system.step;
  out.step = [pi, pi_inverse, inner](const State& s) { return pi(inner(pi_inverse(s))); };
  const SamplerFn base = system.sample;
  out.sample = [pi, base](std::size_t count, std::uint64_t sd) {
    auto pts = base(count, sd);
    for (auto& p : pts) p = pi(p);
    return pts;
  };
  out.sampler_tag = "pushforward";
  out.descriptor["conjugated"] = true;
  return out;
}

}  // namespace moeb
