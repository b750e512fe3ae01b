#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace moeb {

/// Representative of x mod 1 in [0, 1).
inline long double wrap01(long double x) {
  long double r = x - std::floor(x);
  return r >= 1.0L ? 0.0L : r;
}

/// ||a - b||, the distance on R/Z.
inline double circle_dist(long double a, long double b) {
  const long double d = wrap01(a - b);
  return static_cast<double>(d > 0.5L ? 1.0L - d : d);
}

/// e(t) = exp(2 pi i t). The argument is reduced mod 1 in extended
/// precision; the trig call itself runs in double.
inline std::complex<long double> e_turns(long double t) {
  const double a = 2.0 * std::numbers::pi * static_cast<double>(wrap01(t));
  return {std::cos(a), std::sin(a)};
}

}  // namespace moeb
