// Special-function evaluation: erf by Taylor series for small arguments and
// a continued-fraction complement beyond, artanh via the logarithm.

#pragma once

#include <cmath>
#include <stdexcept>

namespace symred {

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace specfun {

inline constexpr double two_over_sqrt_pi = 1.1283791670955126;

// erf(x) = 2/sqrt(pi) * sum_{n>=0} (-1)^n x^(2n+1) / (n! (2n+1)), |x| small.
inline double erf_series(double x) {
  double term = x;  // x^(2n+1)/n!
  double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x * x / n;
    double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-18 * std::fabs(sum) + 1e-300) break;
  }
  return two_over_sqrt_pi * sum;
}

// erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + 1/2/(x + 2/2/(x + 3/2/(x + ...))))
// for x > 0, evaluated by the modified Lentz algorithm.
inline double erfc_cf(double x) {
  const double tiny = 1e-300;
  double b = x, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int n = 1; n < 300; ++n) {
    double an = n / 2.0;
    b = x;  // denominators alternate x, x, ... with a_n = n/2
    d = 1.0 / (b + an * d);
    c = b + an / c;
    if (c == 0) c = tiny;
    double delta = c * d;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-x * x) / std::sqrt(M_PI) * h;
}

}  // namespace specfun

inline double erf(double x) {
  if (std::fabs(x) <= 1.5) return specfun::erf_series(x);
  double e = 1.0 - specfun::erfc_cf(std::fabs(x));
  return x > 0 ? e : -e;
}

inline double erfc(double x) {
  if (x < -1.5) return 2.0 - specfun::erfc_cf(-x);
  if (x <= 1.5) return 1.0 - specfun::erf_series(x);
  return specfun::erfc_cf(x);
}

inline double artanh(double x) {
  if (!(std::fabs(x) < 1.0)) throw NumericError("artanh: argument outside (-1, 1)");
  return 0.5 * std::log((1.0 + x) / (1.0 - x));
}

}  // namespace symred
