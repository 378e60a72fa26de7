#include "socnav/erf.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace socnav {
namespace {

constexpr double kTwoOverSqrtPi = 1.1283791670955126;  // 2/sqrt(pi)

// Maclaurin series: erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1)).
// Converges to double precision for |x| <= ~3 well before the term cap.
double erf_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 80; ++n) {
    term *= -x2 / n;
    const double contrib = term / (2 * n + 1);
    sum += contrib;
    if (std::fabs(contrib) < 1e-18 * std::fabs(sum)) break;
  }
  return kTwoOverSqrtPi * sum;
}

// Continued fraction for erfc(x), x > 0 (Lentz's method):
// erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + 1/2/(x + 1/(x + 3/2/(x + ...))))
double erfc_cf(double x) {
  const double tiny = 1e-300;
  double f = x;
  double c = f;
  double d = 0.0;
  for (int n = 1; n < 200; ++n) {
    const double a = 0.5 * n;
    // b coefficients alternate implicitly through the recurrence below.
    d = x + a * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-x * x) / std::sqrt(M_PI) / f;
}

// Central rational approximation for the inverse (|y| <= ~0.9), used only as
// the Newton starting point, so modest accuracy suffices.
double erf_inv_guess(double y) {
  const double ay = std::fabs(y);
  if (ay <= 0.7) {
    const double z = y * y;
    const double num = y * (((-0.140543331 * z + 0.914624893) * z - 1.645349621) * z + 0.886226899);
    const double den = (((0.012229801 * z - 0.329097515) * z + 1.442710462) * z - 2.118377725) * z + 1.0;
    return num / den;
  }
  // Tail: x ~ sqrt(-log((1-|y|)/2)) based expansion.
  const double z = std::sqrt(-std::log((1.0 - ay) / 2.0));
  const double num = ((1.641345311 * z + 3.429567803) * z - 1.62490649) * z - 1.970840454;
  const double den = (1.637067800 * z + 3.543889200) * z + 1.0;
  const double x = num / den;
  return y < 0 ? -x : x;
}

}  // namespace

double erf(double x) {
  if (std::isnan(x)) return x;
  const double ax = std::fabs(x);
  if (ax <= 2.7) return erf_series(x);
  if (ax > 6.5) return x > 0 ? 1.0 : -1.0;
  const double tail = erfc_cf(ax);
  return x > 0 ? 1.0 - tail : tail - 1.0;
}

double erfc(double x) {
  if (x > 2.7) return x > 27.0 ? 0.0 : erfc_cf(x);
  return 1.0 - erf(x);
}

double erf_inv(double y) {
  if (!(std::fabs(y) < 1.0)) {
    throw std::domain_error("erf_inv: argument must lie in (-1, 1)");
  }
  if (y == 0.0) return 0.0;

  double x = erf_inv_guess(y);
  // Newton: f(x) = erf(x) - y, f'(x) = 2/sqrt(pi) exp(-x^2).
  for (int it = 0; it < 8; ++it) {
    const double err = erf(x) - y;
    const double deriv = kTwoOverSqrtPi * std::exp(-x * x);
    if (deriv <= std::numeric_limits<double>::min()) break;
    const double step = err / deriv;
    x -= step;
    if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(x))) break;
  }
  return x;
}

}  // namespace socnav
