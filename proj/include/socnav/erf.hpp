#pragma once

namespace socnav {

/// Error function evaluated in-repo (Maclaurin series for small arguments,
/// continued-fraction complement for the tails). Matches std::erf to double
/// rounding but carries its own implementation so the inverse below is
/// self-contained.
double erf(double x);

/// Complementary error function, same evaluation scheme.
double erfc(double x);

/// Inverse error function on (-1, 1): returns x with erf(x) = y.
/// Rational initial guess refined by Newton steps against the in-repo erf.
/// Throws std::domain_error for |y| >= 1.
double erf_inv(double y);

}  // namespace socnav
