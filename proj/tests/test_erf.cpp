#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "socnav/erf.hpp"
#include "socnav/rng.hpp"

namespace {

// Independent oracle: Simpson's rule on the defining integral
// erf(x) = 2/sqrt(pi) * int_0^x exp(-t^2) dt. Fourth-order accurate, so a
// few thousand panels push the quadrature error far below 1e-12.
double erf_quadrature(double x, int panels = 20000) {
  const double h = x / panels;
  auto f = [](double t) { return std::exp(-t * t); };
  double sum = f(0.0) + f(x);
  for (int i = 1; i < panels; ++i) {
    sum += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return 2.0 / std::sqrt(M_PI) * sum * h / 3.0;
}

// Independent oracle for the inverse: bisection on std::erf.
double erf_inv_bisect(double y) {
  double lo = -7.0, hi = 7.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erf(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("erf") {

TEST_CASE("erf matches the stdlib across series and tail regimes") {
  for (double x = -6.5; x <= 6.5; x += 1.0 / 64.0) {
    CHECK(std::abs(socnav::erf(x) - std::erf(x)) <= 1e-13);
  }
  // Regime boundary (series hands over to the continued fraction at 2.7).
  for (double x : {2.69, 2.70, 2.71, -2.69, -2.71}) {
    CHECK(std::abs(socnav::erf(x) - std::erf(x)) <= 1e-14);
  }
}

TEST_CASE("erf agrees with direct quadrature of its defining integral") {
  for (double x : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0}) {
    CHECK(std::abs(socnav::erf(x) - erf_quadrature(x)) <= 1e-12);
  }
}

TEST_CASE("erf identities: odd symmetry, erf + erfc = 1, saturation") {
  CHECK(socnav::erf(0.0) == 0.0);
  for (double x = 0.125; x <= 5.0; x += 0.125) {
    CHECK(socnav::erf(-x) == -socnav::erf(x));  // series/tail are sign-symmetric
    CHECK(std::abs(socnav::erf(x) + socnav::erfc(x) - 1.0) <= 1e-14);
  }
  CHECK(socnav::erf(10.0) == 1.0);
  CHECK(socnav::erf(-10.0) == -1.0);
  CHECK(socnav::erfc(30.0) == 0.0);
}

TEST_CASE("erfc keeps relative accuracy in the deep tail") {
  for (double x : {3.0, 4.0, 5.0, 6.0, 8.0}) {
    const double want = std::erfc(x);
    CHECK(std::abs(socnav::erfc(x) - want) <= 1e-12 * want);
  }
}

TEST_CASE("erf_inv round-trips on the fine grid") {
  // 1999 evenly spaced points covering (-0.999, 0.999).
  for (int i = 0; i < 1999; ++i) {
    const double y = -0.999 + 0.001 * i;
    const double x = socnav::erf_inv(y);
    CHECK(std::abs(socnav::erf(x) - y) < 1e-10);
  }
  CHECK(socnav::erf_inv(0.0) == 0.0);
}

TEST_CASE("erf_inv reference values") {
  // erf(1) = 0.8427007929497149, so the inverse of that is 1.
  CHECK(std::abs(socnav::erf_inv(0.8427007929) - 1.0) <= 1e-8);
  CHECK(std::abs(socnav::erf_inv(0.8) - 0.9061938024) <= 1e-6);
}

TEST_CASE("erf_inv matches bisection on the stdlib erf") {
  socnav::Rng rng(7);
  for (int i = 0; i < 300; ++i) {
    const double y = rng.uniform(-0.9999, 0.9999);
    const double want = erf_inv_bisect(y);
    CHECK(std::abs(socnav::erf_inv(y) - want) <=
          1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("erf_inv stays accurate close to the domain ends") {
  for (double y : {0.99999, -0.99999, 0.9999999, -0.9999999}) {
    const double x = socnav::erf_inv(y);
    CHECK(std::abs(socnav::erf(x) - y) <= 1e-10);
  }
}

TEST_CASE("erf_inv rejects arguments outside (-1, 1)") {
  CHECK_THROWS_AS(socnav::erf_inv(1.0), std::domain_error);
  CHECK_THROWS_AS(socnav::erf_inv(-1.0), std::domain_error);
  CHECK_THROWS_AS(socnav::erf_inv(1.5), std::domain_error);
  CHECK_THROWS_AS(socnav::erf_inv(-2.0), std::domain_error);
}

}  // TEST_SUITE
