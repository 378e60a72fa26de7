#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "socnav/constraints.hpp"
#include "socnav/erf.hpp"
#include "socnav/rng.hpp"
#include "test_util.hpp"

using namespace socnav;
using testing::random_psd;

namespace {

GaussianStep make_step(const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov) {
  GaussianStep s;
  s.mean = mean;
  s.cov = cov;
  return s;
}

Eigen::Matrix2d rotation(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

}  // namespace

TEST_SUITE("constraints") {

TEST_CASE("eigendecompose_2x2 on a diagonal matrix") {
  const auto d = eigendecompose_2x2(Eigen::Vector2d(4.0, 1.0).asDiagonal());
  CHECK(d.lambda1 == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(d.lambda2 == doctest::Approx(1.0).epsilon(1e-12));
  // Columns are +-unit axes; compare up to sign.
  CHECK(std::abs(std::abs(d.rotation(0, 0)) - 1.0) <= 1e-12);
  CHECK(std::abs(std::abs(d.rotation(1, 1)) - 1.0) <= 1e-12);
  CHECK(std::abs(d.rotation(1, 0)) <= 1e-12);
  CHECK(std::abs(d.rotation(0, 1)) <= 1e-12);
}

TEST_CASE("eigendecompose_2x2 on the hand-solvable coupled matrix") {
  // [[2,1],[1,2]] has eigenpairs (3, (1,1)/sqrt(2)) and (1, (1,-1)/sqrt(2)).
  Eigen::Matrix2d sigma;
  sigma << 2.0, 1.0, 1.0, 2.0;
  const auto d = eigendecompose_2x2(sigma);
  CHECK(d.lambda1 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(d.lambda2 == doctest::Approx(1.0).epsilon(1e-12));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(d.rotation.col(0).dot(Eigen::Vector2d(s, s))) - 1.0) <= 1e-12);
  CHECK(std::abs(std::abs(d.rotation.col(1).dot(Eigen::Vector2d(s, -s))) - 1.0) <= 1e-12);
}

TEST_CASE("eigendecompose_2x2 on the zero matrix") {
  const auto d = eigendecompose_2x2(Eigen::Matrix2d::Zero());
  CHECK(d.lambda1 == 0.0);
  CHECK(d.lambda2 == 0.0);
  CHECK(d.rotation.isApprox(Eigen::Matrix2d::Identity(), 1e-12));
}

TEST_CASE("eigendecomposition reconstructs random PSD matrices") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Matrix2d sigma = random_psd(rng, rng.uniform(0.05, 3.0));
    const auto d = eigendecompose_2x2(sigma);
    CHECK(d.lambda1 >= d.lambda2);
    CHECK(d.lambda2 >= 0.0);
    const Eigen::Matrix2d q = d.rotation;
    CHECK((q.transpose() * q - Eigen::Matrix2d::Identity()).norm() <= 1e-10);
    const Eigen::Matrix2d rebuilt =
        q * Eigen::Vector2d(d.lambda1, d.lambda2).asDiagonal() * q.transpose();
    CHECK((rebuilt - sigma).norm() <= 1e-10 * std::max(1.0, sigma.norm()));
    // Cross-check the spectrum against Eigen's solver.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> ref(sigma);
    CHECK(d.lambda2 == doctest::Approx(ref.eigenvalues()(0)).epsilon(1e-10));
    CHECK(d.lambda1 == doctest::Approx(ref.eigenvalues()(1)).epsilon(1e-10));
  }
}

TEST_CASE("eigendecompose_2x2 rejects bad matrices, clamps tiny negatives") {
  Eigen::Matrix2d asym;
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(eigendecompose_2x2(asym), std::domain_error);
  CHECK_THROWS_AS(eigendecompose_2x2(Eigen::Vector2d(1.0, -1.0).asDiagonal()),
                  std::domain_error);
  // An eigenvalue inside the -1e-12 tolerance is clamped to zero.
  const auto d = eigendecompose_2x2(Eigen::Vector2d(1.0, -1e-13).asDiagonal());
  CHECK(d.lambda2 == 0.0);
}

TEST_CASE("bounding_radius worked examples") {
  SafetyGeometry geom;
  geom.ped_radius = 0.15;
  CHECK(bounding_radius(Eigen::Matrix2d::Zero(), geom) == doctest::Approx(0.15));
  CHECK(bounding_radius(Eigen::Vector2d(0.04, 0.01).asDiagonal(), geom) ==
        doctest::Approx(0.35).epsilon(1e-12));
  SafetyGeometry point;
  point.ped_radius = 0.0;
  Eigen::Matrix2d sigma;
  sigma << 2.0, 1.0, 1.0, 2.0;
  CHECK(bounding_radius(sigma, point) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("bounding_radius is rotation invariant") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Matrix2d sigma = random_psd(rng, 1.5);
    const Eigen::Matrix2d r = rotation(rng.uniform(-M_PI, M_PI));
    Eigen::Matrix2d rotated = r * sigma * r.transpose();
    rotated(0, 1) = rotated(1, 0) = 0.5 * (rotated(0, 1) + rotated(1, 0));
    SafetyGeometry geom;
    CHECK(bounding_radius(rotated, geom) ==
          doctest::Approx(bounding_radius(sigma, geom)).epsilon(1e-9));
  }
}

TEST_CASE("hard_residual worked examples") {
  // r_o + r_th = 0.5 realized as a0 = 0.2, r_o = 0.3, zero covariance.
  SafetyGeometry geom;
  geom.ped_radius = 0.2;
  geom.robot_radius = 0.3;
  const auto step = make_step({1.0, 0.0}, Eigen::Matrix2d::Zero());
  CHECK(hard_residual({0.0, 0.0}, step, geom) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(hard_residual({1.0, 0.0}, step, geom) == doctest::Approx(-0.5).epsilon(1e-12));

  SafetyGeometry g2;
  g2.ped_radius = 0.15;
  g2.robot_radius = 0.3;
  const auto s2 = make_step({0.0, 0.0}, Eigen::Vector2d(0.04, 0.01).asDiagonal());
  CHECK(hard_residual({1.0, 0.0}, s2, g2) == doctest::Approx(0.35).epsilon(1e-12));
}

TEST_CASE("margin shifts the hard residual by exactly its value") {
  SafetyGeometry geom;
  SafetyGeometry padded = geom;
  padded.margin = 0.1;
  const auto step = make_step({2.0, 1.0}, Eigen::Matrix2d::Identity() * 0.02);
  const Eigen::Vector2d p(0.3, -0.4);
  CHECK(hard_residual(p, step, padded) ==
        doctest::Approx(hard_residual(p, step, geom) - 0.1).epsilon(1e-12));
}

TEST_CASE("chance_residual reduces to the hard residual at zero covariance") {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    SafetyGeometry geom;
    geom.margin = rng.uniform(0.0, 0.2);
    const Eigen::Vector2d mu(rng.uniform(-3, 3), rng.uniform(-3, 3));
    const double ang = rng.uniform(-M_PI, M_PI);
    const Eigen::Vector2d p =
        mu + rng.uniform(0.05, 4.0) * Eigen::Vector2d(std::cos(ang), std::sin(ang));
    const auto step = make_step(mu, Eigen::Matrix2d::Zero());
    const double delta = rng.uniform(0.01, 0.5);
    // Zero covariance: r_th collapses to a0, the erf term vanishes.
    CHECK(std::abs(chance_residual(p, step, delta, geom) - hard_residual(p, step, geom)) <=
          1e-12);
  }
}

TEST_CASE("chance_residual tightening vanishes at delta = 0.5") {
  SafetyGeometry geom;
  const auto step = make_step({0.0, 0.0}, Eigen::Matrix2d::Identity() * 0.3);
  const Eigen::Vector2d p(1.2, -0.7);
  const double expected = p.norm() - (geom.robot_radius + geom.ped_radius);
  CHECK(chance_residual(p, step, 0.5, geom) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("chance_residual closed form under isotropic covariance") {
  // kappa^T Sigma kappa = sigma^2 for any direction, so the tightening is
  // direction independent: sqrt(2 sigma^2) erf_inv(1 - 2 delta).
  SafetyGeometry geom;
  const double var = 0.09;
  const double delta = 0.1;
  const double tighten = std::sqrt(2.0 * var) * erf_inv(1.0 - 2.0 * delta);
  Rng rng(19);
  for (int i = 0; i < 50; ++i) {
    const double ang = rng.uniform(-M_PI, M_PI);
    const double dist = rng.uniform(0.2, 5.0);
    const Eigen::Vector2d p = dist * Eigen::Vector2d(std::cos(ang), std::sin(ang));
    const auto step = make_step({0.0, 0.0}, var * Eigen::Matrix2d::Identity());
    const double expected = dist - (geom.robot_radius + geom.ped_radius) - tighten;
    CHECK(chance_residual(p, step, delta, geom) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("chance_residual is strictly monotone in delta and covariance scale") {
  Rng rng(23);
  for (int i = 0; i < 300; ++i) {
    SafetyGeometry geom;
    const Eigen::Vector2d mu(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const double ang = rng.uniform(-M_PI, M_PI);
    const Eigen::Vector2d p =
        mu + rng.uniform(0.1, 4.0) * Eigen::Vector2d(std::cos(ang), std::sin(ang));
    const Eigen::Matrix2d sigma =
        random_psd(rng, rng.uniform(0.1, 1.0)) + 1e-4 * Eigen::Matrix2d::Identity();
    const auto step = make_step(mu, sigma);

    // Larger delta (more risk allowed) loosens the constraint.
    double d1 = rng.uniform(0.01, 0.49);
    double d2 = rng.uniform(0.01, 0.49);
    if (d1 == d2) continue;
    if (d1 > d2) std::swap(d1, d2);
    CHECK(chance_residual(p, step, d1, geom) < chance_residual(p, step, d2, geom));

    // Inflating the covariance tightens it.
    double s1 = rng.uniform(0.2, 1.0);
    double s2 = s1 * rng.uniform(1.5, 4.0);
    const auto small = make_step(mu, s1 * sigma);
    const auto big = make_step(mu, s2 * sigma);
    CHECK(chance_residual(p, big, 0.1, geom) < chance_residual(p, small, 0.1, geom));
  }
}

TEST_CASE("chance is never looser than hard once uncertainty exists") {
  Rng rng(29);
  for (int i = 0; i < 200; ++i) {
    SafetyGeometry geom;
    const Eigen::Vector2d mu(0.0, 0.0);
    const double ang = rng.uniform(-M_PI, M_PI);
    const Eigen::Vector2d p =
        rng.uniform(0.1, 4.0) * Eigen::Vector2d(std::cos(ang), std::sin(ang));
    const Eigen::Matrix2d sigma =
        random_psd(rng, 0.6) + 1e-4 * Eigen::Matrix2d::Identity();
    const auto with_cov = make_step(mu, sigma);
    const auto no_cov = make_step(mu, Eigen::Matrix2d::Zero());
    const double delta = rng.uniform(0.01, 0.49);
    CHECK(chance_residual(p, with_cov, delta, geom) < hard_residual(p, no_cov, geom));
  }
}

TEST_CASE("chance_residual guards its degenerate geometry") {
  SafetyGeometry geom;
  const auto step = make_step({1.0, 1.0}, Eigen::Matrix2d::Identity());
  CHECK_THROWS_AS(chance_residual({1.0, 1.0}, step, 0.1, geom), std::domain_error);
  CHECK_THROWS_AS(chance_residual({1.0 + 1e-10, 1.0}, step, 0.1, geom),
                  std::domain_error);
  CHECK_THROWS_AS(chance_residual({2.0, 1.0}, step, 0.6, geom), std::invalid_argument);
  CHECK_THROWS_AS(chance_residual({2.0, 1.0}, step, 0.0, geom), std::invalid_argument);
}

TEST_CASE("cbf_h shares the hard residual's numerics exactly") {
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    SafetyGeometry geom;
    geom.margin = rng.uniform(0.0, 0.2);
    const auto step = make_step({rng.uniform(-3, 3), rng.uniform(-3, 3)},
                                random_psd(rng, 0.5));
    const Eigen::Vector2d p(rng.uniform(-4, 4), rng.uniform(-4, 4));
    CHECK(cbf_h(p, step, geom) == hard_residual(p, step, geom));
  }
  // Worked example: distance 3, combined radius 1 -> h = 2.
  SafetyGeometry g;
  g.ped_radius = 0.7;
  g.robot_radius = 0.3;
  CHECK(cbf_h({3.0, 0.0}, make_step({0.0, 0.0}, Eigen::Matrix2d::Zero()), g) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("cbf_residual algebra") {
  CHECK(cbf_residual(2.0, 1.6, 0.2) == doctest::Approx(0.0));
  CHECK(cbf_residual(2.0, 1.0, 0.2) == doctest::Approx(-0.6));
  // gamma = 1 reduces to plain next-step safety.
  CHECK(cbf_residual(5.0, 0.3, 1.0) == doctest::Approx(0.3));
  CHECK(cbf_residual(5.0, -0.2, 1.0) == doctest::Approx(-0.2));
  CHECK_THROWS_AS(cbf_residual(1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cbf_residual(1.0, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("holding the CBF at equality yields geometric decay of h") {
  // 1-D single integrator driving toward a static obstacle; each step picks
  // u so the discrete barrier condition is exactly tight. h then follows
  // (1-gamma)^t h0 and never goes negative.
  const double dt = 0.4;
  const double radius = 0.45;
  for (double gamma : {0.1, 0.4, 1.0}) {
    double p = radius + 2.0;  // h0 = 2
    const double h0 = p - radius;
    for (int t = 1; t <= 50; ++t) {
      const double h_now = p - radius;
      const double u = ((1.0 - gamma) * h_now + radius - p) / dt;
      p += u * dt;
      const double h_next = p - radius;
      CHECK(std::abs(cbf_residual(h_now, h_next, gamma)) <= 1e-12);
      CHECK(std::abs(h_next - std::pow(1.0 - gamma, t) * h0) <= 1e-9);
      if (gamma < 1.0) {
        CHECK(h_next > 0.0);
      } else {
        CHECK(h_next >= 0.0);  // gamma = 1 lands exactly on the boundary
      }
    }
  }
}

TEST_CASE("smoothed norm keeps residuals finite at coincidence") {
  SafetyGeometry geom;
  const auto step = make_step({1.0, 1.0}, Eigen::Matrix2d::Identity() * 0.1);
  const double at_center = hard_residual({1.0, 1.0}, step, geom, 1e-6);
  CHECK(std::isfinite(at_center));
  // Far from the mean the smoothing is invisible at double precision.
  const double far_smooth = hard_residual({4.0, 1.0}, step, geom, 1e-6);
  const double far_exact = hard_residual({4.0, 1.0}, step, geom);
  CHECK(std::abs(far_smooth - far_exact) <= 1e-9);
}

TEST_CASE("constraint mode factories validate their parameters") {
  CHECK(ConstraintMode::chance(0.5).delta_prob == 0.5);
  CHECK(ConstraintMode::cbf(1.0).gamma == 1.0);
  CHECK_THROWS_AS(ConstraintMode::chance(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ConstraintMode::chance(0.6), std::invalid_argument);
  CHECK_THROWS_AS(ConstraintMode::cbf(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ConstraintMode::cbf(1.5), std::invalid_argument);
}

}  // TEST_SUITE
