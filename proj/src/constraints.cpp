#include "socnav/constraints.hpp"

#include <cmath>

#include "socnav/erf.hpp"

namespace socnav {
namespace {

double smooth_norm(const Eigen::Vector2d& e, double eps) {
  if (eps <= 0.0) return e.norm();
  return std::sqrt(e.squaredNorm() + eps * eps);
}

}  // namespace

EllipseDecomposition eigendecompose_2x2(const Eigen::Matrix2d& sigma) {
  const double a = sigma(0, 0);
  const double b = sigma(0, 1);
  const double c = sigma(1, 1);
  if (std::fabs(sigma(0, 1) - sigma(1, 0)) > 1e-9) {
    throw std::domain_error("eigendecompose_2x2: matrix not symmetric");
  }

  const double tr = a + c;
  const double disc = std::sqrt(std::max(0.0, (a - c) * (a - c) + 4.0 * b * b));
  double l1 = 0.5 * (tr + disc);
  double l2 = 0.5 * (tr - disc);
  if (l2 < -1e-12) {
    throw std::domain_error("eigendecompose_2x2: matrix not positive semi-definite");
  }
  l1 = std::max(0.0, l1);
  l2 = std::max(0.0, l2);

  EllipseDecomposition out;
  out.lambda1 = l1;
  out.lambda2 = l2;

  // Eigenvector for l1; near-diagonal matrices keep axis alignment.
  Eigen::Vector2d v1;
  if (std::fabs(b) < 1e-15) {
    v1 = (a >= c) ? Eigen::Vector2d(1.0, 0.0) : Eigen::Vector2d(0.0, 1.0);
  } else if (std::fabs(l1 - c) >= std::fabs(l1 - a)) {
    v1 = Eigen::Vector2d(l1 - c, b).normalized();
  } else {
    v1 = Eigen::Vector2d(b, l1 - a).normalized();
  }
  out.rotation.col(0) = v1;
  out.rotation.col(1) = Eigen::Vector2d(-v1.y(), v1.x());
  return out;
}

double bounding_radius(const Eigen::Matrix2d& sigma, const SafetyGeometry& geom) {
  const EllipseDecomposition dec = eigendecompose_2x2(sigma);
  return geom.ped_radius + std::sqrt(dec.lambda1);
}

double hard_residual(const Eigen::Vector2d& robot_pos, const GaussianStep& step,
                     const SafetyGeometry& geom, double smooth_eps) {
  const double r_th = bounding_radius(step.cov, geom);
  return smooth_norm(robot_pos - step.mean, smooth_eps) -
         (geom.robot_radius + r_th + geom.margin);
}

double chance_residual(const Eigen::Vector2d& robot_pos, const GaussianStep& step,
                       double delta_prob, const SafetyGeometry& geom,
                       double smooth_eps) {
  if (!(delta_prob > 0.0 && delta_prob <= 0.5)) {
    throw std::invalid_argument("chance_residual: delta_prob must lie in (0, 0.5]");
  }
  const Eigen::Vector2d e = robot_pos - step.mean;
  const double dist = e.norm();
  if (dist < 1e-9) {
    throw std::domain_error("chance_residual: robot coincides with predicted mean");
  }
  const Eigen::Vector2d kappa = e / dist;
  const double dir_var = kappa.dot(step.cov * kappa);
  const double tighten =
      std::sqrt(2.0 * std::max(0.0, dir_var)) * erf_inv(1.0 - 2.0 * delta_prob);
  return smooth_norm(e, smooth_eps) -
         (geom.robot_radius + geom.ped_radius + geom.margin) - tighten;
}

double cbf_h(const Eigen::Vector2d& robot_pos, const GaussianStep& step,
             const SafetyGeometry& geom, double smooth_eps) {
  return hard_residual(robot_pos, step, geom, smooth_eps);
}

double cbf_residual(double h_now, double h_next, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("cbf_residual: gamma must lie in (0, 1]");
  }
  return h_next - (1.0 - gamma) * h_now;
}

}  // namespace socnav
