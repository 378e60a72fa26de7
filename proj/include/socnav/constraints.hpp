#pragma once

#include <Eigen/Core>
#include <stdexcept>

#include "socnav/gaussian.hpp"

namespace socnav {

/// Closed-form eigendecomposition of a 2x2 symmetric PSD matrix.
/// rotation columns are the eigenvectors; eigenvalues sorted descending.
/// The semi-axes of the one-sigma ellipse are sqrt(lambda1), sqrt(lambda2).
struct EllipseDecomposition {
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Radii entering every collision residual.
struct SafetyGeometry {
  double ped_radius = 0.15;    // a0
  double robot_radius = 0.30;  // r_o
  double margin = 0.0;         // extra setback, default none
};

/// Which inequality family the planner applies.
struct ConstraintMode {
  enum class Kind { Hard, Chance, Cbf };

  Kind kind = Kind::Hard;
  double delta_prob = 0.1;  // chance threshold, (0, 0.5]
  double gamma = 0.4;       // CBF decay rate, (0, 1]

  static ConstraintMode hard() { return {Kind::Hard, 0.1, 0.4}; }
  static ConstraintMode chance(double delta) {
    if (!(delta > 0.0 && delta <= 0.5)) {
      throw std::invalid_argument("chance: delta_prob must lie in (0, 0.5]");
    }
    return {Kind::Chance, delta, 0.4};
  }
  static ConstraintMode cbf(double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) {
      throw std::invalid_argument("cbf: gamma must lie in (0, 1]");
    }
    return {Kind::Cbf, 0.1, gamma};
  }
};

/// Throws std::domain_error if sigma is asymmetric beyond 1e-9 or has an
/// eigenvalue below -1e-12. Eigenvalues within the tolerance are clamped
/// to zero.
EllipseDecomposition eigendecompose_2x2(const Eigen::Matrix2d& sigma);

/// Conservative circular bound of the pedestrian's uncertainty ellipse:
/// a0 + sqrt(lambda1). This is r_th in the hard residual and in h.
double bounding_radius(const Eigen::Matrix2d& sigma, const SafetyGeometry& geom);

/// Hard collision residual at the predicted mean:
///   ||p - mu|| - (r_o + r_th + margin),  feasible iff >= 0.
/// smooth_eps > 0 replaces the norm with sqrt(||.||^2 + eps^2) so planner
/// gradients stay finite at coincidence; metrics use the true norm (eps 0).
double hard_residual(const Eigen::Vector2d& robot_pos, const GaussianStep& step,
                     const SafetyGeometry& geom, double smooth_eps = 0.0);

/// Linearized chance-constraint residual. With kappa the unit vector from
/// the predicted mean to the robot:
///   kappa^T (p - mu) - (r_o + a0 + margin)
///     - sqrt(2 kappa^T Sigma kappa) * erf_inv(1 - 2 delta)
/// Feasible iff >= 0. Throws std::domain_error when ||p - mu|| < 1e-9
/// (kappa undefined); the planner substitutes maximal violation there.
double chance_residual(const Eigen::Vector2d& robot_pos, const GaussianStep& step,
                       double delta_prob, const SafetyGeometry& geom,
                       double smooth_eps = 0.0);

/// Barrier value h for the discrete CBF; same numerics as hard_residual.
double cbf_h(const Eigen::Vector2d& robot_pos, const GaussianStep& step,
             const SafetyGeometry& geom, double smooth_eps = 0.0);

/// Discrete CBF residual: h_next - (1 - gamma) h_now >= 0 bounds the decay
/// of h along the trajectory.
double cbf_residual(double h_now, double h_next, double gamma);

}  // namespace socnav
