#pragma once

#include <Eigen/Core>
#include <vector>

#include "socnav/history.hpp"

namespace socnav {

/// One forecast step: predicted position distribution N(mean, cov).
/// cov is symmetric PSD; the predictor emits diagonal covariances but
/// consumers accept full 2x2 matrices.
struct GaussianStep {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

/// Per-pedestrian forecast over kForecastSteps future ticks.
/// steps[k] is the distribution k+1 ticks after start_time. origin is the
/// pedestrian's last observed position (the h(x_0) anchor for the CBF and
/// the un-shift applied to network output).
struct GaussianForecast {
  std::vector<GaussianStep> steps;
  int pedestrian_id = -1;
  int start_time = 0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
};

/// Per-axis split of the total predictive variance, Eq.-style algebra:
/// aleatoric = mean of member variances, epistemic = variance of member
/// means; the two add up exactly to the mixture variance.
struct UncertaintySplit {
  Eigen::Vector2d aleatoric = Eigen::Vector2d::Zero();
  Eigen::Vector2d epistemic = Eigen::Vector2d::Zero();
};

}  // namespace socnav
