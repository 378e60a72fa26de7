#pragma once

#include <Eigen/Core>
#include <vector>

#include "socnav/gaussian.hpp"
#include "socnav/network.hpp"

namespace socnav {

/// Uniformly-weighted deep ensemble. Members share one architecture and
/// differ only in their independently seeded weights.
struct Ensemble {
  std::vector<EnsembleMember> members;
  int epochs = 0;
  int batch = 0;
  double learning_rate = 0.0;
  std::uint64_t base_seed = 0;

  int size() const { return static_cast<int>(members.size()); }
};

/// Mixture of M Gaussians with equal weights, collapsed to a single
/// Gaussian:
///   mu*   = mean_i(mu_i)
///   var*  = mean_i(var_i + mu_i^2) - mu*^2
struct MixtureMoments {
  double mean = 0.0;
  double variance = 0.0;
};
MixtureMoments mixture_moments(const Eigen::VectorXd& means,
                               const Eigen::VectorXd& variances);

/// Splits the mixture variance for one step and axis into data noise
/// (mean of member variances) and model disagreement (population variance
/// of member means). The two parts sum to mixture_moments().variance
/// exactly -- same algebra, different grouping.
struct ScalarSplit {
  double aleatoric = 0.0;
  double epistemic = 0.0;
};
ScalarSplit decompose_uncertainty(const Eigen::VectorXd& means,
                                  const Eigen::VectorXd& variances);

/// Per-member output for one forecast step, both axes.
struct MemberStepOutput {
  Eigen::Vector2d mean;
  Eigen::Vector2d variance;
};
UncertaintySplit decompose_uncertainty(const std::vector<MemberStepOutput>& outputs);

/// Full ensemble forecast for one pedestrian history: runs every member,
/// merges per step and axis, and un-shifts means back to world
/// coordinates. Covariances come out diagonal.
GaussianForecast ensemble_predict(const Ensemble& ensemble, const HistoryWindow& history,
                                  int pedestrian_id = -1, int start_time = 0);

}  // namespace socnav
