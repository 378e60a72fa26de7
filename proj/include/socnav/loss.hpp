#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "socnav/network.hpp"

namespace socnav {

/// Gaussian negative log-likelihood over both axes with independent
/// per-axis variances:
///   sum_axes [ log(var)/2 + (target - mean)^2 / (2 var) ]
/// The additive constant of the density is dropped (zero gradient).
/// Throws std::domain_error if any variance is <= 0.
double gaussian_nll(const Eigen::Vector2d& mean, const Eigen::Vector2d& variance,
                    const Eigen::Vector2d& target);

/// One supervised pair: observed window plus the 12 future positions in
/// absolute coordinates (shifted internally to the window's frame).
struct TrainingSample {
  HistoryWindow history;
  Eigen::Matrix<double, Eigen::Dynamic, 2> future;  // kForecastSteps x 2, absolute
};

/// Sequence NLL of one sample under one member: sum of per-step NLLs.
double sample_nll(const EnsembleMember& member, const TrainingSample& sample);

/// Mean sequence NLL over a batch.
double batch_nll(const EnsembleMember& member, std::span<const TrainingSample> batch);

/// Analytic gradient of the mean sequence NLL with respect to the member's
/// flat parameter vector, via backprop through the decoder and the GRU.
/// Returns the batch loss alongside. Throws NonFiniteActivationError on a
/// non-finite forward value and std::runtime_error naming the parameter
/// index if the gradient itself goes non-finite.
double nll_gradient(const EnsembleMember& member, std::span<const TrainingSample> batch,
                    Eigen::VectorXd& grad);

}  // namespace socnav
