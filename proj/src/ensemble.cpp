#include "socnav/ensemble.hpp"

#include <stdexcept>

namespace socnav {

MixtureMoments mixture_moments(const Eigen::VectorXd& means,
                               const Eigen::VectorXd& variances) {
  const Eigen::Index m = means.size();
  if (m < 1 || variances.size() != m) {
    throw std::invalid_argument("mixture_moments: need matching non-empty member outputs");
  }
  MixtureMoments out;
  out.mean = means.mean();
  out.variance = (variances.array() + means.array().square()).mean() - out.mean * out.mean;
  return out;
}

ScalarSplit decompose_uncertainty(const Eigen::VectorXd& means,
                                  const Eigen::VectorXd& variances) {
  const Eigen::Index m = means.size();
  if (m < 1 || variances.size() != m) {
    throw std::invalid_argument("decompose_uncertainty: need matching non-empty member outputs");
  }
  ScalarSplit out;
  out.aleatoric = variances.mean();
  const double mu_bar = means.mean();
  out.epistemic = (means.array() - mu_bar).square().sum() / static_cast<double>(m);
  return out;
}

UncertaintySplit decompose_uncertainty(const std::vector<MemberStepOutput>& outputs) {
  const auto m = static_cast<Eigen::Index>(outputs.size());
  if (m < 1) throw std::invalid_argument("decompose_uncertainty: need at least one member");
  UncertaintySplit split;
  Eigen::VectorXd means(m), vars(m);
  for (int axis = 0; axis < 2; ++axis) {
    for (Eigen::Index i = 0; i < m; ++i) {
      means(i) = outputs[static_cast<std::size_t>(i)].mean(axis);
      vars(i) = outputs[static_cast<std::size_t>(i)].variance(axis);
    }
    const ScalarSplit s = decompose_uncertainty(means, vars);
    split.aleatoric(axis) = s.aleatoric;
    split.epistemic(axis) = s.epistemic;
  }
  return split;
}

GaussianForecast ensemble_predict(const Ensemble& ensemble, const HistoryWindow& history,
                                  int pedestrian_id, int start_time) {
  if (ensemble.members.empty()) {
    throw std::invalid_argument("ensemble_predict: empty ensemble");
  }
  const int m = ensemble.size();
  const int horizon = ensemble.members.front().arch.horizon;

  std::vector<ForwardResult> outputs;
  outputs.reserve(static_cast<std::size_t>(m));
  for (const auto& member : ensemble.members) {
    outputs.push_back(forward(member, history));
  }

  GaussianForecast fc;
  fc.pedestrian_id = pedestrian_id;
  fc.start_time = start_time;
  fc.origin = history.last_position();
  fc.steps.resize(static_cast<std::size_t>(horizon));

  Eigen::VectorXd means(m), vars(m);
  for (int k = 0; k < horizon; ++k) {
    GaussianStep& step = fc.steps[static_cast<std::size_t>(k)];
    for (int axis = 0; axis < 2; ++axis) {
      for (int i = 0; i < m; ++i) {
        means(i) = outputs[static_cast<std::size_t>(i)].mean(k, axis);
        vars(i) = outputs[static_cast<std::size_t>(i)].variance(k, axis);
      }
      const MixtureMoments mm = mixture_moments(means, vars);
      step.mean(axis) = mm.mean + fc.origin(axis);
      step.cov(axis, axis) = mm.variance;
    }
    step.cov(0, 1) = 0.0;
    step.cov(1, 0) = 0.0;
  }
  return fc;
}

}  // namespace socnav
