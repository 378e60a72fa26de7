#include "socnav/train.hpp"

#include <cmath>

#include "socnav/rng.hpp"

namespace socnav {

using Eigen::VectorXd;

namespace {

struct AdamState {
  VectorXd m, v;
  long t = 0;

  explicit AdamState(Eigen::Index n) : m(VectorXd::Zero(n)), v(VectorXd::Zero(n)) {}

  void update(VectorXd& params, const VectorXd& grad, const TrainConfig& cfg) {
    ++t;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    params -= (cfg.learning_rate / bc1) *
              (m.array() / ((v.array() / bc2).sqrt() + cfg.adam_eps)).matrix();
  }
};

double full_set_nll(const EnsembleMember& member,
                    const std::vector<TrainingSample>& dataset) {
  return batch_nll(member, std::span<const TrainingSample>(dataset));
}

}  // namespace

Ensemble train_ensemble(const std::vector<TrainingSample>& dataset,
                        const TrainConfig& config, std::vector<EpochLogRow>* log) {
  if (dataset.empty()) {
    throw std::invalid_argument("train_ensemble: empty dataset");
  }
  if (config.members < 1) {
    throw std::invalid_argument("train_ensemble: need at least one member");
  }
  for (const auto& s : dataset) {
    if (s.future.rows() != kForecastSteps) {
      throw std::invalid_argument("train_ensemble: sample future must have 12 steps");
    }
  }

  GruArchitecture arch;
  arch.hidden = config.hidden;
  arch.dec_hidden = config.dec_hidden;

  Ensemble ensemble;
  ensemble.epochs = config.epochs;
  ensemble.batch = config.batch;
  ensemble.learning_rate = config.learning_rate;
  ensemble.base_seed = config.base_seed;

  const auto n = dataset.size();
  for (int mi = 0; mi < config.members; ++mi) {
    const std::uint64_t member_seed = config.base_seed + static_cast<std::uint64_t>(mi);
    EnsembleMember member = init_member(arch, member_seed);
    member.initial_nll = full_set_nll(member, dataset);

    // Independent shuffle stream, offset from the init stream.
    Rng shuffle_rng(member_seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    AdamState adam(member.params.size());
    VectorXd grad;
    std::vector<TrainingSample> batch;
    batch.reserve(static_cast<std::size_t>(config.batch));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      shuffle_rng.shuffle(order);
      double epoch_loss = 0.0;
      std::size_t seen = 0;
      for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch)) {
        const std::size_t end = std::min(n, start + static_cast<std::size_t>(config.batch));
        batch.clear();
        for (std::size_t i = start; i < end; ++i) batch.push_back(dataset[order[i]]);

        double loss = 0.0;
        try {
          loss = nll_gradient(member, std::span<const TrainingSample>(batch), grad);
        } catch (const std::exception& e) {
          throw TrainingDivergenceError(mi, epoch, e.what());
        }
        if (!std::isfinite(loss)) {
          throw TrainingDivergenceError(mi, epoch, "NLL is not finite");
        }
        adam.update(member.params, grad, config);
        epoch_loss += loss * static_cast<double>(end - start);
        seen += end - start;
      }
      if (log) {
        log->push_back({mi, epoch, epoch_loss / static_cast<double>(seen)});
      }
    }

    member.final_nll = full_set_nll(member, dataset);
    if (!std::isfinite(member.final_nll)) {
      throw TrainingDivergenceError(mi, config.epochs, "final NLL is not finite");
    }
    ensemble.members.push_back(std::move(member));
  }
  return ensemble;
}

}  // namespace socnav
