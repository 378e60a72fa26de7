#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "socnav/ensemble.hpp"
#include "socnav/loss.hpp"

namespace socnav {

/// Hyperparameters; defaults follow the reported training setup (Adam at
/// 8e-3, 100 epochs, batch and hidden width 64, M = 3 members).
struct TrainConfig {
  int members = 3;
  int epochs = 100;
  int batch = 64;
  int hidden = 64;
  int dec_hidden = 64;
  double learning_rate = 8e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t base_seed = 0;
};

/// One row of the training log: mean sequence NLL for one member epoch.
struct EpochLogRow {
  int member = 0;
  int epoch = 0;
  double nll = 0.0;
};

/// Raised when a member's loss or gradient goes non-finite mid-training.
class TrainingDivergenceError : public std::runtime_error {
 public:
  TrainingDivergenceError(int member, int epoch, const std::string& what)
      : std::runtime_error("training diverged in member " + std::to_string(member) +
                           " at epoch " + std::to_string(epoch) + ": " + what),
        member_(member),
        epoch_(epoch) {}
  int member() const { return member_; }
  int epoch() const { return epoch_; }

 private:
  int member_;
  int epoch_;
};

/// Trains M independently seeded members on the whole dataset (no
/// bootstrapping; each member gets its own init and shuffle order).
/// Members can be trained concurrently without shared state; this runs
/// them sequentially for reproducible logs. Appends per-epoch NLL rows to
/// log when given.
Ensemble train_ensemble(const std::vector<TrainingSample>& dataset,
                        const TrainConfig& config,
                        std::vector<EpochLogRow>* log = nullptr);

}  // namespace socnav
