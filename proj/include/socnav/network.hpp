#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

#include "socnav/history.hpp"

namespace socnav {

/// Thrown when a forward pass produces a non-finite activation; carries the
/// layer where the value first appeared.
class NonFiniteActivationError : public std::runtime_error {
 public:
  explicit NonFiniteActivationError(const std::string& layer)
      : std::runtime_error("non-finite activation in " + layer), layer_(layer) {}
  const std::string& layer() const { return layer_; }

 private:
  std::string layer_;
};

/// Recurrent encoder (GRU cell over the 8 observed steps) followed by a
/// two-layer decoder that emits (mu_x, mu_y, s_x, s_y) for each of the 12
/// future steps. Variances are softplus(s) + 1e-6, so every emitted
/// variance is strictly positive for finite weights.
struct GruArchitecture {
  int input = 4;
  int hidden = 64;
  int dec_hidden = 64;
  int horizon = kForecastSteps;
  int out_per_step = 4;

  int output_dim() const { return horizon * out_per_step; }
  int param_count() const {
    const int gate = hidden * input + hidden * hidden + hidden;
    return 3 * gate + dec_hidden * hidden + dec_hidden +
           output_dim() * dec_hidden + output_dim();
  }
  bool operator==(const GruArchitecture&) const = default;
};

/// One ensemble member: architecture plus its flat parameter vector.
struct EnsembleMember {
  GruArchitecture arch;
  Eigen::VectorXd params;
  std::uint64_t seed = 0;
  double initial_nll = 0.0;
  double final_nll = 0.0;

  bool finite() const { return params.allFinite(); }
};

/// Network output in the shifted frame (last observed position at the
/// origin). Rows are forecast steps; columns are the two axes.
struct ForwardResult {
  Eigen::Matrix<double, Eigen::Dynamic, 2> mean;
  Eigen::Matrix<double, Eigen::Dynamic, 2> variance;  // strictly positive
};

inline constexpr double kVarianceFloor = 1e-6;

/// Fresh member with uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and
/// zero biases, drawn deterministically from the seed.
EnsembleMember init_member(const GruArchitecture& arch, std::uint64_t seed);

/// Runs the encoder-decoder on one history window. Throws
/// NonFiniteActivationError naming the first layer that went non-finite.
ForwardResult forward(const EnsembleMember& member, const HistoryWindow& history);

}  // namespace socnav
