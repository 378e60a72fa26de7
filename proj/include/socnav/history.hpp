#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>

namespace socnav {

/// Pedestrian samples arrive at the dataset rate of 2.5 Hz.
inline constexpr double kSampleDt = 0.4;
/// Observed steps fed to the predictor.
inline constexpr int kHistorySteps = 8;
/// Future steps emitted by the predictor.
inline constexpr int kForecastSteps = 12;

/// One pedestrian sample: position and velocity at a 0.4 s tick.
struct PedObservation {
  double x = 0.0;
  double y = 0.0;
  double u = 0.0;  // m/s along x
  double v = 0.0;  // m/s along y

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(u) && std::isfinite(v);
  }
};

/// Exactly kHistorySteps consecutive observations of one pedestrian.
struct HistoryWindow {
  std::array<PedObservation, kHistorySteps> observations;

  const Eigen::Vector2d last_position() const {
    const auto& o = observations.back();
    return {o.x, o.y};
  }

  bool finite() const {
    for (const auto& o : observations) {
      if (!o.finite()) return false;
    }
    return true;
  }
};

/// Input matrix for the network: one row per observed step, columns
/// (x, y, u, v) with positions shifted so the last observation sits at the
/// origin. The shift makes the predictor translation-equivariant; forecasts
/// are un-shifted on output.
inline Eigen::Matrix<double, kHistorySteps, 4> normalized_history(const HistoryWindow& h) {
  Eigen::Matrix<double, kHistorySteps, 4> m;
  const Eigen::Vector2d origin = h.last_position();
  for (int t = 0; t < kHistorySteps; ++t) {
    const auto& o = h.observations[static_cast<std::size_t>(t)];
    m(t, 0) = o.x - origin.x();
    m(t, 1) = o.y - origin.y();
    m(t, 2) = o.u;
    m(t, 3) = o.v;
  }
  return m;
}

}  // namespace socnav
