#pragma once

#include <Eigen/Core>
#include <vector>

namespace socnav {

using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat7 = Eigen::Matrix<double, 7, 7>;
using Mat72 = Eigen::Matrix<double, 7, 2>;

/// Kinematic-car state: position, heading, body-frame velocities, yaw rate,
/// steering angle.
struct RobotState {
  double px = 0.0;
  double py = 0.0;
  double heading = 0.0;   // psi, rad
  double vx = 0.0;        // body frame, m/s
  double vy = 0.0;
  double yaw_rate = 0.0;  // rad/s
  double steer = 0.0;     // delta, rad

  Vec7 vec() const {
    Vec7 v;
    v << px, py, heading, vx, vy, yaw_rate, steer;
    return v;
  }
  static RobotState from_vec(const Vec7& v) {
    return {v(0), v(1), v(2), v(3), v(4), v(5), v(6)};
  }
  Eigen::Vector2d position() const { return {px, py}; }
};

/// Net driving force and steering rate.
struct ControlInput {
  double force = 0.0;       // N
  double steer_rate = 0.0;  // rad/s

  Eigen::Vector2d vec() const { return {force, steer_rate}; }
  static ControlInput from_vec(const Eigen::Vector2d& v) { return {v(0), v(1)}; }
};

struct VehicleParams {
  double mass = 10.0;       // kg
  double l_rear = 0.25;     // CoG to rear axle, m
  double l_front = 0.25;    // CoG to front axle, m
  double radius = 0.30;     // bounding radius r_o, m
  double steer_limit = 0.6; // |delta| bound, rad
};

/// Right-hand side of the continuous-time model:
///   p_dot   = R(heading) [vx, vy]
///   psi_dot = yaw_rate
///   vx_dot  = F / m
///   vy_dot  = (vx_dot + steer * vx) * l_R / (l_R + l_F)
///   r_dot   = (vx_dot + steer * vx) / (l_R + l_F)
///   d_dot   = steer_rate
Vec7 derivative(const RobotState& state, const ControlInput& input,
                const VehicleParams& params);

/// Jacobians of derivative with respect to state and input.
void derivative_jacobians(const RobotState& state, const ControlInput& input,
                          const VehicleParams& params, Mat7& d_dx, Mat72& d_du);

/// Classical RK4 step with the input held constant over dt; the steering
/// angle is clamped to its bound afterwards.
RobotState step(const RobotState& state, const ControlInput& input, double dt,
                const VehicleParams& params);

/// RK4 step plus the exact sensitivities of the discrete map:
/// d_dx = d step/d state (7x7), d_du = d step/d input (7x2). When the
/// steering clamp is active the steering row is zeroed, matching the
/// almost-everywhere derivative of the clamp.
RobotState step_with_jacobians(const RobotState& state, const ControlInput& input,
                               double dt, const VehicleParams& params,
                               Mat7& d_dx, Mat72& d_du);

/// Iterated step: returns states 1..N for N controls.
std::vector<RobotState> rollout(const RobotState& initial,
                                const std::vector<ControlInput>& controls,
                                double dt, const VehicleParams& params);

}  // namespace socnav
