#include "socnav/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace socnav {

Vec7 derivative(const RobotState& s, const ControlInput& u, const VehicleParams& p) {
  const double wheelbase = p.l_rear + p.l_front;
  const double c = std::cos(s.heading);
  const double sn = std::sin(s.heading);
  const double vx_dot = u.force / p.mass;
  const double lateral = vx_dot + s.steer * s.vx;

  Vec7 d;
  d(0) = s.vx * c - s.vy * sn;
  d(1) = s.vx * sn + s.vy * c;
  d(2) = s.yaw_rate;
  d(3) = vx_dot;
  d(4) = lateral * p.l_rear / wheelbase;
  d(5) = lateral / wheelbase;
  d(6) = u.steer_rate;
  return d;
}

void derivative_jacobians(const RobotState& s, const ControlInput& u,
                          const VehicleParams& p, Mat7& d_dx, Mat72& d_du) {
  (void)u;
  const double wheelbase = p.l_rear + p.l_front;
  const double c = std::cos(s.heading);
  const double sn = std::sin(s.heading);
  const double c_lat = p.l_rear / wheelbase;
  const double c_yaw = 1.0 / wheelbase;

  d_dx.setZero();
  d_du.setZero();

  // p_x dot
  d_dx(0, 2) = -s.vx * sn - s.vy * c;
  d_dx(0, 3) = c;
  d_dx(0, 4) = -sn;
  // p_y dot
  d_dx(1, 2) = s.vx * c - s.vy * sn;
  d_dx(1, 3) = sn;
  d_dx(1, 4) = c;
  // heading dot
  d_dx(2, 5) = 1.0;
  // vx dot
  d_du(3, 0) = 1.0 / p.mass;
  // vy dot = (F/m + steer*vx) * c_lat
  d_dx(4, 3) = s.steer * c_lat;
  d_dx(4, 6) = s.vx * c_lat;
  d_du(4, 0) = c_lat / p.mass;
  // yaw_rate dot = (F/m + steer*vx) * c_yaw
  d_dx(5, 3) = s.steer * c_yaw;
  d_dx(5, 6) = s.vx * c_yaw;
  d_du(5, 0) = c_yaw / p.mass;
  // steer dot
  d_du(6, 1) = 1.0;
}

RobotState step(const RobotState& state, const ControlInput& input, double dt,
                const VehicleParams& params) {
  const Vec7 x = state.vec();
  const Vec7 k1 = derivative(state, input, params);
  const Vec7 k2 = derivative(RobotState::from_vec(x + 0.5 * dt * k1), input, params);
  const Vec7 k3 = derivative(RobotState::from_vec(x + 0.5 * dt * k2), input, params);
  const Vec7 k4 = derivative(RobotState::from_vec(x + dt * k3), input, params);
  Vec7 next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  next(6) = std::clamp(next(6), -params.steer_limit, params.steer_limit);
  return RobotState::from_vec(next);
}

RobotState step_with_jacobians(const RobotState& state, const ControlInput& input,
                               double dt, const VehicleParams& params,
                               Mat7& d_dx, Mat72& d_du) {
  const Vec7 x = state.vec();
  Mat7 jx;
  Mat72 ju;

  const Vec7 k1 = derivative(state, input, params);
  derivative_jacobians(state, input, params, jx, ju);
  const Mat7 dk1_dx = jx;
  const Mat72 dk1_du = ju;

  const RobotState s2 = RobotState::from_vec(x + 0.5 * dt * k1);
  const Vec7 k2 = derivative(s2, input, params);
  derivative_jacobians(s2, input, params, jx, ju);
  const Mat7 dk2_dx = jx * (Mat7::Identity() + 0.5 * dt * dk1_dx);
  const Mat72 dk2_du = jx * (0.5 * dt * dk1_du) + ju;

  const RobotState s3 = RobotState::from_vec(x + 0.5 * dt * k2);
  const Vec7 k3 = derivative(s3, input, params);
  derivative_jacobians(s3, input, params, jx, ju);
  const Mat7 dk3_dx = jx * (Mat7::Identity() + 0.5 * dt * dk2_dx);
  const Mat72 dk3_du = jx * (0.5 * dt * dk2_du) + ju;

  const RobotState s4 = RobotState::from_vec(x + dt * k3);
  const Vec7 k4 = derivative(s4, input, params);
  derivative_jacobians(s4, input, params, jx, ju);
  const Mat7 dk4_dx = jx * (Mat7::Identity() + dt * dk3_dx);
  const Mat72 dk4_du = jx * (dt * dk3_du) + ju;

  Vec7 next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  d_dx = Mat7::Identity() + (dt / 6.0) * (dk1_dx + 2.0 * dk2_dx + 2.0 * dk3_dx + dk4_dx);
  d_du = (dt / 6.0) * (dk1_du + 2.0 * dk2_du + 2.0 * dk3_du + dk4_du);

  if (next(6) > params.steer_limit || next(6) < -params.steer_limit) {
    next(6) = std::clamp(next(6), -params.steer_limit, params.steer_limit);
    d_dx.row(6).setZero();
    d_du.row(6).setZero();
  }
  return RobotState::from_vec(next);
}

std::vector<RobotState> rollout(const RobotState& initial,
                                const std::vector<ControlInput>& controls,
                                double dt, const VehicleParams& params) {
  std::vector<RobotState> states;
  states.reserve(controls.size());
  RobotState current = initial;
  for (const auto& u : controls) {
    current = step(current, u, dt, params);
    states.push_back(current);
  }
  return states;
}

}  // namespace socnav
