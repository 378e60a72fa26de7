#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <utility>
#include <vector>

#include "socnav/constraints.hpp"
#include "socnav/dynamics.hpp"
#include "socnav/gaussian.hpp"

namespace socnav {

/// Horizon, weights, bounds and constraint selection for the receding
/// horizon problem. Default weights follow the reported setup:
/// Q = (2,2,1,1,1,1e-5,1e-5), P = 10 Q, R = 0.01 I, S = 100 R.
struct PlannerConfig {
  int horizon = 8;
  double dt = kSampleDt;
  Vec7 state_weights;
  Vec7 terminal_weights;
  Eigen::Vector2d input_weights{0.01, 0.01};
  Eigen::Vector2d input_rate_weights{1.0, 1.0};
  Eigen::Vector2d goal{0.0, 0.0};
  double force_limit = 4.0;
  double steer_rate_limit = 0.3 * M_PI;
  ConstraintMode mode = ConstraintMode::cbf(0.4);
  double goal_tolerance = 0.6;
  double min_safe_distance = 0.2;
  /// Pedestrians farther than this from the robot are left out of the
  /// OCP; <= 0 keeps every pedestrian.
  double prune_radius = 10.0;
  VehicleParams vehicle;
  SafetyGeometry geometry;

  PlannerConfig() {
    state_weights << 2.0, 2.0, 1.0, 1.0, 1.0, 1e-5, 1e-5;
    terminal_weights = 10.0 * state_weights;
    // Plan with a setback over the raw collision envelope so a binding
    // constraint leaves slack before the r_o + a0 contact distance.
    geometry.margin = 0.1;
  }

  // Solver knobs.
  int max_outer = 10;
  int max_inner = 50;
  double kkt_tol = 1e-4;
  double stall_tol = 1e-8;
  double smooth_eps = 1e-6;
  /// Hard mode's strict inequality g < 0 becomes residual >= this shift.
  double hard_strict_margin = 1e-6;
};

/// Stage cost: ||x - x_ref||^2_Q + ||u||^2_R + ||u - u_prev||^2_S with
/// diagonal weights; the heading component is wrapped to [-pi, pi].
double stage_cost(const Vec7& x, const Vec7& x_ref, const Eigen::Vector2d& u,
                  const Eigen::Vector2d& u_prev, const Vec7& q_weights,
                  const Eigen::Vector2d& r_weights, const Eigen::Vector2d& s_weights);

/// Terminal cost: ||x_N - x_ref||^2_P, heading wrapped.
double terminal_cost(const Vec7& x, const Vec7& x_ref, const Vec7& p_weights);

/// One pedestrian's contribution to the OCP: its observed position (the
/// h(x_0) anchor) plus one Gaussian per horizon step, padded by holding
/// the last forecast step with covariance inflated 10% per held step.
struct PedConstraint {
  int pedestrian_id = -1;
  Eigen::Vector2d current_pos = Eigen::Vector2d::Zero();
  std::vector<GaussianStep> steps;  // length horizon
};

/// Single-shooting transcription: the decision vector is the stacked
/// controls (2N); states are recovered by rollout.
struct OcpProblem {
  RobotState initial;
  std::vector<Vec7> reference;  // reference[k] pairs with stage k; back() is terminal
  ControlInput prev_input;      // u_{-1} for the first rate term
  std::vector<PedConstraint> pedestrians;
  PlannerConfig config;

  int horizon() const { return config.horizon; }
  /// Collision residuals: one per (pedestrian, step); step-major within
  /// each pedestrian.
  int collision_residual_count() const {
    return config.horizon * static_cast<int>(pedestrians.size());
  }
};

enum class SolveStatus { Converged, MaxIter, InfeasibleRelaxed };

struct SolveResult {
  std::vector<ControlInput> controls;   // length N, within bounds
  std::vector<RobotState> trajectory;   // predicted states 1..N
  double objective = 0.0;
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  double wall_time_ms = 0.0;
  double max_violation = 0.0;  // of exact residuals at the solution
  bool fallback = false;       // braking fallback was substituted
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Assembles the horizon-N problem against all (unpruned) forecasts.
OcpProblem build_ocp(const RobotState& state, const std::vector<GaussianForecast>& forecasts,
                     const PlannerConfig& config,
                     const ControlInput& prev_input = ControlInput{});

/// Objective J(u) through the rollout; states_out, when given, receives
/// the rolled-out trajectory.
double ocp_objective(const OcpProblem& problem, const Eigen::VectorXd& u,
                     std::vector<RobotState>* states_out = nullptr);

/// Analytic gradient of J via the adjoint chain rule through the rollout.
Eigen::VectorXd ocp_objective_gradient(const OcpProblem& problem, const Eigen::VectorXd& u);

/// Collision residuals at the rolled-out states; smooth = true uses the
/// planner's smoothed norm, false the exact one.
Eigen::VectorXd ocp_residuals(const OcpProblem& problem, const std::vector<RobotState>& states,
                              bool smooth);

/// Augmented-Lagrangian outer loop around a projected-BFGS inner
/// minimizer. Controls are clamped to bounds throughout. Throws
/// SolverError when the objective is non-finite even from a zero start.
SolveResult solve_ocp(const OcpProblem& problem, const std::vector<ControlInput>& warm_start);

/// Receding-horizon planner: keeps the shifted previous solution as warm
/// start and the previously applied input for the first rate term.
class Planner {
 public:
  explicit Planner(const PlannerConfig& config) : config_(config) {}

  /// build_ocp + solve_ocp; returns the first control. On solver failure
  /// substitutes a braking control and flags the result.
  std::pair<ControlInput, SolveResult> plan(const RobotState& state,
                                            const std::vector<GaussianForecast>& forecasts);

  void reset();
  const PlannerConfig& config() const { return config_; }
  void set_mode(const ConstraintMode& mode) { config_.mode = mode; }

 private:
  PlannerConfig config_;
  std::vector<ControlInput> warm_start_;
  ControlInput prev_applied_{};
};

}  // namespace socnav
