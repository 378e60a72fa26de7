#pragma once

#include <Eigen/Core>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "socnav/ensemble.hpp"
#include "socnav/planner.hpp"
#include "socnav/scenario.hpp"

namespace socnav {

enum class FailureReason { None, Collision, Timeout, Solver };

std::string to_string(FailureReason reason);
FailureReason failure_reason_from_string(const std::string& s);

/// True pedestrian position at one instant.
struct PedSnapshot {
  int ped_id = -1;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

/// Everything observed during one control step: the robot state the
/// control was computed from, the forecasts fed to the planner, and the
/// solver's verdict.
struct StepRecord {
  int step = 0;
  double time = 0.0;
  RobotState state;
  ControlInput control;
  std::vector<GaussianForecast> forecasts;
  std::vector<PedSnapshot> pedestrians;
  SolveStatus solver_status = SolveStatus::MaxIter;
  bool fallback = false;
  int iterations = 0;
  double solver_wall_ms = 0.0;
  double objective = 0.0;
  double max_violation = 0.0;  // exact residual violation at the solution
  double min_ped_distance = std::numeric_limits<double>::infinity();  // raw centers
};

/// One record per applied control until termination, plus the terminal
/// instant the stop condition was detected at.
struct EpisodeTrace {
  std::string scenario_name;
  std::uint64_t seed = 0;
  double dt = kSampleDt;
  std::vector<StepRecord> records;
  RobotState final_state;
  double final_time = 0.0;
  double final_min_distance = std::numeric_limits<double>::infinity();
  double final_goal_distance = 0.0;
  bool reached_goal = false;
  FailureReason termination = FailureReason::None;
};

/// Table-I style per-episode metrics. min_distance is the raw
/// robot-pedestrian center distance, minimized over every recorded
/// instant. safety_breached tracks the 0.2 m margin without failing the
/// episode.
struct MetricsReport {
  double trajectory_length = 0.0;  // m
  double total_time = 0.0;         // s
  double min_distance = std::numeric_limits<double>::infinity();
  double avg_compute_ms = 0.0;
  bool success = false;
  FailureReason failure_reason = FailureReason::None;
  bool safety_breached = false;
  int steps = 0;
};

/// Closed-loop replay at 0.4 s: forecast every active pedestrian (the
/// ensemble once 8 observations exist, constant-velocity with
/// sigma_k = k (0.05 m)^2 I before that), plan, apply the first control,
/// advance. ensemble == nullptr forces constant-velocity forecasts
/// throughout; deterministic zeroes every forecast covariance.
/// Termination: goal within config.goal_tolerance, center distance below
/// r_o + a0 (collision), the scenario's time cap, or a planner hard
/// failure.
std::pair<EpisodeTrace, MetricsReport> run_episode(const Scenario& scenario,
                                                   const Ensemble* ensemble,
                                                   const PlannerConfig& config,
                                                   bool deterministic = false);

/// Recomputes the metric tuple from a trace; persisted traces reproduce
/// the original report exactly.
MetricsReport compute_metrics(const EpisodeTrace& trace, const PlannerConfig& config);

}  // namespace socnav
