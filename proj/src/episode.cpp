#include "socnav/episode.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace socnav {
namespace {

constexpr double kColdStartSigma = 0.05;  // m, per-step stddev for cold starts

/// Constant-velocity forecast for a pedestrian with too little history
/// for the network. Velocity comes from the last two causal samples
/// (zero with a single observation); covariance grows linearly,
/// sigma_k = k (0.05 m)^2 I.
GaussianForecast constant_velocity_forecast(const PedTrack& track, int now) {
  const Eigen::Vector2d pos = track.position_at(now);
  Eigen::Vector2d vel = Eigen::Vector2d::Zero();
  if (now > track.entry_step) {
    vel = (pos - track.position_at(now - 1)) / kSampleDt;
  }
  GaussianForecast f;
  f.pedestrian_id = track.ped_id;
  f.start_time = now;
  f.origin = pos;
  f.steps.reserve(kForecastSteps);
  for (int k = 1; k <= kForecastSteps; ++k) {
    GaussianStep s;
    s.mean = pos + (k * kSampleDt) * vel;
    s.cov = (k * kColdStartSigma * kColdStartSigma) * Eigen::Matrix2d::Identity();
    f.steps.push_back(s);
  }
  return f;
}

HistoryWindow history_window(const PedTrack& track, int now) {
  HistoryWindow h;
  for (int k = 0; k < kHistorySteps; ++k) {
    const int s = now - (kHistorySteps - 1) + k;
    const Eigen::Vector2d p = track.position_at(s);
    const Eigen::Vector2d v = track.velocity_at(s);  // causal: s+1 <= now
    h.observations[static_cast<std::size_t>(k)] = {p.x(), p.y(), v.x(), v.y()};
  }
  return h;
}

double min_center_distance(const RobotState& state, const std::vector<PedTrack>& tracks,
                           int step) {
  double d = std::numeric_limits<double>::infinity();
  for (const PedTrack& t : tracks) {
    if (!t.active_at(step)) continue;
    d = std::min(d, (t.position_at(step) - state.position()).norm());
  }
  return d;
}

}  // namespace

std::string to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::None: return "none";
    case FailureReason::Collision: return "collision";
    case FailureReason::Timeout: return "timeout";
    case FailureReason::Solver: return "solver";
  }
  return "none";
}

FailureReason failure_reason_from_string(const std::string& s) {
  if (s == "none") return FailureReason::None;
  if (s == "collision") return FailureReason::Collision;
  if (s == "timeout") return FailureReason::Timeout;
  if (s == "solver") return FailureReason::Solver;
  throw std::invalid_argument("unknown failure reason '" + s + "'");
}

std::pair<EpisodeTrace, MetricsReport> run_episode(const Scenario& scenario,
                                                   const Ensemble* ensemble,
                                                   const PlannerConfig& config,
                                                   bool deterministic) {
  if (!scenario.goal.allFinite() || !scenario.start.vec().allFinite()) {
    throw std::invalid_argument("run_episode: scenario start/goal must be finite");
  }
  PlannerConfig cfg = config;
  cfg.goal = scenario.goal;  // the scenario owns the goal
  Planner planner(cfg);

  EpisodeTrace trace;
  trace.scenario_name = scenario.name;
  trace.seed = scenario.seed;
  trace.dt = cfg.dt;

  const double collision_radius = cfg.geometry.robot_radius + cfg.geometry.ped_radius;
  const int max_steps =
      static_cast<int>(std::floor(scenario.max_sim_time / cfg.dt + 1e-9));

  RobotState x = scenario.start;
  FailureReason termination = FailureReason::None;
  bool reached = false;
  double dist_now = std::numeric_limits<double>::infinity();
  double goal_dist = 0.0;
  int t = 0;

  for (;; ++t) {
    dist_now = min_center_distance(x, scenario.tracks, t);
    goal_dist = (x.position() - scenario.goal).norm();
    if (goal_dist <= cfg.goal_tolerance) {
      reached = true;
      break;
    }
    if (dist_now < collision_radius) {
      termination = FailureReason::Collision;
      break;
    }
    if (t >= max_steps) {
      termination = FailureReason::Timeout;
      break;
    }

    StepRecord rec;
    rec.step = t;
    rec.time = t * cfg.dt;
    rec.state = x;
    rec.min_ped_distance = dist_now;
    for (const PedTrack& track : scenario.tracks) {
      if (!track.active_at(t)) continue;
      rec.pedestrians.push_back({track.ped_id, track.position_at(t)});
      const int observed = t - track.entry_step + 1;
      GaussianForecast f;
      if (ensemble != nullptr && observed >= kHistorySteps) {
        f = ensemble_predict(*ensemble, history_window(track, t), track.ped_id, t);
      } else {
        f = constant_velocity_forecast(track, t);
      }
      if (deterministic) {
        for (GaussianStep& s : f.steps) s.cov.setZero();
      }
      rec.forecasts.push_back(std::move(f));
    }

    ControlInput u;
    try {
      auto [first, result] = planner.plan(x, rec.forecasts);
      u = first;
      rec.control = u;
      rec.solver_status = result.status;
      rec.fallback = result.fallback;
      rec.iterations = result.iterations;
      rec.solver_wall_ms = result.wall_time_ms;
      rec.objective = result.objective;
      rec.max_violation = result.max_violation;
    } catch (const std::exception&) {
      termination = FailureReason::Solver;
      break;
    }

    trace.records.push_back(std::move(rec));
    x = step(x, u, cfg.dt, cfg.vehicle);
  }

  trace.final_state = x;
  trace.final_time = t * cfg.dt;
  trace.final_min_distance = dist_now;
  trace.final_goal_distance = goal_dist;
  trace.reached_goal = reached;
  trace.termination = termination;

  return {trace, compute_metrics(trace, cfg)};
}

MetricsReport compute_metrics(const EpisodeTrace& trace, const PlannerConfig& config) {
  MetricsReport report;
  report.steps = static_cast<int>(trace.records.size());
  report.total_time = report.steps * trace.dt;
  report.failure_reason = trace.termination;
  report.success = trace.reached_goal && trace.termination == FailureReason::None;

  double length = 0.0;
  double wall_sum = 0.0;
  double min_dist = trace.final_min_distance;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const Eigen::Vector2d here = trace.records[i].state.position();
    const Eigen::Vector2d next = i + 1 < trace.records.size()
                                     ? trace.records[i + 1].state.position()
                                     : trace.final_state.position();
    length += (next - here).norm();
    wall_sum += trace.records[i].solver_wall_ms;
    min_dist = std::min(min_dist, trace.records[i].min_ped_distance);
  }
  report.trajectory_length = length;
  report.avg_compute_ms = trace.records.empty() ? 0.0 : wall_sum / report.steps;
  report.min_distance = min_dist;
  report.safety_breached = min_dist < config.min_safe_distance;
  return report;
}

}  // namespace socnav
