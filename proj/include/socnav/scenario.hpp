#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "socnav/constraints.hpp"
#include "socnav/dynamics.hpp"
#include "socnav/tracks.hpp"

namespace socnav {

/// A closed-loop episode setup: replayed pedestrian tracks plus the
/// robot's start and goal. Invariant: goal finite and the start is not in
/// collision with any pedestrian active at step 0.
struct Scenario {
  std::string name = "custom";
  std::vector<PedTrack> tracks;
  RobotState start;
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  double max_sim_time = 30.0;
  std::uint64_t seed = 0;
};

/// Selection settings for building a scenario out of a recorded dataset.
struct ScenarioConfig {
  int pedestrian_count = 20;
  RobotState start;
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  double max_sim_time = 30.0;
  SafetyGeometry geometry;  // for the start-not-in-collision check
};

/// Draws `pedestrian_count` distinct usable tracks (>= 2 samples) under
/// the seed, time-shifts them to fit within max_sim_time, and verifies
/// the robot start is collision-free at step 0 (redrawing a bounded
/// number of times if not). Throws std::runtime_error naming the
/// available count when there are too few usable tracks.
Scenario spawn_scenario(const std::vector<PedTrack>& tracks, const ScenarioConfig& config,
                        std::uint64_t seed);

/// Names accepted by canonical_scenario: head_on, corridor, crossing_20.
const std::vector<std::string>& canonical_scenario_names();

/// In-repo synthetic setups used by the acceptance runs:
///  - head_on: one pedestrian walking straight down the robot's lane;
///  - corridor: two oncoming pedestrians in a 3 m corridor, staggered;
///  - crossing_20: twenty pedestrians crossing the robot's path.
/// The seed jitters start offsets and speeds slightly so repeated seeds
/// give distinct but comparable episodes. Throws std::invalid_argument
/// for an unknown name.
Scenario canonical_scenario(const std::string& name, std::uint64_t seed);

}  // namespace socnav
