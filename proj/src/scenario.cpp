#include "socnav/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "socnav/rng.hpp"

namespace socnav {
namespace {

constexpr int kMaxRedraws = 100;

int step_count(double max_sim_time) {
  return static_cast<int>(std::floor(max_sim_time / kSampleDt + 1e-9));
}

bool start_clear(const RobotState& start, const std::vector<PedTrack>& tracks,
                 const SafetyGeometry& geom) {
  const double clearance = geom.robot_radius + geom.ped_radius;
  for (const PedTrack& t : tracks) {
    if (!t.active_at(0)) continue;
    if ((t.position_at(0) - start.position()).norm() < clearance) return false;
  }
  return true;
}

/// Straight-line walker: `steps` samples from `start` at velocity `vel`.
PedTrack line_track(int ped_id, int entry, const Eigen::Vector2d& start,
                    const Eigen::Vector2d& vel, int steps) {
  PedTrack t;
  t.ped_id = ped_id;
  t.entry_step = entry;
  t.samples.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    t.samples.push_back(start + (kSampleDt * k) * vel);
  }
  return t;
}

/// The corridor scenarios realize their walls as rows of standing
/// pedestrians: the planner's only obstacle primitive is the pedestrian
/// ellipse, so a wall is a line of zero-velocity tracks spaced closely
/// enough that no gap is passable. Centers sit r_o + a0 outside the
/// nominal wall line so the contact envelope, not the centers, traces
/// y = +-half_width; brushing the wall then cannot register as a
/// pedestrian collision.
void add_corridor_walls(Scenario& scn, int first_id, double half_width, double x_min,
                        double x_max, int steps) {
  constexpr double kSpacing = 0.7;   // gap midpoint 0.35 < r_o + a0 = 0.45
  constexpr double kSetback = 0.45;  // r_o + a0
  int id = first_id;
  for (double x = x_min; x <= x_max + 1e-9; x += kSpacing) {
    for (double side : {1.0, -1.0}) {
      scn.tracks.push_back(
          line_track(id++, 0, {x, side * (half_width + kSetback)}, {0.0, 0.0}, steps));
    }
  }
}

}  // namespace

Scenario spawn_scenario(const std::vector<PedTrack>& tracks, const ScenarioConfig& config,
                        std::uint64_t seed) {
  if (config.pedestrian_count < 1) {
    throw std::invalid_argument("spawn_scenario: pedestrian_count must be >= 1");
  }
  if (!config.goal.allFinite() || !config.start.vec().allFinite()) {
    throw std::invalid_argument("spawn_scenario: start/goal must be finite");
  }
  std::vector<int> usable;
  for (int i = 0; i < static_cast<int>(tracks.size()); ++i) {
    if (tracks[static_cast<std::size_t>(i)].size() >= 2) usable.push_back(i);
  }
  if (static_cast<int>(usable.size()) < config.pedestrian_count) {
    throw std::runtime_error("spawn_scenario: requested " +
                             std::to_string(config.pedestrian_count) +
                             " pedestrians but only " + std::to_string(usable.size()) +
                             " usable tracks are available");
  }

  Rng rng(seed);
  const int max_steps = step_count(config.max_sim_time);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    std::vector<int> pool = usable;
    rng.shuffle(pool);
    pool.resize(static_cast<std::size_t>(config.pedestrian_count));
    std::sort(pool.begin(), pool.end());

    Scenario scn;
    scn.name = "dataset";
    scn.start = config.start;
    scn.goal = config.goal;
    scn.max_sim_time = config.max_sim_time;
    scn.seed = seed;
    int min_entry = std::numeric_limits<int>::max();
    for (int i : pool) min_entry = std::min(min_entry, tracks[static_cast<std::size_t>(i)].entry_step);
    for (int i : pool) {
      PedTrack t = tracks[static_cast<std::size_t>(i)];
      t.entry_step -= min_entry;  // scene clock starts at the first arrival
      if (t.exit_step() > max_steps) {
        t.entry_step = std::max(0, max_steps - (t.size() - 1));
      }
      scn.tracks.push_back(std::move(t));
    }
    if (start_clear(scn.start, scn.tracks, config.geometry)) return scn;
  }
  throw std::runtime_error(
      "spawn_scenario: could not draw a selection with a collision-free start after " +
      std::to_string(kMaxRedraws) + " attempts");
}

const std::vector<std::string>& canonical_scenario_names() {
  static const std::vector<std::string> names = {"head_on", "corridor", "crossing_20"};
  return names;
}

Scenario canonical_scenario(const std::string& name, std::uint64_t seed) {
  Scenario scn;
  scn.name = name;
  scn.seed = seed;
  scn.max_sim_time = 30.0;
  const int steps = step_count(scn.max_sim_time) + 1;

  if (name == "head_on") {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 1);
    scn.start = RobotState{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    scn.goal = {8.0, 0.0};
    const double y0 = rng.uniform(-0.10, 0.10);
    const double x0 = 9.0 + rng.uniform(-0.2, 0.2);
    const double speed = 1.2 + rng.uniform(-0.05, 0.05);
    scn.tracks.push_back(line_track(0, 0, {x0, y0}, {-speed, 0.0}, steps));
    add_corridor_walls(scn, 1, 1.5, -1.0, 10.0, steps);
    return scn;
  }
  if (name == "corridor") {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 2);
    scn.start = RobotState{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    scn.goal = {8.0, 0.0};
    // Two walkers heading down the corridor toward the robot, one ahead of
    // the other in opposite lanes, drifting side to side in unison. The
    // pair blocks the middle outright; the side gaps at the walls open and
    // close with the drift. Extrapolated means lag the drift, so a planner
    // that trusts them darts into a gap that may close mid-pass, while a
    // planner that carries the forecast spread holds back until the pair
    // has gone by.
    const double speed = 1.05 + rng.uniform(-0.05, 0.05);
    const double amp = 0.40 + rng.uniform(-0.05, 0.05);
    const double period = 6.4 + rng.uniform(-1.0, 1.0);
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    const double lanes[2] = {0.45 + rng.uniform(-0.08, 0.08), -0.45 + rng.uniform(-0.08, 0.08)};
    // Far enough out that the robot picks its side after the predictor has
    // its full 8-step history (cold-start forecasts carry almost no spread
    // and would leave every mode equally exposed). The pair comes in
    // through the far corridor mouth.
    const double x0s[2] = {9.6 + rng.uniform(-0.2, 0.2), 10.8 + rng.uniform(-0.2, 0.2)};
    for (int i = 0; i < 2; ++i) {
      PedTrack walker;
      walker.ped_id = i;
      walker.entry_step = 0;
      for (int k = 0; k < steps; ++k) {
        const double t = kSampleDt * k;
        walker.samples.push_back(
            {x0s[i] - speed * t, lanes[i] + amp * std::sin(phase + 2.0 * M_PI * t / period)});
      }
      scn.tracks.push_back(std::move(walker));
    }
    add_corridor_walls(scn, 2, 1.5, -1.0, 10.0, steps);
    return scn;
  }
  if (name == "crossing_20") {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 3);
    scn.start = RobotState{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    scn.goal = {10.0, 0.0};
    for (int i = 0; i < 20; ++i) {
      const double side = rng.uniform() < 0.5 ? 1.0 : -1.0;
      const double x0 = rng.uniform(1.5, 9.5);
      const double y0 = side * rng.uniform(4.0, 6.0);
      const Eigen::Vector2d vel(rng.uniform(-0.2, 0.2), -side * rng.uniform(0.7, 1.3));
      const int entry = static_cast<int>(rng.index(26));
      scn.tracks.push_back(line_track(i, entry, {x0, y0}, vel, steps - entry));
    }
    return scn;
  }
  throw std::invalid_argument("canonical_scenario: unknown scenario '" + name +
                              "' (expected head_on, corridor or crossing_20)");
}

}  // namespace socnav
