#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "socnav/planner.hpp"
#include "socnav/train.hpp"

namespace socnav {

/// Declarative run description consumed by the CLI. The file format is
/// JSON with nested sections (paths / train / planner / scenario / run);
/// every field is optional and falls back to the defaults below. The
/// dataset name "synthetic" selects the in-repo walker generator instead
/// of a file. The planner's goal is not part of the config: the scenario
/// owns it.
struct RunConfig {
  // paths
  std::string dataset = "synthetic";
  std::string model = "model.json";
  std::string output_dir = ".";
  // synthetic corpus shape (only used when dataset == "synthetic")
  int synthetic_count = 40;
  int synthetic_steps = 24;

  TrainConfig train;
  PlannerConfig planner;

  // scenario selection: a canonical name or "dataset"
  std::string scenario = "head_on";
  int pedestrian_count = 20;
  double max_sim_time = 30.0;
  // start pose / goal for dataset scenarios (canonical ones carry their own)
  Eigen::Vector3d start_pose{0.0, 0.0, 0.0};  // x, y, heading
  Eigen::Vector2d goal{8.0, 0.0};

  // run controls
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  bool deterministic = false;         // zero all forecast covariances
  bool use_constant_velocity = false; // plan without a trained model
  std::vector<std::string> modes{"hard", "chance", "cbf"};  // bench sweep
  std::vector<int> horizons{8};                             // bench sweep
};

/// Maps a mode name onto a ConstraintMode carrying the given parameters;
/// throws std::invalid_argument listing the valid names.
ConstraintMode parse_mode(const std::string& name, double delta_prob, double gamma);
std::string mode_name(const ConstraintMode& mode);

/// Strict parser: unknown keys anywhere raise std::invalid_argument
/// naming the key, so typos cannot silently fall back to defaults.
RunConfig run_config_from_json(const nlohmann::json& j);

/// Serializes every field; run_config_from_json(to_json(c)) round-trips
/// exactly (keys are emitted sorted, making the form canonical).
nlohmann::json to_json(const RunConfig& config);

/// Reads a config file; apply_env then lets SOCNAV_DATASET, SOCNAV_MODEL
/// and SOCNAV_OUTPUT_DIR override the path fields (paths only, per the
/// interface contract).
RunConfig load_run_config(const std::string& path, bool apply_env = true);
void apply_env_overrides(RunConfig& config);

}  // namespace socnav
