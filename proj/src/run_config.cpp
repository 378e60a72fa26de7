#include "socnav/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace socnav {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) {
    throw std::invalid_argument("config section '" + section + "' must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.contains(key)) {
      throw std::invalid_argument("unknown key '" + key + "' in config section '" +
                                  section + "'");
    }
  }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void get_vec7(const json& j, const char* key, Vec7& out) {
  if (!j.contains(key)) return;
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != 7) {
    throw std::invalid_argument(std::string("config key '") + key +
                                "' must be an array of 7 numbers");
  }
  for (int i = 0; i < 7; ++i) out(i) = a.at(static_cast<std::size_t>(i)).get<double>();
}

void get_vec2(const json& j, const char* key, Eigen::Vector2d& out) {
  if (!j.contains(key)) return;
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != 2) {
    throw std::invalid_argument(std::string("config key '") + key +
                                "' must be an array of 2 numbers");
  }
  out = {a.at(0).get<double>(), a.at(1).get<double>()};
}

json vec7_json(const Vec7& v) {
  json a = json::array();
  for (int i = 0; i < 7; ++i) a.push_back(v(i));
  return a;
}

}  // namespace

ConstraintMode parse_mode(const std::string& name, double delta_prob, double gamma) {
  if (name == "hard") return ConstraintMode::hard();
  if (name == "chance") return ConstraintMode::chance(delta_prob);
  if (name == "cbf") return ConstraintMode::cbf(gamma);
  throw std::invalid_argument("unknown mode '" + name +
                              "' (valid modes: hard, chance, cbf)");
}

std::string mode_name(const ConstraintMode& mode) {
  switch (mode.kind) {
    case ConstraintMode::Kind::Hard: return "hard";
    case ConstraintMode::Kind::Chance: return "chance";
    case ConstraintMode::Kind::Cbf: return "cbf";
  }
  return "hard";
}

RunConfig run_config_from_json(const json& j) {
  check_keys(j, "<root>", {"paths", "train", "planner", "scenario", "run"});
  RunConfig c;

  if (j.contains("paths")) {
    const json& p = j.at("paths");
    check_keys(p, "paths",
               {"dataset", "model", "output_dir", "synthetic_count", "synthetic_steps"});
    get_if(p, "dataset", c.dataset);
    get_if(p, "model", c.model);
    get_if(p, "output_dir", c.output_dir);
    get_if(p, "synthetic_count", c.synthetic_count);
    get_if(p, "synthetic_steps", c.synthetic_steps);
  }

  if (j.contains("train")) {
    const json& t = j.at("train");
    check_keys(t, "train",
               {"members", "epochs", "batch", "hidden", "dec_hidden", "learning_rate",
                "beta1", "beta2", "adam_eps", "base_seed"});
    get_if(t, "members", c.train.members);
    get_if(t, "epochs", c.train.epochs);
    get_if(t, "batch", c.train.batch);
    get_if(t, "hidden", c.train.hidden);
    get_if(t, "dec_hidden", c.train.dec_hidden);
    get_if(t, "learning_rate", c.train.learning_rate);
    get_if(t, "beta1", c.train.beta1);
    get_if(t, "beta2", c.train.beta2);
    get_if(t, "adam_eps", c.train.adam_eps);
    get_if(t, "base_seed", c.train.base_seed);
  }

  if (j.contains("planner")) {
    const json& p = j.at("planner");
    check_keys(p, "planner",
               {"horizon", "dt", "mode", "delta_prob", "gamma", "state_weights",
                "terminal_weights", "input_weights", "input_rate_weights", "force_limit",
                "steer_rate_limit", "goal_tolerance", "min_safe_distance", "prune_radius",
                "vehicle", "geometry", "solver"});
    get_if(p, "horizon", c.planner.horizon);
    get_if(p, "dt", c.planner.dt);
    double delta = c.planner.mode.delta_prob;
    double gamma = c.planner.mode.gamma;
    std::string mode = mode_name(c.planner.mode);
    get_if(p, "delta_prob", delta);
    get_if(p, "gamma", gamma);
    get_if(p, "mode", mode);
    c.planner.mode = parse_mode(mode, delta, gamma);
    c.planner.mode.delta_prob = delta;  // keep both parameters round-trippable
    c.planner.mode.gamma = gamma;
    get_vec7(p, "state_weights", c.planner.state_weights);
    get_vec7(p, "terminal_weights", c.planner.terminal_weights);
    get_vec2(p, "input_weights", c.planner.input_weights);
    get_vec2(p, "input_rate_weights", c.planner.input_rate_weights);
    get_if(p, "force_limit", c.planner.force_limit);
    get_if(p, "steer_rate_limit", c.planner.steer_rate_limit);
    get_if(p, "goal_tolerance", c.planner.goal_tolerance);
    get_if(p, "min_safe_distance", c.planner.min_safe_distance);
    get_if(p, "prune_radius", c.planner.prune_radius);
    if (p.contains("vehicle")) {
      const json& v = p.at("vehicle");
      check_keys(v, "planner.vehicle", {"mass", "l_rear", "l_front", "radius", "steer_limit"});
      get_if(v, "mass", c.planner.vehicle.mass);
      get_if(v, "l_rear", c.planner.vehicle.l_rear);
      get_if(v, "l_front", c.planner.vehicle.l_front);
      get_if(v, "radius", c.planner.vehicle.radius);
      get_if(v, "steer_limit", c.planner.vehicle.steer_limit);
    }
    if (p.contains("geometry")) {
      const json& g = p.at("geometry");
      check_keys(g, "planner.geometry", {"ped_radius", "robot_radius", "margin"});
      get_if(g, "ped_radius", c.planner.geometry.ped_radius);
      get_if(g, "robot_radius", c.planner.geometry.robot_radius);
      get_if(g, "margin", c.planner.geometry.margin);
    }
    if (p.contains("solver")) {
      const json& s = p.at("solver");
      check_keys(s, "planner.solver",
                 {"max_outer", "max_inner", "kkt_tol", "stall_tol", "smooth_eps",
                  "hard_strict_margin"});
      get_if(s, "max_outer", c.planner.max_outer);
      get_if(s, "max_inner", c.planner.max_inner);
      get_if(s, "kkt_tol", c.planner.kkt_tol);
      get_if(s, "stall_tol", c.planner.stall_tol);
      get_if(s, "smooth_eps", c.planner.smooth_eps);
      get_if(s, "hard_strict_margin", c.planner.hard_strict_margin);
    }
  }

  if (j.contains("scenario")) {
    const json& s = j.at("scenario");
    check_keys(s, "scenario",
               {"name", "pedestrian_count", "max_sim_time", "start_pose", "goal"});
    get_if(s, "name", c.scenario);
    get_if(s, "pedestrian_count", c.pedestrian_count);
    get_if(s, "max_sim_time", c.max_sim_time);
    if (s.contains("start_pose")) {
      const json& a = s.at("start_pose");
      if (!a.is_array() || a.size() != 3) {
        throw std::invalid_argument("scenario.start_pose must be [x, y, heading]");
      }
      c.start_pose = {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
    }
    get_vec2(s, "goal", c.goal);
  }

  if (j.contains("run")) {
    const json& r = j.at("run");
    check_keys(r, "run",
               {"seeds", "deterministic", "use_constant_velocity", "modes", "horizons"});
    get_if(r, "seeds", c.seeds);
    get_if(r, "deterministic", c.deterministic);
    get_if(r, "use_constant_velocity", c.use_constant_velocity);
    get_if(r, "modes", c.modes);
    get_if(r, "horizons", c.horizons);
  }

  for (const std::string& m : c.modes) parse_mode(m, 0.1, 0.4);  // validate names
  if (c.train.members < 1 || c.train.epochs < 1 || c.train.batch < 1) {
    throw std::invalid_argument("train: members, epochs and batch must be >= 1");
  }
  if (c.planner.horizon < 1) throw std::invalid_argument("planner: horizon must be >= 1");
  for (int n : c.horizons) {
    if (n < 1) throw std::invalid_argument("run: horizons must all be >= 1");
  }
  if (c.seeds.empty()) throw std::invalid_argument("run: seeds must be non-empty");
  return c;
}

json to_json(const RunConfig& c) {
  return {
      {"paths",
       {{"dataset", c.dataset},
        {"model", c.model},
        {"output_dir", c.output_dir},
        {"synthetic_count", c.synthetic_count},
        {"synthetic_steps", c.synthetic_steps}}},
      {"train",
       {{"members", c.train.members},
        {"epochs", c.train.epochs},
        {"batch", c.train.batch},
        {"hidden", c.train.hidden},
        {"dec_hidden", c.train.dec_hidden},
        {"learning_rate", c.train.learning_rate},
        {"beta1", c.train.beta1},
        {"beta2", c.train.beta2},
        {"adam_eps", c.train.adam_eps},
        {"base_seed", c.train.base_seed}}},
      {"planner",
       {{"horizon", c.planner.horizon},
        {"dt", c.planner.dt},
        {"mode", mode_name(c.planner.mode)},
        {"delta_prob", c.planner.mode.delta_prob},
        {"gamma", c.planner.mode.gamma},
        {"state_weights", vec7_json(c.planner.state_weights)},
        {"terminal_weights", vec7_json(c.planner.terminal_weights)},
        {"input_weights", {c.planner.input_weights.x(), c.planner.input_weights.y()}},
        {"input_rate_weights",
         {c.planner.input_rate_weights.x(), c.planner.input_rate_weights.y()}},
        {"force_limit", c.planner.force_limit},
        {"steer_rate_limit", c.planner.steer_rate_limit},
        {"goal_tolerance", c.planner.goal_tolerance},
        {"min_safe_distance", c.planner.min_safe_distance},
        {"prune_radius", c.planner.prune_radius},
        {"vehicle",
         {{"mass", c.planner.vehicle.mass},
          {"l_rear", c.planner.vehicle.l_rear},
          {"l_front", c.planner.vehicle.l_front},
          {"radius", c.planner.vehicle.radius},
          {"steer_limit", c.planner.vehicle.steer_limit}}},
        {"geometry",
         {{"ped_radius", c.planner.geometry.ped_radius},
          {"robot_radius", c.planner.geometry.robot_radius},
          {"margin", c.planner.geometry.margin}}},
        {"solver",
         {{"max_outer", c.planner.max_outer},
          {"max_inner", c.planner.max_inner},
          {"kkt_tol", c.planner.kkt_tol},
          {"stall_tol", c.planner.stall_tol},
          {"smooth_eps", c.planner.smooth_eps},
          {"hard_strict_margin", c.planner.hard_strict_margin}}}}},
      {"scenario",
       {{"name", c.scenario},
        {"pedestrian_count", c.pedestrian_count},
        {"max_sim_time", c.max_sim_time},
        {"start_pose", {c.start_pose.x(), c.start_pose.y(), c.start_pose.z()}},
        {"goal", {c.goal.x(), c.goal.y()}}}},
      {"run",
       {{"seeds", c.seeds},
        {"deterministic", c.deterministic},
        {"use_constant_velocity", c.use_constant_velocity},
        {"modes", c.modes},
        {"horizons", c.horizons}}}};
}

RunConfig load_run_config(const std::string& path, bool apply_env) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_run_config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("load_run_config: " + path + ": " + e.what());
  }
  RunConfig c = run_config_from_json(j);
  if (apply_env) apply_env_overrides(c);
  return c;
}

void apply_env_overrides(RunConfig& config) {
  if (const char* v = std::getenv("SOCNAV_DATASET")) config.dataset = v;
  if (const char* v = std::getenv("SOCNAV_MODEL")) config.model = v;
  if (const char* v = std::getenv("SOCNAV_OUTPUT_DIR")) config.output_dir = v;
}

}  // namespace socnav
