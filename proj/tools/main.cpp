// socnav: train / plan / bench entry point over a declarative JSON config.
// Exit code 0 means every requested episode produced a metrics report
// (including analyzed failures); operational errors exit nonzero with a
// message on stderr.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "socnav/episode.hpp"
#include "socnav/model_io.hpp"
#include "socnav/run_config.hpp"
#include "socnav/scenario.hpp"
#include "socnav/trace_io.hpp"
#include "socnav/tracks.hpp"
#include "socnav/train.hpp"

namespace fs = std::filesystem;
using namespace socnav;

namespace {

struct CliOverrides {
  std::optional<std::string> config_path;
  std::optional<std::string> scenario;
  std::optional<std::string> mode;
  std::optional<int> horizon;
  std::optional<double> delta;
  std::optional<double> gamma;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  std::optional<std::string> out;
};

RunConfig effective_config(const CliOverrides& o) {
  RunConfig c;
  if (o.config_path) c = load_run_config(*o.config_path);
  if (o.scenario) c.scenario = *o.scenario;
  if (o.horizon) c.planner.horizon = *o.horizon;
  if (o.delta) c.planner.mode.delta_prob = *o.delta;
  if (o.gamma) c.planner.mode.gamma = *o.gamma;
  const std::string mode = o.mode ? *o.mode : mode_name(c.planner.mode);
  c.planner.mode =
      parse_mode(mode, c.planner.mode.delta_prob, c.planner.mode.gamma);
  if (o.seed) c.seeds = {*o.seed};
  if (o.deterministic) c.deterministic = true;
  if (o.out) c.output_dir = *o.out;
  return c;
}

std::vector<PedTrack> load_dataset(const RunConfig& c) {
  if (c.dataset == "synthetic") {
    return make_synthetic_tracks(c.synthetic_count, c.train.base_seed, c.synthetic_steps);
  }
  if (!fs::exists(c.dataset)) {
    throw std::runtime_error("dataset path does not exist: " + c.dataset);
  }
  return load_tracks(c.dataset);
}

Scenario make_scenario(const RunConfig& c, std::uint64_t seed) {
  if (c.scenario == "dataset") {
    ScenarioConfig sc;
    sc.pedestrian_count = c.pedestrian_count;
    sc.start = RobotState{c.start_pose.x(), c.start_pose.y(), c.start_pose.z(),
                          0.0,              0.0,              0.0, 0.0};
    sc.goal = c.goal;
    sc.max_sim_time = c.max_sim_time;
    sc.geometry = c.planner.geometry;
    return spawn_scenario(load_dataset(c), sc, seed);
  }
  Scenario s = canonical_scenario(c.scenario, seed);
  s.max_sim_time = c.max_sim_time;
  return s;
}

std::string metrics_csv_header() {
  return "scenario,mode,horizon,seed,trajectory_length,total_time,min_distance,"
         "avg_compute_ms,success,failure_reason,safety_breached,steps";
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "inf";
  std::ostringstream s;
  s << v;
  return s.str();
}

std::string metrics_csv_row(const std::string& scenario, const std::string& mode, int horizon,
                            const std::string& seed, const MetricsReport& m) {
  std::ostringstream s;
  s << scenario << ',' << mode << ',' << horizon << ',' << seed << ','
    << fmt(m.trajectory_length) << ',' << fmt(m.total_time) << ',' << fmt(m.min_distance)
    << ',' << fmt(m.avg_compute_ms) << ',' << (m.success ? 1 : 0) << ','
    << to_string(m.failure_reason) << ',' << (m.safety_breached ? 1 : 0) << ',' << m.steps;
  return s.str();
}

struct LoadedModel {
  Ensemble ensemble;
  const Ensemble* ptr = nullptr;  // nullptr => constant-velocity forecasts
  std::string hash = "none";
};

LoadedModel resolve_model(const RunConfig& c) {
  LoadedModel m;
  if (c.use_constant_velocity) return m;
  if (!fs::exists(c.model)) {
    throw std::runtime_error("model file does not exist: " + c.model +
                             " (train first or set run.use_constant_velocity)");
  }
  m.ensemble = load_ensemble(c.model);
  m.hash = file_digest(c.model);
  m.ptr = &m.ensemble;
  return m;
}

std::string trace_path(const RunConfig& c, const std::string& scenario,
                       const std::string& mode, int horizon, std::uint64_t seed) {
  std::ostringstream s;
  s << "trace_" << scenario << "_" << mode << "_h" << horizon << "_seed" << seed << ".jsonl";
  return (fs::path(c.output_dir) / s.str()).string();
}

int cmd_train(const CliOverrides& o) {
  const RunConfig c = effective_config(o);
  const std::vector<PedTrack> tracks = load_dataset(c);
  const std::vector<TrainingSample> samples = extract_training_samples(tracks);
  if (samples.empty()) {
    throw std::runtime_error("dataset yields no training windows (tracks shorter than " +
                             std::to_string(kHistorySteps + kForecastSteps) + " samples)");
  }
  std::cout << "training " << c.train.members << " members on " << samples.size()
            << " windows from " << tracks.size() << " tracks\n";

  std::vector<EpochLogRow> log;
  const Ensemble ensemble = train_ensemble(samples, c.train, &log);

  fs::create_directories(c.output_dir);
  if (const fs::path model_dir = fs::path(c.model).parent_path(); !model_dir.empty()) {
    fs::create_directories(model_dir);
  }
  save_ensemble(ensemble, c.model);

  const fs::path log_path = fs::path(c.output_dir) / "train_log.csv";
  std::ofstream log_out(log_path);
  if (!log_out) throw std::runtime_error("cannot open " + log_path.string());
  log_out.precision(17);
  log_out << "member,epoch,nll\n";
  for (const EpochLogRow& row : log) {
    log_out << row.member << ',' << row.epoch << ',' << row.nll << '\n';
  }

  for (const EnsembleMember& m : ensemble.members) {
    std::cout << "member seed " << m.seed << ": nll " << m.initial_nll << " -> "
              << m.final_nll << '\n';
  }
  std::cout << "model written to " << c.model << " (digest " << file_digest(c.model)
            << ")\ntraining log: " << log_path.string() << " (" << log.size() << " rows)\n";
  return 0;
}

int cmd_plan(const CliOverrides& o) {
  const RunConfig c = effective_config(o);
  const std::uint64_t seed = c.seeds.front();
  const Scenario scenario = make_scenario(c, seed);
  const LoadedModel model = resolve_model(c);

  const auto [trace, metrics] = run_episode(scenario, model.ptr, c.planner, c.deterministic);

  fs::create_directories(c.output_dir);
  TraceHeader header;
  header.scenario = scenario.name;
  header.seed = seed;
  header.model_hash = model.hash;
  header.config = to_json(c);
  const std::string path =
      trace_path(c, scenario.name, mode_name(c.planner.mode), c.planner.horizon, seed);
  write_trace(path, header, trace, metrics);

  std::cout << metrics_csv_header() << '\n'
            << metrics_csv_row(scenario.name, mode_name(c.planner.mode), c.planner.horizon,
                               std::to_string(seed), metrics)
            << '\n'
            << "trace: " << path << '\n';
  return 0;
}

int cmd_bench(const CliOverrides& o) {
  const RunConfig c = effective_config(o);
  const LoadedModel model = resolve_model(c);
  const std::vector<std::string> modes = o.mode ? std::vector<std::string>{*o.mode} : c.modes;
  const std::vector<int> horizons =
      o.horizon ? std::vector<int>{*o.horizon} : c.horizons;

  fs::create_directories(c.output_dir);
  const fs::path csv_path = fs::path(c.output_dir) / "bench.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path.string());
  csv << metrics_csv_header() << '\n';

  for (const std::string& mode : modes) {
    for (int horizon : horizons) {
      RunConfig rc = c;
      rc.planner.horizon = horizon;
      rc.planner.mode = parse_mode(mode, c.planner.mode.delta_prob, c.planner.mode.gamma);

      std::vector<MetricsReport> group;
      for (std::uint64_t seed : c.seeds) {
        try {
          const Scenario scenario = make_scenario(rc, seed);
          const auto [trace, metrics] =
              run_episode(scenario, model.ptr, rc.planner, rc.deterministic);
          csv << metrics_csv_row(scenario.name, mode, horizon, std::to_string(seed), metrics)
              << '\n';
          group.push_back(metrics);
        } catch (const std::exception& e) {
          std::cerr << "episode (mode " << mode << ", N " << horizon << ", seed " << seed
                    << ") failed: " << e.what() << '\n';
          MetricsReport failed;
          failed.failure_reason = FailureReason::Solver;
          failed.min_distance = std::numeric_limits<double>::infinity();
          csv << metrics_csv_row(c.scenario, mode, horizon, std::to_string(seed), failed)
              << '\n';
        }
      }
      // One aggregate row per (mode, N): numeric cells are mean+-std over
      // the completed episodes, success/safety cells are rates.
      if (!group.empty()) {
        auto agg = [&](auto field) {
          double mean = 0.0;
          for (const auto& m : group) mean += field(m);
          mean /= static_cast<double>(group.size());
          double var = 0.0;
          for (const auto& m : group) {
            const double d = field(m) - mean;
            var += d * d;
          }
          const std::size_t n = group.size();
          const double sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
          return fmt(mean) + "+-" + fmt(sd);
        };
        double success_rate = 0.0, breach_rate = 0.0;
        for (const auto& m : group) {
          success_rate += m.success ? 1.0 : 0.0;
          breach_rate += m.safety_breached ? 1.0 : 0.0;
        }
        success_rate /= static_cast<double>(group.size());
        breach_rate /= static_cast<double>(group.size());
        csv << c.scenario << ',' << mode << ',' << horizon << ",aggregate,"
            << agg([](const MetricsReport& m) { return m.trajectory_length; }) << ','
            << agg([](const MetricsReport& m) { return m.total_time; }) << ','
            << agg([](const MetricsReport& m) { return m.min_distance; }) << ','
            << agg([](const MetricsReport& m) { return m.avg_compute_ms; }) << ','
            << fmt(success_rate) << ",-," << fmt(breach_rate) << ','
            << agg([](const MetricsReport& m) { return static_cast<double>(m.steps); })
            << '\n';
      }
    }
  }
  std::cout << "metrics: " << csv_path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uncertainty-aware social navigation: train, plan, bench"};
  app.require_subcommand(1);
  app.fallthrough();

  CliOverrides o;
  app.add_option("--config", o.config_path, "JSON run configuration file");
  app.add_option("--scenario", o.scenario,
                 "scenario: head_on, corridor, crossing_20 or dataset")
      ->check(CLI::IsMember({"head_on", "corridor", "crossing_20", "dataset"}));
  app.add_option("--mode", o.mode, "constraint mode")
      ->check(CLI::IsMember({"hard", "chance", "cbf"}));
  app.add_option("--horizon", o.horizon, "planning horizon N")->check(CLI::PositiveNumber);
  app.add_option("--delta", o.delta, "chance-constraint probability threshold");
  app.add_option("--gamma", o.gamma, "CBF decay rate");
  app.add_option("--seed", o.seed, "episode seed (overrides the config's seed list)");
  app.add_flag("--deterministic", o.deterministic, "zero all forecast covariances");
  app.add_option("--out", o.out, "output directory");

  auto* train = app.add_subcommand("train", "train the ensemble, write model + NLL log");
  auto* plan = app.add_subcommand("plan", "run one episode, write a JSONL trace");
  auto* bench = app.add_subcommand("bench", "sweep seeds x modes x horizons into a CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(o);
    if (plan->parsed()) return cmd_plan(o);
    if (bench->parsed()) return cmd_bench(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
