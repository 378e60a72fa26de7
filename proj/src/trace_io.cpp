#include "socnav/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace socnav {
namespace {

using nlohmann::json;

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double double_or_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json to_json(const RobotState& s) {
  return json::array({s.px, s.py, s.heading, s.vx, s.vy, s.yaw_rate, s.steer});
}

RobotState state_from_json(const json& j) {
  Vec7 v;
  for (int i = 0; i < 7; ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
  return RobotState::from_vec(v);
}

json forecast_to_json(const GaussianForecast& f) {
  json steps = json::array();
  for (const GaussianStep& s : f.steps) {
    steps.push_back({{"mean", {s.mean.x(), s.mean.y()}},
                     {"cov", {s.cov(0, 0), s.cov(0, 1), s.cov(1, 0), s.cov(1, 1)}}});
  }
  return {{"ped_id", f.pedestrian_id},
          {"start_time", f.start_time},
          {"origin", {f.origin.x(), f.origin.y()}},
          {"steps", std::move(steps)}};
}

GaussianForecast forecast_from_json(const json& j) {
  GaussianForecast f;
  f.pedestrian_id = j.at("ped_id").get<int>();
  f.start_time = j.at("start_time").get<int>();
  f.origin = {j.at("origin").at(0).get<double>(), j.at("origin").at(1).get<double>()};
  for (const json& sj : j.at("steps")) {
    GaussianStep s;
    s.mean = {sj.at("mean").at(0).get<double>(), sj.at("mean").at(1).get<double>()};
    const json& c = sj.at("cov");
    s.cov << c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>(),
        c.at(3).get<double>();
    f.steps.push_back(s);
  }
  return f;
}

json step_to_json(const StepRecord& r, bool zero_wall) {
  json forecasts = json::array();
  for (const GaussianForecast& f : r.forecasts) forecasts.push_back(forecast_to_json(f));
  json peds = json::array();
  for (const PedSnapshot& p : r.pedestrians) {
    peds.push_back({{"id", p.ped_id}, {"pos", {p.position.x(), p.position.y()}}});
  }
  return {{"step", r.step},
          {"time", r.time},
          {"state", to_json(r.state)},
          {"control", {r.control.force, r.control.steer_rate}},
          {"forecasts", std::move(forecasts)},
          {"pedestrians", std::move(peds)},
          {"status", solve_status_to_string(r.solver_status)},
          {"fallback", r.fallback},
          {"iterations", r.iterations},
          {"wall_ms", zero_wall ? 0.0 : r.solver_wall_ms},
          {"objective", r.objective},
          {"max_violation", r.max_violation},
          {"min_dist", num_or_null(r.min_ped_distance)}};
}

StepRecord step_from_json(const json& j) {
  StepRecord r;
  r.step = j.at("step").get<int>();
  r.time = j.at("time").get<double>();
  r.state = state_from_json(j.at("state"));
  r.control = {j.at("control").at(0).get<double>(), j.at("control").at(1).get<double>()};
  for (const json& fj : j.at("forecasts")) r.forecasts.push_back(forecast_from_json(fj));
  for (const json& pj : j.at("pedestrians")) {
    r.pedestrians.push_back(
        {pj.at("id").get<int>(),
         {pj.at("pos").at(0).get<double>(), pj.at("pos").at(1).get<double>()}});
  }
  r.solver_status = solve_status_from_string(j.at("status").get<std::string>());
  r.fallback = j.at("fallback").get<bool>();
  r.iterations = j.at("iterations").get<int>();
  r.solver_wall_ms = j.at("wall_ms").get<double>();
  r.objective = j.at("objective").get<double>();
  r.max_violation = j.at("max_violation").get<double>();
  r.min_ped_distance = double_or_inf(j.at("min_dist"));
  return r;
}

json metrics_to_json(const MetricsReport& m, bool zero_wall) {
  return {{"trajectory_length", m.trajectory_length},
          {"total_time", m.total_time},
          {"min_distance", num_or_null(m.min_distance)},
          {"avg_compute_ms", zero_wall ? 0.0 : m.avg_compute_ms},
          {"success", m.success},
          {"failure_reason", to_string(m.failure_reason)},
          {"safety_breached", m.safety_breached},
          {"steps", m.steps}};
}

MetricsReport metrics_from_json(const json& j) {
  MetricsReport m;
  m.trajectory_length = j.at("trajectory_length").get<double>();
  m.total_time = j.at("total_time").get<double>();
  m.min_distance = double_or_inf(j.at("min_distance"));
  m.avg_compute_ms = j.at("avg_compute_ms").get<double>();
  m.success = j.at("success").get<bool>();
  m.failure_reason = failure_reason_from_string(j.at("failure_reason").get<std::string>());
  m.safety_breached = j.at("safety_breached").get<bool>();
  m.steps = j.at("steps").get<int>();
  return m;
}

std::string build_lines(const TraceHeader& header, const EpisodeTrace& trace,
                        const MetricsReport& report, bool zero_wall) {
  std::ostringstream out;
  const json head = {{"schema", header.schema},
                     {"scenario", header.scenario},
                     {"seed", header.seed},
                     {"model_hash", header.model_hash},
                     {"config", header.config}};
  out << head.dump() << '\n';
  for (const StepRecord& r : trace.records) out << step_to_json(r, zero_wall).dump() << '\n';
  const json footer = {
      {"final",
       {{"state", to_json(trace.final_state)},
        {"time", trace.final_time},
        {"min_distance", num_or_null(trace.final_min_distance)},
        {"goal_distance", trace.final_goal_distance},
        {"reached_goal", trace.reached_goal},
        {"termination", to_string(trace.termination)}}},
      {"metrics", metrics_to_json(report, zero_wall)},
      {"meta", {{"scenario", trace.scenario_name}, {"seed", trace.seed}, {"dt", trace.dt}}}};
  out << footer.dump() << '\n';
  return out.str();
}

}  // namespace

std::string solve_status_to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::InfeasibleRelaxed: return "infeasible_relaxed";
  }
  return "max_iter";
}

SolveStatus solve_status_from_string(const std::string& s) {
  if (s == "converged") return SolveStatus::Converged;
  if (s == "max_iter") return SolveStatus::MaxIter;
  if (s == "infeasible_relaxed") return SolveStatus::InfeasibleRelaxed;
  throw std::invalid_argument("unknown solve status '" + s + "'");
}

void write_trace(const std::string& path, const TraceHeader& header,
                 const EpisodeTrace& trace, const MetricsReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_trace: cannot open " + path);
  out << build_lines(header, trace, report, false);
  if (!out) throw std::runtime_error("write_trace: write failed for " + path);
}

std::string canonical_trace(const TraceHeader& header, const EpisodeTrace& trace,
                            const MetricsReport& report) {
  return build_lines(header, trace, report, true);
}

std::tuple<TraceHeader, EpisodeTrace, MetricsReport> read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_trace: cannot open " + path);

  TraceHeader header;
  EpisodeTrace trace;
  MetricsReport report;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  bool saw_footer = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!saw_header) {
        header.schema = j.at("schema").get<std::string>();
        if (header.schema != "socnav-trace-v1") {
          throw std::runtime_error("unsupported schema '" + header.schema + "'");
        }
        header.scenario = j.at("scenario").get<std::string>();
        header.seed = j.at("seed").get<std::uint64_t>();
        header.model_hash = j.at("model_hash").get<std::string>();
        header.config = j.at("config");
        saw_header = true;
      } else if (j.contains("metrics")) {
        const json& fin = j.at("final");
        trace.final_state = state_from_json(fin.at("state"));
        trace.final_time = fin.at("time").get<double>();
        trace.final_min_distance = double_or_inf(fin.at("min_distance"));
        trace.final_goal_distance = fin.at("goal_distance").get<double>();
        trace.reached_goal = fin.at("reached_goal").get<bool>();
        trace.termination =
            failure_reason_from_string(fin.at("termination").get<std::string>());
        report = metrics_from_json(j.at("metrics"));
        trace.scenario_name = j.at("meta").at("scenario").get<std::string>();
        trace.seed = j.at("meta").at("seed").get<std::uint64_t>();
        trace.dt = j.at("meta").at("dt").get<double>();
        saw_footer = true;
      } else {
        trace.records.push_back(step_from_json(j));
      }
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!saw_header) throw std::runtime_error(path + ": missing trace header line");
  if (!saw_footer) throw std::runtime_error(path + ": missing trace footer line");
  return {header, trace, report};
}

}  // namespace socnav
