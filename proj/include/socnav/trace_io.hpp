#pragma once

#include <string>
#include <tuple>

#include <json.hpp>

#include "socnav/episode.hpp"

namespace socnav {

/// First line of every trace file: schema tag, provenance and the full
/// run configuration echoed as JSON so a trace is self-describing.
struct TraceHeader {
  std::string schema = "socnav-trace-v1";
  std::string scenario;
  std::uint64_t seed = 0;
  std::string model_hash = "none";
  nlohmann::json config = nlohmann::json::object();
};

/// JSON-lines trace: header object, one object per step record, then a
/// footer with the terminal instant and the metric tuple. Non-finite
/// numbers (an empty scene's min distance) are stored as null.
void write_trace(const std::string& path, const TraceHeader& header,
                 const EpisodeTrace& trace, const MetricsReport& report);

/// Parses a trace file back; throws std::runtime_error with the offending
/// line number on schema violations.
std::tuple<TraceHeader, EpisodeTrace, MetricsReport> read_trace(const std::string& path);

/// The trace serialized exactly as write_trace would emit it but with
/// every wall-clock field (solver_wall_ms, avg_compute_ms) zeroed: the
/// byte-comparable form used for determinism checks.
std::string canonical_trace(const TraceHeader& header, const EpisodeTrace& trace,
                            const MetricsReport& report);

std::string solve_status_to_string(SolveStatus status);
SolveStatus solve_status_from_string(const std::string& s);

}  // namespace socnav
