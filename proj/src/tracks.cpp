#include "socnav/tracks.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "socnav/rng.hpp"

namespace socnav {
namespace {

struct RawRow {
  long frame = 0;
  int ped_id = 0;
  double x = 0.0;
  double y = 0.0;
  int line = 0;

  bool operator==(const RawRow&) const = default;
};

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

long integral_or_throw(double v, const std::string& path, int line) {
  const double r = std::round(v);
  if (!std::isfinite(v) || std::abs(v - r) > 1e-9) {
    throw std::runtime_error(path + ":" + std::to_string(line) +
                             ": frame id is not an integer");
  }
  return static_cast<long>(r);
}

}  // namespace

Eigen::Vector2d PedTrack::velocity_at(int step) const {
  const int i = step - entry_step;
  if (size() < 2) return Eigen::Vector2d::Zero();
  const int j = std::max(i, 1);  // first sample copies the second's velocity
  return (samples[static_cast<std::size_t>(j)] - samples[static_cast<std::size_t>(j - 1)]) /
         kSampleDt;
}

std::vector<PedTrack> load_tracks(const std::string& path, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_tracks: cannot open " + path);

  std::vector<RawRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    std::istringstream ls(line);
    double frame = 0.0, ped = 0.0;
    RawRow row;
    if (!(ls >> frame >> ped >> row.x >> row.y)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected `frame_id ped_id x y`");
    }
    std::string extra;
    if (ls >> extra) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": trailing token '" + extra + "'");
    }
    if (!std::isfinite(row.x) || !std::isfinite(row.y)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": non-finite coordinate");
    }
    row.frame = integral_or_throw(frame, path, line_no);
    row.ped_id = static_cast<int>(integral_or_throw(ped, path, line_no));
    row.line = line_no;
    rows.push_back(row);
  }
  if (rows.empty()) return {};

  // Group by pedestrian, preserving first-appearance order.
  std::vector<int> order;
  std::map<int, std::vector<RawRow>> by_ped;
  for (const RawRow& r : rows) {
    auto [it, inserted] = by_ped.try_emplace(r.ped_id);
    if (inserted) order.push_back(r.ped_id);
    it->second.push_back(r);
  }

  auto warn = [&](const std::string& msg) {
    if (report != nullptr) report->warnings.push_back(msg);
  };

  // Common frame stride: gcd of all in-track gaps and entry offsets, so
  // every frame lands exactly on the step grid.
  long min_frame = rows.front().frame;
  for (const RawRow& r : rows) min_frame = std::min(min_frame, r.frame);
  long stride = 0;
  for (auto& [id, group] : by_ped) {
    std::vector<RawRow> sorted = group;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const RawRow& a, const RawRow& b) { return a.frame < b.frame; });
    if (sorted != group) {
      warn(path + ":" + std::to_string(group.front().line) + ": pedestrian " +
           std::to_string(id) + " had out-of-order frames; sorted");
    }
    group = std::move(sorted);
    stride = std::gcd(stride, group.front().frame - min_frame);
    for (std::size_t i = 1; i < group.size(); ++i) {
      stride = std::gcd(stride, group[i].frame - group[i - 1].frame);
    }
  }
  if (stride == 0) stride = 1;  // single frame overall

  std::vector<PedTrack> tracks;
  tracks.reserve(order.size());
  for (int id : order) {
    const std::vector<RawRow>& group = by_ped[id];
    PedTrack t;
    t.ped_id = id;
    t.entry_step = static_cast<int>((group.front().frame - min_frame) / stride);
    for (std::size_t i = 0; i < group.size(); ++i) {
      const Eigen::Vector2d p(group[i].x, group[i].y);
      if (i == 0) {
        t.samples.push_back(p);
        continue;
      }
      const long gap = (group[i].frame - group[i - 1].frame) / stride;
      if (gap == 0) {
        warn(path + ":" + std::to_string(group[i].line) + ": duplicate frame " +
             std::to_string(group[i].frame) + " for pedestrian " + std::to_string(id) +
             "; kept first");
        continue;
      }
      if (gap > 1) {
        warn(path + ":" + std::to_string(group[i].line) + ": gap of " + std::to_string(gap) +
             " steps for pedestrian " + std::to_string(id) + "; interpolated");
      }
      const Eigen::Vector2d prev = t.samples.back();
      for (long g = 1; g <= gap; ++g) {
        const double a = static_cast<double>(g) / static_cast<double>(gap);
        t.samples.push_back((1.0 - a) * prev + a * p);
      }
    }
    tracks.push_back(std::move(t));
  }
  return tracks;
}

void save_tracks(const std::vector<PedTrack>& tracks, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_tracks: cannot open " + path);
  out.precision(17);
  for (const PedTrack& t : tracks) {
    for (int i = 0; i < t.size(); ++i) {
      out << (t.entry_step + i) << ' ' << t.ped_id << ' '
          << t.samples[static_cast<std::size_t>(i)].x() << ' '
          << t.samples[static_cast<std::size_t>(i)].y() << '\n';
    }
  }
  if (!out) throw std::runtime_error("save_tracks: write failed for " + path);
}

std::vector<TrainingSample> extract_training_samples(const std::vector<PedTrack>& tracks) {
  const int window = kHistorySteps + kForecastSteps;
  std::vector<TrainingSample> out;
  for (const PedTrack& t : tracks) {
    for (int s = 0; s + window <= t.size(); ++s) {
      TrainingSample sample;
      for (int k = 0; k < kHistorySteps; ++k) {
        const int step = t.entry_step + s + k;
        const Eigen::Vector2d p = t.position_at(step);
        const Eigen::Vector2d v = t.velocity_at(step);
        sample.history.observations[static_cast<std::size_t>(k)] = {p.x(), p.y(), v.x(),
                                                                    v.y()};
      }
      sample.future.resize(kForecastSteps, 2);
      for (int k = 0; k < kForecastSteps; ++k) {
        sample.future.row(k) = t.position_at(t.entry_step + s + kHistorySteps + k);
      }
      out.push_back(std::move(sample));
    }
  }
  return out;
}

std::vector<PedTrack> make_synthetic_tracks(int count, std::uint64_t seed, int steps) {
  if (count < 1 || steps < 2) {
    throw std::invalid_argument("make_synthetic_tracks: count >= 1 and steps >= 2 required");
  }
  Rng rng(seed);
  std::vector<PedTrack> tracks;
  tracks.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    PedTrack t;
    t.ped_id = i;
    t.entry_step = 0;
    Eigen::Vector2d pos(rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0));
    double heading = rng.uniform(-M_PI, M_PI);
    // One walker in five loiters near standstill so the predictor also sees
    // (and learns) the stationary regime; the rest walk at pedestrian pace.
    const double speed = (i % 5 == 4) ? rng.uniform(0.0, 0.25) : rng.uniform(0.6, 1.6);
    const double drift = rng.uniform(-0.08, 0.08);  // per-step turn bias
    for (int s = 0; s < steps; ++s) {
      t.samples.push_back(pos + 0.01 * Eigen::Vector2d(rng.normal(), rng.normal()));
      heading += drift + 0.03 * rng.normal();
      pos += speed * kSampleDt * Eigen::Vector2d(std::cos(heading), std::sin(heading));
    }
    tracks.push_back(std::move(t));
  }
  return tracks;
}

}  // namespace socnav
