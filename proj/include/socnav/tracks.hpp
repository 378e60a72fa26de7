#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "socnav/history.hpp"
#include "socnav/loss.hpp"

namespace socnav {

/// One pedestrian's recorded walk, resampled to the 0.4 s tick. The track
/// occupies steps [entry_step, exit_step()] of the scene clock.
struct PedTrack {
  int ped_id = -1;
  int entry_step = 0;
  std::vector<Eigen::Vector2d> samples;  // consecutive positions, 0.4 s apart

  int size() const { return static_cast<int>(samples.size()); }
  int exit_step() const { return entry_step + size() - 1; }
  bool active_at(int step) const { return step >= entry_step && step <= exit_step(); }
  const Eigen::Vector2d& position_at(int step) const {
    return samples[static_cast<std::size_t>(step - entry_step)];
  }
  /// Finite-difference velocity at a step; the first sample copies the
  /// second's so every active step has a velocity.
  Eigen::Vector2d velocity_at(int step) const;
};

/// Non-fatal normalization notes from the loader (out-of-order frames,
/// duplicate frames, interpolated gaps), each tagged with a line number.
struct LoadReport {
  std::vector<std::string> warnings;
};

/// Parses whitespace rows of `frame_id ped_id x y`. Rows are grouped by
/// pedestrian and ordered by frame; the common frame stride (the gcd of
/// all frame gaps and entry offsets) maps frames onto the 0.4 s step
/// grid. Gaps spanning several strides are filled by linear interpolation
/// with a warning. Throws std::runtime_error naming the line for any row
/// that does not parse; an empty file yields an empty list.
std::vector<PedTrack> load_tracks(const std::string& path, LoadReport* report = nullptr);

/// Writes tracks back in the loader's row format.
void save_tracks(const std::vector<PedTrack>& tracks, const std::string& path);

/// Every length-20 sliding window (8 observed + 12 future steps) of every
/// track, with velocities from finite differences.
std::vector<TrainingSample> extract_training_samples(const std::vector<PedTrack>& tracks);

/// Deterministic walker set used as the bundled training corpus: gently
/// turning constant-speed walkers with small positional noise. `steps`
/// is the sample count per track (>= 20 keeps them trainable).
std::vector<PedTrack> make_synthetic_tracks(int count, std::uint64_t seed, int steps = 24);

}  // namespace socnav
