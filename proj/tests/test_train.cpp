#include <doctest.h>

#include <cmath>
#include <vector>

#include "socnav/ensemble.hpp"
#include "socnav/rng.hpp"
#include "socnav/tracks.hpp"
#include "socnav/train.hpp"
#include "test_util.hpp"

using namespace socnav;

namespace {

// Constant-velocity walkers with small positional noise: the regime where
// straight-line extrapolation is a strong yardstick for the predictor.
std::vector<PedTrack> cv_tracks(int count, std::uint64_t seed, int steps = 24) {
  Rng rng(seed);
  std::vector<PedTrack> tracks;
  for (int i = 0; i < count; ++i) {
    PedTrack t;
    t.ped_id = i;
    Eigen::Vector2d pos(rng.uniform(-5, 5), rng.uniform(-5, 5));
    const double heading = rng.uniform(-M_PI, M_PI);
    const double speed = rng.uniform(0.6, 1.4);
    const Eigen::Vector2d vel = speed * Eigen::Vector2d(std::cos(heading), std::sin(heading));
    for (int s = 0; s < steps; ++s) {
      t.samples.push_back(pos + 0.01 * Eigen::Vector2d(rng.normal(), rng.normal()));
      pos += kSampleDt * vel;
    }
    tracks.push_back(std::move(t));
  }
  return tracks;
}

TrainConfig small_config() {
  TrainConfig c;
  c.members = 2;
  c.epochs = 12;
  c.batch = 32;
  c.hidden = 16;
  c.dec_hidden = 16;
  c.base_seed = 0;
  return c;
}

// Mean displacement error of the ensemble's predicted means over a sample
// set, all steps pooled.
double ensemble_ade(const Ensemble& ens, const std::vector<TrainingSample>& samples) {
  double total = 0.0;
  long n = 0;
  for (const auto& s : samples) {
    const GaussianForecast f = ensemble_predict(ens, s.history);
    for (int k = 0; k < kForecastSteps; ++k) {
      total += (f.steps[static_cast<std::size_t>(k)].mean -
                s.future.row(k).transpose())
                   .norm();
      ++n;
    }
  }
  return total / static_cast<double>(n);
}

// Straight-line extrapolation from the window's last position and velocity.
double cv_baseline_ade(const std::vector<TrainingSample>& samples) {
  double total = 0.0;
  long n = 0;
  for (const auto& s : samples) {
    const auto& last = s.history.observations.back();
    const Eigen::Vector2d pos(last.x, last.y);
    const Eigen::Vector2d vel(last.u, last.v);
    for (int k = 0; k < kForecastSteps; ++k) {
      const Eigen::Vector2d pred = pos + (k + 1) * kSampleDt * vel;
      total += (pred - s.future.row(k).transpose()).norm();
      ++n;
    }
  }
  return total / static_cast<double>(n);
}

}  // namespace

TEST_SUITE("train") {

TEST_CASE("training lowers every member's NLL and logs every epoch") {
  const auto samples = extract_training_samples(cv_tracks(16, 3));
  const TrainConfig cfg = small_config();
  std::vector<EpochLogRow> log;
  const Ensemble ens = train_ensemble(samples, cfg, &log);

  REQUIRE(ens.size() == cfg.members);
  CHECK(static_cast<int>(log.size()) == cfg.members * cfg.epochs);
  for (const EnsembleMember& m : ens.members) {
    CHECK(m.finite());
    CHECK(m.final_nll < m.initial_nll);
  }
  // Log rows arrive member-major with strictly increasing epochs inside.
  for (int mi = 0; mi < cfg.members; ++mi) {
    for (int e = 0; e < cfg.epochs; ++e) {
      const EpochLogRow& row = log[static_cast<std::size_t>(mi * cfg.epochs + e)];
      CHECK(row.member == mi);
      CHECK(row.epoch == e);
      CHECK(std::isfinite(row.nll));
    }
  }
  // The ensemble records its training provenance.
  CHECK(ens.epochs == cfg.epochs);
  CHECK(ens.batch == cfg.batch);
  CHECK(ens.learning_rate == cfg.learning_rate);
  CHECK(ens.base_seed == cfg.base_seed);
}

TEST_CASE("training is bitwise deterministic for a fixed seed") {
  const auto samples = extract_training_samples(cv_tracks(10, 5));
  TrainConfig cfg = small_config();
  cfg.members = 2;
  cfg.epochs = 6;
  const Ensemble a = train_ensemble(samples, cfg);
  const Ensemble b = train_ensemble(samples, cfg);
  REQUIRE(a.size() == b.size());
  for (int i = 0; i < a.size(); ++i) {
    CHECK((a.members[static_cast<std::size_t>(i)].params -
           b.members[static_cast<std::size_t>(i)].params)
              .norm() == 0.0);
    CHECK(a.members[static_cast<std::size_t>(i)].final_nll ==
          b.members[static_cast<std::size_t>(i)].final_nll);
  }
  // Members with different seeds end in different weights.
  CHECK((a.members[0].params - a.members[1].params).norm() > 0.0);
  // A different base seed moves every member.
  cfg.base_seed = 1;
  const Ensemble c = train_ensemble(samples, cfg);
  CHECK((a.members[0].params - c.members[0].params).norm() > 0.0);
}

TEST_CASE("trained means beat 1.5x the straight-line baseline on CV walks") {
  const auto tracks = cv_tracks(30, 9);
  const auto samples = extract_training_samples(tracks);
  TrainConfig cfg = small_config();
  cfg.members = 1;
  cfg.epochs = 30;
  cfg.hidden = 24;
  cfg.dec_hidden = 24;
  const Ensemble ens = train_ensemble(samples, cfg);
  const double ade = ensemble_ade(ens, samples);
  const double baseline = cv_baseline_ade(samples);
  CAPTURE(ade);
  CAPTURE(baseline);
  CHECK(ade < 1.5 * baseline);
}

TEST_CASE("a single-member ensemble trains and predicts") {
  const auto samples = extract_training_samples(cv_tracks(8, 11, 21));
  TrainConfig cfg = small_config();
  cfg.members = 1;
  cfg.epochs = 4;
  const Ensemble ens = train_ensemble(samples, cfg);
  REQUIRE(ens.size() == 1);
  const GaussianForecast f = ensemble_predict(ens, samples.front().history);
  CHECK(static_cast<int>(f.steps.size()) == kForecastSteps);
  for (const auto& s : f.steps) {
    CHECK(s.mean.allFinite());
    CHECK(s.cov(0, 0) > 0.0);
    CHECK(s.cov(1, 1) > 0.0);
  }
}

TEST_CASE("invalid setups are rejected up front") {
  const auto samples = extract_training_samples(cv_tracks(4, 13));
  TrainConfig cfg = small_config();
  cfg.members = 0;
  CHECK_THROWS_AS(train_ensemble(samples, cfg), std::invalid_argument);
  CHECK_THROWS_AS(train_ensemble({}, small_config()), std::invalid_argument);
}

TEST_CASE("an exploding step reports which member and epoch diverged") {
  const auto samples = extract_training_samples(cv_tracks(6, 17));
  TrainConfig cfg = small_config();
  cfg.members = 2;
  cfg.epochs = 5;
  cfg.learning_rate = 1e18;  // guarantees overflow within the first epochs
  try {
    train_ensemble(samples, cfg);
    FAIL("expected TrainingDivergenceError");
  } catch (const TrainingDivergenceError& e) {
    CHECK(e.member() == 0);
    CHECK(e.epoch() >= 0);
    CHECK(e.epoch() <= cfg.epochs);  // epochs marks the final whole-set check
    CHECK(std::string(e.what()).find("member") != std::string::npos);
  }
}

}  // TEST_SUITE
