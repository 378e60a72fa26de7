#include <doctest.h>

#include <cmath>
#include <vector>

#include "socnav/loss.hpp"
#include "socnav/rng.hpp"
#include "test_util.hpp"

using namespace socnav;
using testing::cv_history;
using testing::max_rel_err;

namespace {

TrainingSample cv_sample(const Eigen::Vector2d& end, const Eigen::Vector2d& vel) {
  TrainingSample s;
  s.history = cv_history(end, vel);
  s.future.resize(kForecastSteps, 2);
  for (int k = 0; k < kForecastSteps; ++k) {
    s.future.row(k) = (end + (k + 1) * kSampleDt * vel).transpose();
  }
  return s;
}

std::vector<TrainingSample> random_batch(Rng& rng, int n) {
  std::vector<TrainingSample> batch;
  for (int i = 0; i < n; ++i) {
    batch.push_back(cv_sample({rng.uniform(-3, 3), rng.uniform(-3, 3)},
                              {rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)}));
    // Bend the futures a little so targets are not perfectly linear.
    for (int k = 0; k < kForecastSteps; ++k) {
      batch.back().future(k, 0) += 0.05 * rng.normal();
      batch.back().future(k, 1) += 0.05 * rng.normal();
    }
  }
  return batch;
}

}  // namespace

TEST_SUITE("loss") {

TEST_CASE("gaussian_nll worked examples") {
  // Exact hit with unit variance: both axis terms vanish.
  CHECK(gaussian_nll({1.0, -2.0}, {1.0, 1.0}, {1.0, -2.0}) == doctest::Approx(0.0));
  // Unit miss on one axis: 0 + 1/2.
  CHECK(gaussian_nll({0.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // Exact hit, variance e on both axes: 2 * log(e)/2 = 1.
  const double e = std::exp(1.0);
  CHECK(gaussian_nll({0.3, 0.4}, {e, e}, {0.3, 0.4}) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gaussian_nll matches a direct evaluation on random inputs") {
  Rng rng(61);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector2d mean(rng.normal(), rng.normal());
    const Eigen::Vector2d var(rng.uniform(0.01, 4.0), rng.uniform(0.01, 4.0));
    const Eigen::Vector2d y(rng.normal(), rng.normal());
    double want = 0.0;
    for (int a = 0; a < 2; ++a) {
      want += 0.5 * std::log(var(a)) + (y(a) - mean(a)) * (y(a) - mean(a)) / (2 * var(a));
    }
    CHECK(gaussian_nll(mean, var, y) == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("gaussian_nll rejects non-positive variances") {
  CHECK_THROWS_AS(gaussian_nll({0, 0}, {0.0, 1.0}, {0, 0}), std::domain_error);
  CHECK_THROWS_AS(gaussian_nll({0, 0}, {1.0, -0.5}, {0, 0}), std::domain_error);
}

TEST_CASE("sample_nll is the sum of the per-step NLLs of the forward pass") {
  GruArchitecture arch;
  arch.hidden = 10;
  arch.dec_hidden = 10;
  const EnsembleMember m = init_member(arch, 2);
  const TrainingSample s = cv_sample({1.0, 0.5}, {0.8, -0.4});
  const ForwardResult out = forward(m, s.history);
  // Recompute in the shifted frame the loss is defined in.
  const Eigen::Vector2d origin = s.history.last_position();
  double want = 0.0;
  for (int k = 0; k < kForecastSteps; ++k) {
    want += gaussian_nll(out.mean.row(k).transpose(), out.variance.row(k).transpose(),
                         s.future.row(k).transpose() - origin);
  }
  CHECK(sample_nll(m, s) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("batch_nll averages sample_nll") {
  GruArchitecture arch;
  arch.hidden = 8;
  arch.dec_hidden = 8;
  const EnsembleMember m = init_member(arch, 9);
  Rng rng(67);
  const auto batch = random_batch(rng, 5);
  double want = 0.0;
  for (const auto& s : batch) want += sample_nll(m, s);
  want /= static_cast<double>(batch.size());
  CHECK(batch_nll(m, batch) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("analytic NLL gradient matches central finite differences") {
  // A handful of random small networks here; the acceptance suite sweeps
  // fifty. The step 1e-5 balances truncation against cancellation for
  // parameters of order one.
  Rng rng(71);
  for (int trial = 0; trial < 6; ++trial) {
    GruArchitecture arch;
    arch.hidden = 5 + static_cast<int>(trial % 3);
    arch.dec_hidden = 4 + static_cast<int>(trial % 2);
    EnsembleMember m = init_member(arch, 100 + static_cast<std::uint64_t>(trial));
    const auto batch = random_batch(rng, 2);

    Eigen::VectorXd grad;
    const double loss = nll_gradient(m, batch, grad);
    CHECK(loss == doctest::Approx(batch_nll(m, batch)).epsilon(1e-12));
    REQUIRE(grad.size() == m.params.size());

    const double h = 1e-5;
    Eigen::VectorXd fd(grad.size());
    for (Eigen::Index j = 0; j < m.params.size(); ++j) {
      const double saved = m.params(j);
      m.params(j) = saved + h;
      const double hi = batch_nll(m, batch);
      m.params(j) = saved - h;
      const double lo = batch_nll(m, batch);
      m.params(j) = saved;
      fd(j) = (hi - lo) / (2 * h);
    }
    CHECK(max_rel_err(grad, fd) < 1e-5);
  }
}

TEST_CASE("gradient stays finite on random members and batches") {
  Rng rng(73);
  GruArchitecture arch;
  arch.hidden = 12;
  arch.dec_hidden = 12;
  for (int trial = 0; trial < 5; ++trial) {
    const EnsembleMember m = init_member(arch, 200 + static_cast<std::uint64_t>(trial));
    const auto batch = random_batch(rng, 3);
    Eigen::VectorXd grad;
    const double loss = nll_gradient(m, batch, grad);
    CHECK(std::isfinite(loss));
    CHECK(grad.allFinite());
  }
}

TEST_CASE("a poisoned parameter vector raises the activation error") {
  GruArchitecture arch;
  arch.hidden = 6;
  arch.dec_hidden = 6;
  EnsembleMember m = init_member(arch, 4);
  m.params(3) = std::numeric_limits<double>::infinity();
  Rng rng(79);
  const auto batch = random_batch(rng, 1);
  Eigen::VectorXd grad;
  CHECK_THROWS_AS(nll_gradient(m, batch, grad), NonFiniteActivationError);
}

}  // TEST_SUITE
