#include "socnav/loss.hpp"

#include <cmath>
#include <string>

#include "socnav/detail/gru_params.hpp"

namespace socnav {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double gaussian_nll(const Eigen::Vector2d& mean, const Eigen::Vector2d& variance,
                    const Eigen::Vector2d& target) {
  double loss = 0.0;
  for (int axis = 0; axis < 2; ++axis) {
    const double var = variance(axis);
    if (!(var > 0.0)) {
      throw std::domain_error("gaussian_nll: variance must be positive");
    }
    const double resid = target(axis) - mean(axis);
    loss += 0.5 * std::log(var) + resid * resid / (2.0 * var);
  }
  return loss;
}

namespace {

struct ForwardCache {
  Eigen::Matrix<double, kHistorySteps, 4> X;
  MatrixXd h;            // hidden x (T+1), column 0 is h_0 = 0
  MatrixXd z, r, n, hr;  // hidden x T
  VectorXd d, o;
  Eigen::Matrix<double, Eigen::Dynamic, 2> mean, var;
  Eigen::Matrix<double, Eigen::Dynamic, 2> target;  // shifted frame
};

VectorXd sigmoid(const VectorXd& x) {
  return (1.0 + (-x.array()).exp()).inverse().matrix();
}

void forward_cached(const detail::ConstViews& p, const GruArchitecture& a,
                    const TrainingSample& sample, ForwardCache& c) {
  c.X = normalized_history(sample.history);
  const Eigen::Vector2d origin = sample.history.last_position();

  c.h.setZero(a.hidden, kHistorySteps + 1);
  c.z.resize(a.hidden, kHistorySteps);
  c.r.resize(a.hidden, kHistorySteps);
  c.n.resize(a.hidden, kHistorySteps);
  c.hr.resize(a.hidden, kHistorySteps);

  for (int t = 0; t < kHistorySteps; ++t) {
    const Eigen::Vector4d x = c.X.row(t).transpose();
    const VectorXd h_prev = c.h.col(t);
    c.z.col(t) = sigmoid(p.Wz * x + p.Uz * h_prev + p.bz);
    c.r.col(t) = sigmoid(p.Wr * x + p.Ur * h_prev + p.br);
    c.hr.col(t) = c.r.col(t).cwiseProduct(h_prev);
    c.n.col(t) = (p.Wn * x + p.Un * c.hr.col(t) + p.bn).array().tanh();
    c.h.col(t + 1) = (1.0 - c.z.col(t).array()) * c.n.col(t).array() +
                     c.z.col(t).array() * h_prev.array();
    if (!c.h.col(t + 1).allFinite()) {
      throw NonFiniteActivationError("encoder step " + std::to_string(t));
    }
  }

  c.d = (p.W1 * c.h.col(kHistorySteps) + p.b1).array().tanh();
  if (!c.d.allFinite()) throw NonFiniteActivationError("decoder hidden");
  c.o = p.W2 * c.d + p.b2;
  if (!c.o.allFinite()) throw NonFiniteActivationError("output head");

  c.mean.resize(a.horizon, 2);
  c.var.resize(a.horizon, 2);
  c.target.resize(a.horizon, 2);
  for (int k = 0; k < a.horizon; ++k) {
    for (int axis = 0; axis < 2; ++axis) {
      c.mean(k, axis) = c.o(4 * k + axis);
      const double s = c.o(4 * k + 2 + axis);
      const double sp = s > 30.0 ? s : std::log1p(std::exp(s));
      c.var(k, axis) = sp + kVarianceFloor;
      c.target(k, axis) = sample.future(k, axis) - origin(axis);
    }
  }
}

double cache_loss(const ForwardCache& c, const GruArchitecture& a) {
  double loss = 0.0;
  for (int k = 0; k < a.horizon; ++k) {
    for (int axis = 0; axis < 2; ++axis) {
      const double resid = c.target(k, axis) - c.mean(k, axis);
      loss += 0.5 * std::log(c.var(k, axis)) + resid * resid / (2.0 * c.var(k, axis));
    }
  }
  return loss;
}

void backward(const detail::ConstViews& p, detail::MutViews& g,
              const GruArchitecture& a, const ForwardCache& c) {
  // Head gradient: d loss / d o.
  VectorXd go(a.output_dim());
  for (int k = 0; k < a.horizon; ++k) {
    for (int axis = 0; axis < 2; ++axis) {
      const double var = c.var(k, axis);
      const double resid = c.mean(k, axis) - c.target(k, axis);
      go(4 * k + axis) = resid / var;
      const double dvar = 0.5 / var - resid * resid / (2.0 * var * var);
      const double s = c.o(4 * k + 2 + axis);
      go(4 * k + 2 + axis) = dvar / (1.0 + std::exp(-s));  // softplus'
    }
  }

  g.W2 += go * c.d.transpose();
  g.b2 += go;
  const VectorXd gd = p.W2.transpose() * go;
  const VectorXd gpre1 = gd.array() * (1.0 - c.d.array().square());
  g.W1 += gpre1 * c.h.col(kHistorySteps).transpose();
  g.b1 += gpre1;

  VectorXd gh = p.W1.transpose() * gpre1;
  for (int t = kHistorySteps - 1; t >= 0; --t) {
    const Eigen::Vector4d x = c.X.row(t).transpose();
    const VectorXd h_prev = c.h.col(t);
    const auto z = c.z.col(t).array();
    const auto r = c.r.col(t).array();
    const auto n = c.n.col(t).array();

    const VectorXd gz = (gh.array() * (h_prev.array() - n)).matrix();
    const VectorXd gn = (gh.array() * (1.0 - z)).matrix();
    VectorXd gh_prev = (gh.array() * z).matrix();

    const VectorXd gan = (gn.array() * (1.0 - n.square())).matrix();
    g.Wn += gan * x.transpose();
    g.Un += gan * c.hr.col(t).transpose();
    g.bn += gan;
    const VectorXd ghr = p.Un.transpose() * gan;
    const VectorXd gr = ghr.cwiseProduct(h_prev);
    gh_prev += ghr.cwiseProduct(c.r.col(t));

    const VectorXd gar = (gr.array() * r * (1.0 - r)).matrix();
    g.Wr += gar * x.transpose();
    g.Ur += gar * h_prev.transpose();
    g.br += gar;
    gh_prev += p.Ur.transpose() * gar;

    const VectorXd gaz = (gz.array() * z * (1.0 - z)).matrix();
    g.Wz += gaz * x.transpose();
    g.Uz += gaz * h_prev.transpose();
    g.bz += gaz;
    gh_prev += p.Uz.transpose() * gaz;

    gh = gh_prev;
  }
}

}  // namespace

double sample_nll(const EnsembleMember& member, const TrainingSample& sample) {
  const detail::Offsets off(member.arch);
  const detail::ConstViews p(member.params.data(), member.arch, off);
  ForwardCache c;
  forward_cached(p, member.arch, sample, c);
  return cache_loss(c, member.arch);
}

double batch_nll(const EnsembleMember& member, std::span<const TrainingSample> batch) {
  if (batch.empty()) throw std::invalid_argument("batch_nll: empty batch");
  double total = 0.0;
  for (const auto& s : batch) total += sample_nll(member, s);
  return total / static_cast<double>(batch.size());
}

double nll_gradient(const EnsembleMember& member, std::span<const TrainingSample> batch,
                    VectorXd& grad) {
  if (batch.empty()) throw std::invalid_argument("nll_gradient: empty batch");
  const GruArchitecture& a = member.arch;
  const detail::Offsets off(a);
  const detail::ConstViews p(member.params.data(), a, off);

  grad.setZero(off.total);
  detail::MutViews g(grad.data(), a, off);

  double total = 0.0;
  ForwardCache c;
  for (const auto& sample : batch) {
    forward_cached(p, a, sample, c);
    total += cache_loss(c, a);
    backward(p, g, a, c);
  }
  grad /= static_cast<double>(batch.size());

  if (!grad.allFinite()) {
    Eigen::Index bad = 0;
    for (; bad < grad.size(); ++bad) {
      if (!std::isfinite(grad(bad))) break;
    }
    throw std::runtime_error("nll_gradient: non-finite gradient at parameter index " +
                             std::to_string(bad));
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace socnav
