#include "socnav/network.hpp"

#include <cmath>

#include "socnav/detail/gru_params.hpp"
#include "socnav/rng.hpp"

namespace socnav {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void fill_uniform(Eigen::Ref<VectorXd> block, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (Eigen::Index i = 0; i < block.size(); ++i) {
    block(i) = rng.uniform(-bound, bound);
  }
}

VectorXd sigmoid(const VectorXd& x) {
  return (1.0 + (-x.array()).exp()).inverse().matrix();
}

}  // namespace

EnsembleMember init_member(const GruArchitecture& arch, std::uint64_t seed) {
  const detail::Offsets off(arch);
  EnsembleMember m;
  m.arch = arch;
  m.seed = seed;
  m.params = VectorXd::Zero(off.total);

  Rng rng(seed);
  const int wi = arch.hidden * arch.input;
  const int uu = arch.hidden * arch.hidden;
  fill_uniform(m.params.segment(off.wz, wi), arch.input, rng);
  fill_uniform(m.params.segment(off.uz, uu), arch.hidden, rng);
  fill_uniform(m.params.segment(off.wr, wi), arch.input, rng);
  fill_uniform(m.params.segment(off.ur, uu), arch.hidden, rng);
  fill_uniform(m.params.segment(off.wn, wi), arch.input, rng);
  fill_uniform(m.params.segment(off.un, uu), arch.hidden, rng);
  fill_uniform(m.params.segment(off.w1, arch.dec_hidden * arch.hidden), arch.hidden, rng);
  fill_uniform(m.params.segment(off.w2, arch.output_dim() * arch.dec_hidden),
               arch.dec_hidden, rng);
  // Biases stay zero.
  return m;
}

ForwardResult forward(const EnsembleMember& member, const HistoryWindow& history) {
  const GruArchitecture& a = member.arch;
  const detail::Offsets off(a);
  if (member.params.size() != off.total) {
    throw std::invalid_argument("forward: parameter vector does not match architecture");
  }
  const detail::ConstViews p(member.params.data(), a, off);
  const auto X = normalized_history(history);

  VectorXd h = VectorXd::Zero(a.hidden);
  for (int t = 0; t < kHistorySteps; ++t) {
    const Eigen::Vector4d x = X.row(t).transpose();
    const VectorXd z = sigmoid(p.Wz * x + p.Uz * h + p.bz);
    const VectorXd r = sigmoid(p.Wr * x + p.Ur * h + p.br);
    const VectorXd n = (p.Wn * x + p.Un * (r.cwiseProduct(h)) + p.bn).array().tanh();
    h = (1.0 - z.array()) * n.array() + z.array() * h.array();
    if (!h.allFinite()) {
      throw NonFiniteActivationError("encoder step " + std::to_string(t));
    }
  }

  const VectorXd d = (p.W1 * h + p.b1).array().tanh();
  if (!d.allFinite()) throw NonFiniteActivationError("decoder hidden");
  const VectorXd o = p.W2 * d + p.b2;
  if (!o.allFinite()) throw NonFiniteActivationError("output head");

  ForwardResult out;
  out.mean.resize(a.horizon, 2);
  out.variance.resize(a.horizon, 2);
  for (int k = 0; k < a.horizon; ++k) {
    out.mean(k, 0) = o(4 * k + 0);
    out.mean(k, 1) = o(4 * k + 1);
    for (int axis = 0; axis < 2; ++axis) {
      const double s = o(4 * k + 2 + axis);
      // softplus with a linear branch for large inputs to avoid overflow
      const double sp = s > 30.0 ? s : std::log1p(std::exp(s));
      out.variance(k, axis) = sp + kVarianceFloor;
    }
  }
  return out;
}

}  // namespace socnav
