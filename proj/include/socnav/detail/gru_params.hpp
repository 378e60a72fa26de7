#pragma once

#include <Eigen/Core>
#include <type_traits>

#include "socnav/network.hpp"

namespace socnav::detail {

using Eigen::Map;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Segment offsets into the flat parameter vector. Order: the three GRU
/// gates (update, reset, candidate) each as [W (hidden x input), U (hidden x
/// hidden), b (hidden)], then decoder hidden [W1, b1], then output head
/// [W2, b2].
struct Offsets {
  int wz, uz, bz, wr, ur, br, wn, un, bn, w1, b1, w2, b2, total;

  explicit Offsets(const GruArchitecture& a) {
    const int wi = a.hidden * a.input;
    const int uu = a.hidden * a.hidden;
    const int h = a.hidden;
    int o = 0;
    wz = o; o += wi; uz = o; o += uu; bz = o; o += h;
    wr = o; o += wi; ur = o; o += uu; br = o; o += h;
    wn = o; o += wi; un = o; o += uu; bn = o; o += h;
    w1 = o; o += a.dec_hidden * a.hidden;
    b1 = o; o += a.dec_hidden;
    w2 = o; o += a.output_dim() * a.dec_hidden;
    b2 = o; o += a.output_dim();
    total = o;
  }
};

/// Matrix views over a parameter (or gradient) vector. IsConst selects
/// between Map<const Matrix> and Map<Matrix>.
template <bool IsConst>
struct Views {
  using Mat = Map<std::conditional_t<IsConst, const MatrixXd, MatrixXd>>;
  using Vec = Map<std::conditional_t<IsConst, const VectorXd, VectorXd>>;
  using Ptr = std::conditional_t<IsConst, const double*, double*>;

  Mat Wz, Uz, Wr, Ur, Wn, Un, W1, W2;
  Vec bz, br, bn, b1, b2;

  Views(Ptr data, const GruArchitecture& a, const Offsets& o)
      : Wz(data + o.wz, a.hidden, a.input),
        Uz(data + o.uz, a.hidden, a.hidden),
        Wr(data + o.wr, a.hidden, a.input),
        Ur(data + o.ur, a.hidden, a.hidden),
        Wn(data + o.wn, a.hidden, a.input),
        Un(data + o.un, a.hidden, a.hidden),
        W1(data + o.w1, a.dec_hidden, a.hidden),
        W2(data + o.w2, a.output_dim(), a.dec_hidden),
        bz(data + o.bz, a.hidden),
        br(data + o.br, a.hidden),
        bn(data + o.bn, a.hidden),
        b1(data + o.b1, a.dec_hidden),
        b2(data + o.b2, a.output_dim()) {}
};

using ConstViews = Views<true>;
using MutViews = Views<false>;

}  // namespace socnav::detail
