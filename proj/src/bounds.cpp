#include "vgs/bounds.hpp"

#include <stdexcept>

namespace vgs {
namespace {

struct IntervalVec {
  Eigen::VectorXd lo, hi;
};

IntervalVec affine_interval(const Eigen::MatrixXd& w, const Eigen::VectorXd& b,
                            const IntervalVec& in) {
  const Eigen::MatrixXd wp = w.cwiseMax(0.0);
  const Eigen::MatrixXd wn = w.cwiseMin(0.0);
  IntervalVec out;
  out.lo = wp * in.lo + wn * in.hi + b;
  out.hi = wp * in.hi + wn * in.lo + b;
  return out;
}

// Sound LOWER bound of lambda . h_m + extra . x + c over the region, where
// h_m is the activation vector of hidden layer m (m = -1: the input itself).
// Each unstable relu with pre-activation range [l, u] is pinched between a
// zero-or-identity lower line (picked adaptively) and the chord through
// (l, 0), (u, u); the sign of the running coefficient decides which side
// keeps the bound sound.
double backward_lower(const Network& net, const Box& region,
                      const NetworkBounds& nb, int m, Eigen::VectorXd lambda,
                      const Eigen::VectorXd& extra, double c) {
  for (int layer = m; layer >= 0; --layer) {
    const Eigen::VectorXd& l = nb.pre_lo[layer];
    const Eigen::VectorXd& u = nb.pre_hi[layer];
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      if (l[i] >= 0.0) continue;  // stably active: identity
      if (u[i] <= 0.0) {          // stably inactive: zero
        lambda[i] = 0.0;
        continue;
      }
      const double up_slope = u[i] / (u[i] - l[i]);
      const double up_icept = -up_slope * l[i];
      if (lambda[i] >= 0.0) {
        lambda[i] *= (u[i] >= -l[i]) ? 1.0 : 0.0;
      } else {
        c += lambda[i] * up_icept;
        lambda[i] *= up_slope;
      }
    }
    const Layer& lay = net.layers[layer];
    c += lambda.dot(lay.bias);
    lambda = (lambda.transpose() * lay.weights).transpose();
  }
  lambda += extra;
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    c += lambda[j] >= 0.0 ? lambda[j] * region.lower[j]
                          : lambda[j] * region.upper[j];
  }
  return c;
}

}  // namespace

Box bound_outputs(const Network& net, const Box& region) {
  if (region.dim() != net.input_dim())
    throw std::invalid_argument("bound_outputs: region dimension mismatch");
  IntervalVec v{region.lower.matrix(), region.upper.matrix()};
  for (const Layer& lay : net.layers) {
    v = affine_interval(lay.weights, lay.bias, v);
    if (lay.activation == Activation::relu) {
      v.lo = v.lo.cwiseMax(0.0);
      v.hi = v.hi.cwiseMax(0.0);
    }
  }
  return Box(v.lo.array(), v.hi.array());
}

NetworkBounds analyze_bounds(const Network& net, const Box& region) {
  if (region.dim() != net.input_dim())
    throw std::invalid_argument("analyze_bounds: region dimension mismatch");
  const int hidden = static_cast<int>(net.layers.size()) - 1;
  const Eigen::VectorXd no_extra = Eigen::VectorXd::Zero(net.input_dim());
  NetworkBounds nb;
  nb.pre_lo.resize(hidden);
  nb.pre_hi.resize(hidden);

  IntervalVec act{region.lower.matrix(), region.upper.matrix()};
  for (int layer = 0; layer < hidden; ++layer) {
    const Layer& lay = net.layers[layer];
    IntervalVec pre = affine_interval(lay.weights, lay.bias, act);
    if (layer > 0) {
      for (Eigen::Index i = 0; i < pre.lo.size(); ++i) {
        const Eigen::VectorXd row = lay.weights.row(i).transpose();
        const double lo = backward_lower(net, region, nb, layer - 1, row,
                                         no_extra, lay.bias[i]);
        const double hi = -backward_lower(net, region, nb, layer - 1, -row,
                                          no_extra, -lay.bias[i]);
        pre.lo[i] = std::max(pre.lo[i], lo);
        pre.hi[i] = std::min(pre.hi[i], hi);
      }
    }
    nb.pre_lo[layer] = pre.lo;
    nb.pre_hi[layer] = pre.hi;
    act.lo = pre.lo.cwiseMax(0.0);
    act.hi = pre.hi.cwiseMax(0.0);
  }

  const Layer& out = net.layers.back();
  IntervalVec o = affine_interval(out.weights, out.bias, act);
  for (Eigen::Index i = 0; i < o.lo.size(); ++i) {
    const Eigen::VectorXd row = out.weights.row(i).transpose();
    const double lo = backward_lower(net, region, nb, hidden - 1, row,
                                     no_extra, out.bias[i]);
    const double hi = -backward_lower(net, region, nb, hidden - 1, -row,
                                      no_extra, -out.bias[i]);
    o.lo[i] = std::max(o.lo[i], lo);
    o.hi[i] = std::min(o.hi[i], hi);
  }
  nb.out_lo = o.lo;
  nb.out_hi = o.hi;
  return nb;
}

Interval bound_affine(const Network& net, const Box& region,
                      const NetworkBounds& nb,
                      const Eigen::VectorXd& out_coeff,
                      const Eigen::VectorXd& in_coeff, double constant) {
  const int hidden = static_cast<int>(net.layers.size()) - 1;
  const Layer& out = net.layers.back();
  // fold the output layer: out_coeff . y = (out_coeff^T W) h + out_coeff . b
  const Eigen::VectorXd lam = (out_coeff.transpose() * out.weights).transpose();
  const double c0 = constant + out_coeff.dot(out.bias);
  Interval r;
  r.lo = backward_lower(net, region, nb, hidden - 1, lam, in_coeff, c0);
  r.hi = -backward_lower(net, region, nb, hidden - 1, -lam, -in_coeff, -c0);
  return r;
}

}  // namespace vgs
