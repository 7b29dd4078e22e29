#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace vgs {

enum class Activation { relu, identity };

template <class Scalar>
struct LayerT {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix weights;  // weights(i, j) multiplies input j into output i
  Vector bias;
  Activation activation = Activation::relu;
};

/// Feed-forward ReLU MLP. Hidden layers are relu, the final layer identity.
/// Immutable after construction; safe to share across readers.
template <class Scalar>
struct NetworkT {
  std::vector<LayerT<Scalar>> layers;

  Eigen::Index input_dim() const {
    return layers.empty() ? 0 : layers.front().weights.cols();
  }
  Eigen::Index output_dim() const {
    return layers.empty() ? 0 : layers.back().weights.rows();
  }
};

using Layer = LayerT<double>;
using Network = NetworkT<double>;

/// Checks the structural invariants: non-empty, chained dimensions, relu
/// hidden / identity output activations, finite coefficients. Throws
/// std::invalid_argument with a description of the first violation.
template <class Scalar>
void validate(const NetworkT<Scalar>& net) {
  if (net.layers.empty()) throw std::invalid_argument("network: no layers");
  Eigen::Index prev = net.layers.front().weights.cols();
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const auto& layer = net.layers[k];
    if (layer.weights.rows() == 0 || layer.weights.cols() == 0)
      throw std::invalid_argument("network: empty weight matrix");
    if (layer.weights.cols() != prev)
      throw std::invalid_argument("network: layer dimensions do not chain");
    if (layer.bias.size() != layer.weights.rows())
      throw std::invalid_argument("network: bias size mismatch");
    if (!layer.weights.allFinite() || !layer.bias.allFinite())
      throw std::invalid_argument("network: non-finite coefficient");
    const bool last = k + 1 == net.layers.size();
    if (last && layer.activation != Activation::identity)
      throw std::invalid_argument("network: final layer must be identity");
    if (!last && layer.activation != Activation::relu)
      throw std::invalid_argument("network: hidden layers must be relu");
    prev = layer.weights.rows();
  }
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> forward(
    const NetworkT<Scalar>& net,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  if (x.size() != net.input_dim())
    throw std::invalid_argument("forward: input dimension mismatch");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z = x;
  for (const auto& layer : net.layers) {
    z = (layer.weights * z + layer.bias).eval();
    if (layer.activation == Activation::relu) z = z.cwiseMax(Scalar(0));
  }
  return z;
}

/// Index of the maximal component; ties break toward the lowest index.
template <class Derived>
int argmax_index(const Eigen::DenseBase<Derived>& y) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(y.size()); ++i)
    if (y[i] > y[best]) best = i;
  return best;
}

/// One discrete move: a direction (output index) and the raw output value
/// at that index.
struct ActionChoice {
  int direction = 0;
  double magnitude = 0.0;
};

inline bool operator==(const ActionChoice& a, const ActionChoice& b) {
  return a.direction == b.direction && a.magnitude == b.magnitude;
}

template <class Scalar>
ActionChoice select_action(const NetworkT<Scalar>& net,
                           const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  const auto y = forward(net, x);
  const int d = argmax_index(y);
  return ActionChoice{d, static_cast<double>(y[d])};
}

}  // namespace vgs
