#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "vgs/network.hpp"
#include "vgs/property.hpp"
#include "vgs/rng.hpp"

namespace vgs::testing {

inline Layer make_layer(std::initializer_list<std::initializer_list<double>> w,
                        std::initializer_list<double> b, Activation act) {
  Layer layer;
  layer.weights.resize(static_cast<Eigen::Index>(w.size()),
                       static_cast<Eigen::Index>(w.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : w) {
    Eigen::Index c = 0;
    for (double v : row) layer.weights(r, c++) = v;
    ++r;
  }
  layer.bias.resize(static_cast<Eigen::Index>(b.size()));
  Eigen::Index i = 0;
  for (double v : b) layer.bias[i++] = v;
  layer.activation = act;
  return layer;
}

// 2-2-1 net: hidden unit 1 is active on [0,1]^2 (pre-act in [3,7]), hidden
// unit 2 inactive (pre-act in [-4,-1]), so the net is affine there with
// output 6*(x0 + 3*x1 + 3), range [18,42].
inline Network toy_net() {
  Network net;
  net.layers.push_back(
      make_layer({{1.0, 3.0}, {-2.0, -1.0}}, {3.0, -1.0}, Activation::relu));
  net.layers.push_back(make_layer({{6.0, -1.0}}, {0.0}, Activation::identity));
  return net;
}

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Network random_net(const std::vector<int>& shape, Rng& rng,
                          double scale = 1.5) {
  Network net;
  for (std::size_t k = 1; k < shape.size(); ++k) {
    Layer layer;
    layer.weights.resize(shape[k], shape[k - 1]);
    layer.bias.resize(shape[k]);
    const double s = scale / std::sqrt(static_cast<double>(shape[k - 1]));
    for (int i = 0; i < shape[k]; ++i) {
      for (int j = 0; j < shape[k - 1]; ++j)
        layer.weights(i, j) = s * rng.normal();
      layer.bias[i] = 0.3 * rng.normal();
    }
    layer.activation =
        k + 1 == shape.size() ? Activation::identity : Activation::relu;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

/// A reproducible verification instance for cross-checking the verifier
/// against the exact rational oracle: a random 2-6-6-3 net plus a random
/// property mixing argmax selectors, relations, and input terms.
struct OracleCase {
  Network net;
  SafetyProperty property;
};

inline OracleCase oracle_case(std::uint64_t index) {
  Rng rng(derive_seed(0xacedULL, index));
  OracleCase c;
  c.net = random_net({2, 6, 6, 3}, rng);
  SafetyProperty p;
  p.name = "case" + std::to_string(index);
  p.input_box = unit_box<double>(2);
  if (rng.below(2) == 0) {
    p.argmax_selector = static_cast<int>(rng.below(3));
    if (rng.below(4) == 0) p.margin = rng.uniform(0.0, 0.3);
  }
  const int terms = 1 + static_cast<int>(rng.below(2));
  for (int t = 0; t < terms; ++t) {
    LinearTerm term;
    term.out_coeff = Eigen::VectorXd(3);
    for (int k = 0; k < 3; ++k) term.out_coeff[k] = rng.normal();
    term.in_coeff = Eigen::VectorXd(2);
    for (int k = 0; k < 2; ++k) term.in_coeff[k] = 0.5 * rng.normal();
    term.constant = rng.uniform(-1.0, 1.0);
    term.relation = static_cast<Relation>(rng.below(4));
    p.linear_terms.push_back(std::move(term));
  }
  c.property = std::move(p);
  return c;
}

}  // namespace vgs::testing
