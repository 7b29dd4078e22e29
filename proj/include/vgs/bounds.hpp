#pragma once

#include <vector>

#include "vgs/box.hpp"
#include "vgs/network.hpp"

namespace vgs {

/// Element-wise output bounds by plain interval propagation. Sound, and
/// inclusion-isotonic: bounds of a sub-box are contained in the parent's.
Box bound_outputs(const Network& net, const Box& region);

/// Pre-activation bounds for every hidden layer plus output bounds,
/// tightened by a backward linear relaxation pass (interval result
/// intersected in, so never looser than bound_outputs).
struct NetworkBounds {
  std::vector<Eigen::VectorXd> pre_lo;  // per hidden layer
  std::vector<Eigen::VectorXd> pre_hi;
  Eigen::VectorXd out_lo, out_hi;
};

NetworkBounds analyze_bounds(const Network& net, const Box& region);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Sound bounds on the affine functional out_coeff . forward(net, x)
/// + in_coeff . x + constant over the region, reusing the relaxation data
/// in `nb` (which must come from analyze_bounds on the same region).
Interval bound_affine(const Network& net, const Box& region,
                      const NetworkBounds& nb,
                      const Eigen::VectorXd& out_coeff,
                      const Eigen::VectorXd& in_coeff, double constant);

}  // namespace vgs
