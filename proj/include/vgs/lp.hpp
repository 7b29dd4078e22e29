#pragma once

#include <vector>

#include "vgs/box.hpp"

namespace vgs {

/// One affine slack function s(x) = a . x + b.
struct LpRow {
  Eigen::VectorXd a;
  double b = 0.0;
};

struct LpResult {
  double max_min_slack = 0.0;
  Eigen::VectorXd x;
};

/// Solves max_t { t : a_k . x + b_k >= t for all k, x in box } with a dense
/// primal simplex. The box bounds make the program feasible and bounded
/// whenever rows is non-empty and the box is not. The returned x attains the
/// optimum, so min_k s_k(x) equals max_min_slack up to solver tolerance.
/// With no rows the slack is unconstrained: returns +infinity at the box
/// center. An empty box returns -infinity.
LpResult max_min_slack(const std::vector<LpRow>& rows, const Box& box);

}  // namespace vgs
