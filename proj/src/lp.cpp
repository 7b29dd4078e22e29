#include "vgs/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vgs {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kReducedCostTol = 1e-11;

}  // namespace

// Standard full-tableau simplex on the shifted program
//   maximize t'  s.t.  -a_k . x' + t' <= s_k(lo) - T_lo   (slack rows)
//                       x'_j         <= w_j               (box rows)
//                       x', t' >= 0
// where x = lo + x', t = T_lo + t' and T_lo is an interval lower bound on
// every row's slack over the box, which makes the all-slack basis feasible
// from the start (every right-hand side is nonnegative).
LpResult max_min_slack(const std::vector<LpRow>& rows, const Box& box) {
  const Eigen::Index n = box.dim();
  LpResult res;
  if (is_empty(box)) {
    res.max_min_slack = -std::numeric_limits<double>::infinity();
    res.x = Eigen::VectorXd::Zero(n);
    return res;
  }
  if (rows.empty()) {
    res.max_min_slack = std::numeric_limits<double>::infinity();
    res.x = center(box).matrix();
    return res;
  }

  const Eigen::VectorXd lo = box.lower.matrix();
  const Eigen::VectorXd w = width(box).matrix();
  const int K = static_cast<int>(rows.size());

  double t_lo = std::numeric_limits<double>::infinity();
  for (const LpRow& r : rows) {
    if (r.a.size() != n) throw std::invalid_argument("lp: row dim mismatch");
    double m = r.a.dot(lo) + r.b;
    for (Eigen::Index j = 0; j < n; ++j) m += std::min(r.a[j] * w[j], 0.0);
    t_lo = std::min(t_lo, m);
  }

  const int m = K + static_cast<int>(n);        // constraint rows
  const int ns = static_cast<int>(n) + 1;       // structural: x', t'
  const int cols = ns + m + 1;                  // + slacks + rhs
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, cols);
  std::vector<int> basis(m);

  for (int k = 0; k < K; ++k) {
    tab.block(k, 0, 1, n) = -rows[k].a.transpose();
    tab(k, n) = 1.0;                                       // t'
    tab(k, ns + k) = 1.0;                                  // slack
    tab(k, cols - 1) = rows[k].a.dot(lo) + rows[k].b - t_lo;
    basis[k] = ns + k;
  }
  for (int j = 0; j < n; ++j) {
    tab(K + j, j) = 1.0;
    tab(K + j, ns + K + j) = 1.0;
    tab(K + j, cols - 1) = w[j];
    basis[K + j] = ns + K + j;
  }
  tab(m, n) = -1.0;  // maximize t': objective row holds z_j - c_j

  const int dantzig_limit = 200 * (m + ns);
  for (int iter = 0;; ++iter) {
    int enter = -1;
    if (iter < dantzig_limit) {
      double best = -kReducedCostTol;
      for (int j = 0; j < cols - 1; ++j) {
        if (tab(m, j) < best) {
          best = tab(m, j);
          enter = j;
        }
      }
    } else {  // Bland's rule: guaranteed finite
      for (int j = 0; j < cols - 1; ++j) {
        if (tab(m, j) < -kReducedCostTol) {
          enter = j;
          break;
        }
      }
    }
    if (enter < 0) break;  // optimal

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (tab(i, enter) > kPivotTol) {
        const double ratio = tab(i, cols - 1) / tab(i, enter);
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && leave >= 0 &&
             basis[i] < basis[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      // cannot happen for this program (t is interval-bounded); bail safely
      res.max_min_slack = std::numeric_limits<double>::infinity();
      res.x = center(box).matrix();
      return res;
    }

    const double piv = tab(leave, enter);
    tab.row(leave) /= piv;
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = tab(i, enter);
      if (f != 0.0) tab.row(i) -= f * tab.row(leave);
    }
    basis[leave] = enter;
  }

  Eigen::VectorXd xp = Eigen::VectorXd::Zero(ns);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < ns) xp[basis[i]] = tab(i, cols - 1);
  }
  res.x = lo + xp.head(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    res.x[j] = std::clamp(res.x[j], box.lower[j], box.upper[j]);
  }
  res.max_min_slack = t_lo + xp[n];
  return res;
}

}  // namespace vgs
