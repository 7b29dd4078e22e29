#include "vgs/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "vgs/bounds.hpp"
#include "vgs/lp.hpp"
#include "vgs/rng.hpp"

namespace vgs {

namespace {

/// One compiled constraint: the property fires at x iff every row satisfies
/// out_coeff . N(x) + in_coeff . x + constant >= 0, strictly for strict rows.
struct Row {
  Eigen::VectorXd out_coeff;
  Eigen::VectorXd in_coeff;
  double constant = 0.0;
  bool strict = false;
};

std::vector<Row> compile_rows(const SafetyProperty& p, Eigen::Index in_dim,
                              Eigen::Index out_dim) {
  std::vector<Row> rows;
  if (p.argmax_selector) {
    const int sel = *p.argmax_selector;
    if (sel < 0 || sel >= out_dim)
      throw std::invalid_argument("verify: selector out of range");
    const double shift = std::max(p.margin, 0.0);
    for (Eigen::Index j = 0; j < out_dim; ++j) {
      if (j == sel) continue;
      Row r;
      r.out_coeff = Eigen::VectorXd::Zero(out_dim);
      r.out_coeff[sel] = 1.0;
      r.out_coeff[j] = -1.0;
      r.in_coeff = Eigen::VectorXd::Zero(in_dim);
      r.constant = -shift;
      // Lower-index outputs win argmax ties, so the selector needs a strict
      // win over them unless the margin already forces one.
      r.strict = j < sel && p.margin <= 0.0;
      rows.push_back(std::move(r));
    }
  }
  for (const auto& t : p.linear_terms) {
    if (t.out_coeff.size() != out_dim || t.in_coeff.size() != in_dim)
      throw std::invalid_argument("verify: term dimension mismatch");
    const bool lower =
        t.relation == Relation::gt || t.relation == Relation::ge;
    const double sign = lower ? 1.0 : -1.0;
    Row r;
    r.out_coeff = sign * t.out_coeff;
    r.in_coeff = sign * t.in_coeff;
    r.constant = sign * t.constant;
    r.strict = t.relation == Relation::gt || t.relation == Relation::lt;
    rows.push_back(std::move(r));
  }
  return rows;
}

struct UnstableRef {
  std::size_t layer;
  Eigen::Index unit;
};

class Engine {
 public:
  Engine(const Network& net, const SafetyProperty& property,
         const VerifierConfig& cfg)
      : net_(net), property_(property), cfg_(cfg),
        rows_(compile_rows(property, net.input_dim(), net.output_dim())),
        start_(std::chrono::steady_clock::now()) {}

  Verdict run(Box root) {
    Verdict v;
    if (is_empty(root)) {
      v.kind = VerdictKind::unsat;
      v.stats = stats();
      return v;
    }
    std::vector<Box> stack{std::move(root)};
    bool unconfirmed = false;
    while (!stack.empty()) {
      if (branches_ >= cfg_.max_branches || elapsed() > cfg_.max_seconds) {
        v.kind = VerdictKind::inconclusive;
        v.stats = stats();
        return v;
      }
      const Box box = std::move(stack.back());
      stack.pop_back();
      ++branches_;

      if (probe_point(center(box).matrix(), &v)) return v;

      const NetworkBounds nb = analyze_bounds(net_, box);
      if (pruned(box, nb)) continue;

      if (probe_random(box, &v)) return v;

      // Degenerate slivers cannot shrink relu bounds any further; the box is
      // a point for all practical purposes, so its center decides it.
      if ((width(box) < 1e-12).all()) {
        if (relaxed_at(center(box).matrix())) unconfirmed = true;
        continue;
      }

      std::vector<UnstableRef> unstable = census(nb);
      if (static_cast<int>(unstable.size()) <= cfg_.enum_max_unstable) {
        switch (enumerate_patterns(box, nb, unstable, &v)) {
          case Outcome::sat: return v;
          case Outcome::unconfirmed: unconfirmed = true; break;
          case Outcome::unsat: break;
        }
        continue;
      }

      auto halves = split(box, widest_dim(box));
      stack.push_back(std::move(halves.second));
      stack.push_back(std::move(halves.first));
    }
    // An unconfirmed leaf means the relaxation found a satisfying point that
    // would not replay strictly; never report UNSAT over one.
    v.kind = unconfirmed ? VerdictKind::inconclusive : VerdictKind::unsat;
    v.stats = stats();
    return v;
  }

 private:
  enum class Outcome { unsat, sat, unconfirmed };

  double required(const Row& r) const {
    return r.strict ? cfg_.strict_slack : 0.0;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

  VerifierStats stats() const {
    return VerifierStats{branches_, lp_calls_, elapsed()};
  }

  bool pruned(const Box& box, const NetworkBounds& nb) const {
    for (const auto& r : rows_) {
      const Interval iv =
          bound_affine(net_, box, nb, r.out_coeff, r.in_coeff, r.constant);
      if (iv.hi < required(r)) return true;
    }
    return false;
  }

  bool relaxed_at(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd y = forward(net_, x);
    for (const auto& r : rows_) {
      const double s = r.out_coeff.dot(y) + r.in_coeff.dot(x) + r.constant;
      if (s < required(r)) return false;
    }
    return true;
  }

  bool probe_point(const Eigen::VectorXd& x, Verdict* v) {
    const Eigen::VectorXd y = forward(net_, x);
    if (!holds(property_, x, y)) return false;
    v->kind = VerdictKind::sat;
    v->witness = Violation{x, y, property_.name};
    v->stats = stats();
    return true;
  }

  bool probe_random(const Box& box, Verdict* v) {
    Rng rng(derive_seed(cfg_.probe_seed, branches_));
    for (int k = 0; k < cfg_.probe_samples; ++k)
      if (probe_point(sample(box, rng), v)) return true;
    return false;
  }

  std::vector<UnstableRef> census(const NetworkBounds& nb) const {
    std::vector<UnstableRef> refs;
    for (std::size_t l = 0; l < nb.pre_lo.size(); ++l)
      for (Eigen::Index i = 0; i < nb.pre_lo[l].size(); ++i)
        if (nb.pre_lo[l][i] < 0.0 && nb.pre_hi[l][i] > 0.0)
          refs.push_back(UnstableRef{l, i});
    return refs;
  }

  /// Fixing the sign of every unstable relu makes the network affine on the
  /// corresponding cell of the box; one feasibility LP per sign pattern then
  /// decides the box exactly (under the strict_slack relaxation). The cells
  /// cover the box, so if every LP comes back infeasible the box is UNSAT.
  Outcome enumerate_patterns(const Box& box, const NetworkBounds& nb,
                             const std::vector<UnstableRef>& unstable,
                             Verdict* v) {
    const Eigen::Index n = net_.input_dim();
    const std::size_t hidden = net_.layers.size() - 1;
    bool unconfirmed = false;
    for (std::uint64_t mask = 0; mask < (1ULL << unstable.size()); ++mask) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
      std::vector<LpRow> lp_rows;
      std::size_t pos = 0;
      for (std::size_t l = 0; l < hidden; ++l) {
        const Layer& layer = net_.layers[l];
        Eigen::MatrixXd pre_m = layer.weights * m;
        Eigen::VectorXd pre_c = layer.weights * c + layer.bias;
        for (Eigen::Index i = 0; i < pre_c.size(); ++i) {
          bool active;
          if (nb.pre_lo[l][i] >= 0.0) {
            active = true;
          } else if (nb.pre_hi[l][i] <= 0.0) {
            active = false;
          } else {
            active = (mask >> pos) & 1ULL;
            ++pos;
            const double sign = active ? 1.0 : -1.0;
            lp_rows.push_back(
                LpRow{sign * pre_m.row(i).transpose(), sign * pre_c[i]});
          }
          if (!active) {
            pre_m.row(i).setZero();
            pre_c[i] = 0.0;
          }
        }
        m = std::move(pre_m);
        c = std::move(pre_c);
      }
      const Layer& out = net_.layers.back();
      const Eigen::MatrixXd out_m = out.weights * m;
      const Eigen::VectorXd out_c = out.weights * c + out.bias;
      for (const auto& r : rows_) {
        lp_rows.push_back(
            LpRow{out_m.transpose() * r.out_coeff + r.in_coeff,
                  r.out_coeff.dot(out_c) + r.constant - required(r)});
      }
      ++lp_calls_;
      const LpResult sol = max_min_slack(lp_rows, box);
      if (sol.max_min_slack < 0.0) continue;
      if (confirm_witness(box, sol.x, v)) return Outcome::sat;
      unconfirmed = true;
    }
    return unconfirmed ? Outcome::unconfirmed : Outcome::unsat;
  }

  /// The LP point carries at least strict_slack of slack on every strict
  /// row, far above forward-evaluation rounding, so the literal strict
  /// re-check is expected to pass. If rounding still spoils it, retry pulled
  /// slightly toward the box center; confirm nothing otherwise.
  bool confirm_witness(const Box& box, const Eigen::VectorXd& x, Verdict* v) {
    const Eigen::ArrayXd mid = center(box);
    for (double f : {0.0, 1e-12, 1e-9, 1e-6}) {
      Eigen::ArrayXd xf = (1.0 - f) * x.array() + f * mid;
      const Eigen::VectorXd xp =
          xf.max(box.lower).min(box.upper).matrix();
      if (probe_point(xp, v)) return true;
    }
    return false;
  }

  const Network& net_;
  const SafetyProperty& property_;
  const VerifierConfig& cfg_;
  std::vector<Row> rows_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t branches_ = 0;
  std::uint64_t lp_calls_ = 0;
};

}  // namespace

Verdict verify(const Network& net, const SafetyProperty& property,
               const Box& region, const VerifierConfig& cfg) {
  validate(net);
  if (region.dim() != net.input_dim())
    throw std::invalid_argument("verify: region dimension mismatch");
  if (property.input_box.dim() != net.input_dim())
    throw std::invalid_argument("verify: property dimension mismatch");
  if (cfg.strict_slack <= 0.0)
    throw std::invalid_argument("verify: strict_slack must be positive");
  if (cfg.enum_max_unstable < 0 || cfg.enum_max_unstable > 20)
    throw std::invalid_argument("verify: enum_max_unstable out of range");
  Engine engine(net, property, cfg);
  return engine.run(intersect(region, property.input_box));
}

Verdict verify_any(const Network& net,
                   const std::vector<SafetyProperty>& properties,
                   const Box& region, const VerifierConfig& cfg) {
  Verdict combined;
  combined.kind = VerdictKind::unsat;
  for (const auto& p : properties) {
    Verdict v = verify(net, p, region, cfg);
    combined.stats.branches += v.stats.branches;
    combined.stats.lp_calls += v.stats.lp_calls;
    combined.stats.wall_seconds += v.stats.wall_seconds;
    if (v.kind == VerdictKind::sat) {
      combined.kind = VerdictKind::sat;
      combined.witness = std::move(v.witness);
      return combined;
    }
    if (v.kind == VerdictKind::inconclusive)
      combined.kind = VerdictKind::inconclusive;
  }
  return combined;
}

}  // namespace vgs
