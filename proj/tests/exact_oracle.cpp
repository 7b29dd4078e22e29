#include "exact_oracle.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace vgs::testing {

namespace {

using Rational = boost::multiprecision::cpp_rational;

/// Affine form over the inputs: coefficients first, constant last.
using Affine = std::vector<Rational>;

Affine zero_affine(std::size_t n) { return Affine(n + 1, Rational(0)); }

void add_scaled(Affine& acc, const Rational& s, const Affine& f) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s * f[i];
}

Affine negated(const Affine& f) {
  Affine r = f;
  for (auto& v : r) v = -v;
  return r;
}

/// Rescales so the largest magnitude is 1; keeps Fourier-Motzkin products
/// from snowballing into huge numerators.
void normalize(Affine& f) {
  Rational best(0);
  for (const auto& v : f) {
    Rational a = v < 0 ? Rational(-v) : v;
    if (a > best) best = a;
  }
  if (best == 0) return;
  for (auto& v : f) v /= best;
}

/// Decides whether {x : f(x) >= 0 for all f} is non-empty by eliminating
/// variables from the back. All constraints are closed, which makes the
/// elimination exact.
bool feasible(std::vector<Affine> rows, std::size_t dims) {
  for (std::size_t d = dims; d-- > 0;) {
    std::vector<Affine> lows, ups, next;
    for (auto& r : rows) {
      if (r[d] > 0) {
        lows.push_back(std::move(r));
      } else if (r[d] < 0) {
        ups.push_back(std::move(r));
      } else {
        next.push_back(std::move(r));
      }
    }
    for (const auto& lo : lows) {
      for (const auto& up : ups) {
        Affine combo = zero_affine(dims);
        add_scaled(combo, -up[d], lo);
        add_scaled(combo, lo[d], up);
        combo[d] = 0;
        normalize(combo);
        next.push_back(std::move(combo));
      }
    }
    rows = std::move(next);
  }
  for (const auto& r : rows)
    if (r.back() < 0) return false;
  return true;
}

struct RationalLayer {
  std::vector<Affine> weights;  // one row per unit, constant slot unused
  std::vector<Rational> bias;
};

/// One property constraint expressed over (x, y), constant already shifted
/// for strict rows.
struct PropertyRow {
  std::vector<Rational> out_coeff;
  Affine in_part;  // in_coeff plus shifted constant
};

class Search {
 public:
  Search(const Network& net, const SafetyProperty& p, const Box& box,
         double strict_slack)
      : n_(static_cast<std::size_t>(net.input_dim())) {
    for (const auto& layer : net.layers) {
      RationalLayer rl;
      for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
        Affine row(static_cast<std::size_t>(layer.weights.cols()) + 1,
                   Rational(0));
        for (Eigen::Index j = 0; j < layer.weights.cols(); ++j)
          row[static_cast<std::size_t>(j)] = Rational(layer.weights(i, j));
        rl.weights.push_back(std::move(row));
        rl.bias.push_back(Rational(layer.bias[i]));
      }
      layers_.push_back(std::move(rl));
    }
    const Rational tau(strict_slack);
    const std::size_t out_dim = static_cast<std::size_t>(net.output_dim());
    if (p.argmax_selector) {
      const std::size_t sel = static_cast<std::size_t>(*p.argmax_selector);
      const Rational margin(p.margin);
      const Rational shift = margin > 0 ? margin : Rational(0);
      for (std::size_t j = 0; j < out_dim; ++j) {
        if (j == sel) continue;
        PropertyRow r;
        r.out_coeff.assign(out_dim, Rational(0));
        r.out_coeff[sel] = 1;
        r.out_coeff[j] = -1;
        r.in_part = zero_affine(n_);
        r.in_part.back() = -shift;
        if (j < sel && margin <= 0) r.in_part.back() -= tau;
        prop_.push_back(std::move(r));
      }
    }
    for (const auto& t : p.linear_terms) {
      const bool lower =
          t.relation == Relation::gt || t.relation == Relation::ge;
      const bool strict =
          t.relation == Relation::gt || t.relation == Relation::lt;
      const Rational sign = lower ? 1 : -1;
      PropertyRow r;
      r.out_coeff.assign(out_dim, Rational(0));
      for (std::size_t k = 0; k < out_dim; ++k)
        r.out_coeff[k] = sign * Rational(t.out_coeff[static_cast<Eigen::Index>(k)]);
      r.in_part = zero_affine(n_);
      for (std::size_t k = 0; k < n_; ++k)
        r.in_part[k] = sign * Rational(t.in_coeff[static_cast<Eigen::Index>(k)]);
      r.in_part.back() = sign * Rational(t.constant);
      if (strict) r.in_part.back() -= tau;
      prop_.push_back(std::move(r));
    }
    for (std::size_t j = 0; j < n_; ++j) {
      Affine lo = zero_affine(n_);
      lo[j] = 1;
      lo.back() = -Rational(box.lower[static_cast<Eigen::Index>(j)]);
      cons_.push_back(std::move(lo));
      Affine hi = zero_affine(n_);
      hi[j] = -1;
      hi.back() = Rational(box.upper[static_cast<Eigen::Index>(j)]);
      cons_.push_back(std::move(hi));
    }
  }

  bool run() {
    std::vector<Affine> inputs;
    for (std::size_t j = 0; j < n_; ++j) {
      Affine e = zero_affine(n_);
      e[j] = 1;
      inputs.push_back(std::move(e));
    }
    descend_layer(0, inputs);
    return sat_;
  }

 private:
  std::vector<Affine> pre_activation(std::size_t l,
                                     const std::vector<Affine>& acts) const {
    const RationalLayer& layer = layers_[l];
    std::vector<Affine> pre;
    for (std::size_t i = 0; i < layer.weights.size(); ++i) {
      Affine f = zero_affine(n_);
      for (std::size_t j = 0; j < acts.size(); ++j)
        add_scaled(f, layer.weights[i][j], acts[j]);
      f.back() += layer.bias[i];
      pre.push_back(std::move(f));
    }
    return pre;
  }

  void descend_layer(std::size_t l, const std::vector<Affine>& acts) {
    if (sat_) return;
    const std::vector<Affine> pre = pre_activation(l, acts);
    if (l + 1 == layers_.size()) {
      std::vector<Affine> rows = cons_;
      for (const auto& r : prop_) {
        Affine f = r.in_part;
        for (std::size_t k = 0; k < pre.size(); ++k)
          add_scaled(f, r.out_coeff[k], pre[k]);
        rows.push_back(std::move(f));
      }
      if (feasible(std::move(rows), n_)) sat_ = true;
      return;
    }
    std::vector<Affine> post;
    descend_unit(l, pre, 0, post);
  }

  void descend_unit(std::size_t l, const std::vector<Affine>& pre,
                    std::size_t k, std::vector<Affine>& post) {
    if (sat_) return;
    if (k == pre.size()) {
      descend_layer(l + 1, post);
      return;
    }
    cons_.push_back(pre[k]);
    if (feasible(cons_, n_)) {
      post.push_back(pre[k]);
      descend_unit(l, pre, k + 1, post);
      post.pop_back();
    }
    cons_.pop_back();
    if (sat_) return;
    cons_.push_back(negated(pre[k]));
    if (feasible(cons_, n_)) {
      post.push_back(zero_affine(n_));
      descend_unit(l, pre, k + 1, post);
      post.pop_back();
    }
    cons_.pop_back();
  }

  std::size_t n_;
  std::vector<RationalLayer> layers_;
  std::vector<PropertyRow> prop_;
  std::vector<Affine> cons_;
  bool sat_ = false;
};

}  // namespace

bool exact_sat(const Network& net, const SafetyProperty& property,
               const Box& region, double strict_slack) {
  validate(net);
  const Box root = intersect(region, property.input_box);
  if (is_empty(root)) return false;
  Search search(net, property, root, strict_slack);
  return search.run();
}

}  // namespace vgs::testing
