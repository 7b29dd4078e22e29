#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <utility>

#include "vgs/rng.hpp"

namespace vgs {

/// Axis-aligned hyperrectangle [lower, upper], closed on both sides.
template <class Scalar>
struct BoxT {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Array lower;
  Array upper;

  BoxT() = default;
  BoxT(Array lo, Array hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size())
      throw std::invalid_argument("box: lower/upper dimension mismatch");
  }

  Eigen::Index dim() const { return lower.size(); }
};

using Box = BoxT<double>;

template <class Scalar>
BoxT<Scalar> unit_box(Eigen::Index dim) {
  using Array = typename BoxT<Scalar>::Array;
  return BoxT<Scalar>(Array::Zero(dim), Array::Ones(dim));
}

inline Box make_box(std::initializer_list<double> lo,
                    std::initializer_list<double> hi) {
  Box::Array l(static_cast<Eigen::Index>(lo.size()));
  Box::Array u(static_cast<Eigen::Index>(hi.size()));
  Eigen::Index i = 0;
  for (double v : lo) l[i++] = v;
  i = 0;
  for (double v : hi) u[i++] = v;
  return Box(std::move(l), std::move(u));
}

/// A box is empty when some lower bound exceeds its upper bound.
template <class Scalar>
bool is_empty(const BoxT<Scalar>& b) {
  return (b.lower > b.upper).any();
}

template <class Scalar>
typename BoxT<Scalar>::Array width(const BoxT<Scalar>& b) {
  return (b.upper - b.lower).max(Scalar(0));
}

template <class Scalar>
Scalar volume(const BoxT<Scalar>& b) {
  if (b.dim() == 0 || is_empty(b)) return Scalar(0);
  return width(b).prod();
}

template <class Scalar, class Derived>
bool contains(const BoxT<Scalar>& b, const Eigen::DenseBase<Derived>& x) {
  const auto xa = x.derived().array();
  return (xa >= b.lower).all() && (xa <= b.upper).all();
}

template <class Scalar>
Eigen::Index widest_dim(const BoxT<Scalar>& b) {
  Eigen::Index i = 0;
  width(b).maxCoeff(&i);
  return i;
}

/// Bisects along dimension d at the midpoint; both halves stay closed.
template <class Scalar>
std::pair<BoxT<Scalar>, BoxT<Scalar>> split(const BoxT<Scalar>& b,
                                            Eigen::Index d) {
  const Scalar mid = (b.lower[d] + b.upper[d]) / Scalar(2);
  BoxT<Scalar> left = b;
  BoxT<Scalar> right = b;
  left.upper[d] = mid;
  right.lower[d] = mid;
  return {left, right};
}

template <class Scalar>
BoxT<Scalar> intersect(const BoxT<Scalar>& a, const BoxT<Scalar>& b) {
  return BoxT<Scalar>(a.lower.max(b.lower), a.upper.min(b.upper));
}

template <class Scalar>
bool intersects(const BoxT<Scalar>& a, const BoxT<Scalar>& b) {
  return !is_empty(intersect(a, b));
}

/// True when the interiors of a and b overlap (touching faces do not count).
template <class Scalar>
bool interiors_overlap(const BoxT<Scalar>& a, const BoxT<Scalar>& b) {
  return (a.lower.max(b.lower) < a.upper.min(b.upper)).all();
}

/// Smallest box containing both arguments.
template <class Scalar>
BoxT<Scalar> bounding_union(const BoxT<Scalar>& a, const BoxT<Scalar>& b) {
  return BoxT<Scalar>(a.lower.min(b.lower), a.upper.max(b.upper));
}

/// outer fully contains inner.
template <class Scalar>
bool subsumes(const BoxT<Scalar>& outer, const BoxT<Scalar>& inner) {
  if (is_empty(inner)) return true;
  return (outer.lower <= inner.lower).all() && (inner.upper <= outer.upper).all();
}

template <class Scalar>
typename BoxT<Scalar>::Array center(const BoxT<Scalar>& b) {
  return (b.lower + b.upper) / Scalar(2);
}

inline Eigen::VectorXd sample(const Box& b, Rng& rng) {
  Eigen::VectorXd x(b.dim());
  for (Eigen::Index i = 0; i < b.dim(); ++i)
    x[i] = rng.uniform(b.lower[i], b.upper[i]);
  return x;
}

template <class Scalar>
bool operator==(const BoxT<Scalar>& a, const BoxT<Scalar>& b) {
  return a.dim() == b.dim() && (a.lower == b.lower).all() &&
         (a.upper == b.upper).all();
}

/// Lexicographic order by lower corner, then upper; canonical output order.
template <class Scalar>
bool lex_less(const BoxT<Scalar>& a, const BoxT<Scalar>& b) {
  for (Eigen::Index i = 0; i < a.dim(); ++i) {
    if (a.lower[i] != b.lower[i]) return a.lower[i] < b.lower[i];
  }
  for (Eigen::Index i = 0; i < a.dim(); ++i) {
    if (a.upper[i] != b.upper[i]) return a.upper[i] < b.upper[i];
  }
  return false;
}

}  // namespace vgs
