#include <doctest.h>

#include <vector>

#include "test_nets.hpp"
#include "vgs/bounds.hpp"

using namespace vgs;
using namespace vgs::testing;

TEST_CASE("toy net output bounds are exact") {
  const Network net = toy_net();
  const Box b = bound_outputs(net, unit_box<double>(2));
  CHECK(b.lower[0] == 18.0);
  CHECK(b.upper[0] == 42.0);

  const NetworkBounds nb = analyze_bounds(net, unit_box<double>(2));
  CHECK(nb.pre_lo[0][0] == 3.0);
  CHECK(nb.pre_hi[0][0] == 7.0);
  CHECK(nb.pre_lo[0][1] == -4.0);
  CHECK(nb.pre_hi[0][1] == -1.0);
  CHECK(nb.out_lo[0] == 18.0);
  CHECK(nb.out_hi[0] == 42.0);
}

TEST_CASE("point region gives point bounds") {
  const Network net = toy_net();
  const Box pt = make_box({0.3, 0.8}, {0.3, 0.8});
  const Box b = bound_outputs(net, pt);
  const double y = forward(net, vec({0.3, 0.8}))[0];
  CHECK(b.lower[0] == doctest::Approx(y).epsilon(1e-12));
  CHECK(b.upper[0] == doctest::Approx(y).epsilon(1e-12));
}

TEST_CASE("all-zero net bounds are zero") {
  Network net;
  net.layers.push_back(make_layer({{0.0, 0.0}, {0.0, 0.0}}, {0.0, 0.0},
                                  Activation::relu));
  net.layers.push_back(make_layer({{0.0, 0.0}}, {0.0}, Activation::identity));
  const Box b = bound_outputs(net, unit_box<double>(2));
  CHECK(b.lower[0] == 0.0);
  CHECK(b.upper[0] == 0.0);
}

TEST_CASE("interval bounds shrink monotonically under splitting") {
  Rng rng(88);
  for (int trial = 0; trial < 30; ++trial) {
    const Network net = random_net({2, 6, 6, 3}, rng);
    Box box = unit_box<double>(2);
    Box parent_bounds = bound_outputs(net, box);
    for (int depth = 0; depth < 8; ++depth) {
      const auto halves = split(box, widest_dim(box));
      box = rng.below(2) ? halves.first : halves.second;
      const Box child_bounds = bound_outputs(net, box);
      CHECK((child_bounds.lower >= parent_bounds.lower - 1e-12).all());
      CHECK((child_bounds.upper <= parent_bounds.upper + 1e-12).all());
      parent_bounds = child_bounds;
    }
  }
}

TEST_CASE("bounds are sound against sampling, relaxation never looser") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const Network net = random_net({2, 6, 6, 3}, rng);
    Box box;
    box.lower.resize(2);
    box.upper.resize(2);
    for (int j = 0; j < 2; ++j) {
      const double a = rng.uniform(-1.5, 1.5);
      const double b = rng.uniform(-1.5, 1.5);
      box.lower[j] = std::min(a, b);
      box.upper[j] = std::max(a, b);
    }
    const Box iv = bound_outputs(net, box);
    const NetworkBounds nb = analyze_bounds(net, box);
    CHECK((nb.out_lo.array() >= iv.lower - 1e-9).all());
    CHECK((nb.out_hi.array() <= iv.upper + 1e-9).all());
    for (int s = 0; s < 500; ++s) {
      const Eigen::VectorXd x = sample(box, rng);
      const Eigen::VectorXd y = forward(net, x);
      CHECK((y.array() >= iv.lower - 1e-9).all());
      CHECK((y.array() <= iv.upper + 1e-9).all());
      CHECK((y.array() >= nb.out_lo.array() - 1e-9).all());
      CHECK((y.array() <= nb.out_hi.array() + 1e-9).all());
    }
  }
}

TEST_CASE("hidden pre-activation bounds are sound") {
  Rng rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    const Network net = random_net({2, 6, 6, 3}, rng);
    const Box box = unit_box<double>(2);
    const NetworkBounds nb = analyze_bounds(net, box);
    for (int s = 0; s < 500; ++s) {
      Eigen::VectorXd z = sample(box, rng);
      for (std::size_t layer = 0; layer + 1 < net.layers.size(); ++layer) {
        const Eigen::VectorXd pre =
            net.layers[layer].weights * z + net.layers[layer].bias;
        CHECK((pre.array() >= nb.pre_lo[layer].array() - 1e-9).all());
        CHECK((pre.array() <= nb.pre_hi[layer].array() + 1e-9).all());
        z = pre.cwiseMax(0.0);
      }
    }
  }
}

TEST_CASE("affine functional bounds are sound and exact on stable nets") {
  const Network net = toy_net();
  const Box box = unit_box<double>(2);
  const NetworkBounds nb = analyze_bounds(net, box);
  // y - 30 over [18,42]: exact range [-12, 12] (all relus stable)
  const Interval iv =
      bound_affine(net, box, nb, vec({1.0}), vec({0.0, 0.0}), -30.0);
  CHECK(iv.lo == doctest::Approx(-12.0).epsilon(1e-12));
  CHECK(iv.hi == doctest::Approx(12.0).epsilon(1e-12));

  // mixed input/output functional y - 6 x0 - 18 x1 = 18 x1 ... removed x0
  // term by the cancellation: y = 6 x0 + 18 x1 + 18 on the active pattern
  const Interval mixed =
      bound_affine(net, box, nb, vec({1.0}), vec({-6.0, -18.0}), -18.0);
  CHECK(mixed.lo == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mixed.hi == doctest::Approx(0.0).epsilon(1e-12));

  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const Network rnd = random_net({2, 6, 6, 3}, rng);
    const NetworkBounds rb = analyze_bounds(rnd, box);
    Eigen::VectorXd oc(3), ic(2);
    for (int i = 0; i < 3; ++i) oc[i] = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < 2; ++i) ic[i] = rng.uniform(-1.0, 1.0);
    const double cst = rng.uniform(-1.0, 1.0);
    const Interval r = bound_affine(rnd, box, rb, oc, ic, cst);
    CHECK(r.lo <= r.hi + 1e-12);
    for (int s = 0; s < 300; ++s) {
      const Eigen::VectorXd x = sample(box, rng);
      const double v = oc.dot(forward(rnd, x)) + ic.dot(x) + cst;
      CHECK(v >= r.lo - 1e-9);
      CHECK(v <= r.hi + 1e-9);
    }
  }
}
