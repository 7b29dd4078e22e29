#include "vgs/verifier.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "vgs/bounds.hpp"
#include "vgs/rng.hpp"
#include "test_nets.hpp"

using namespace vgs;
using vgs::testing::make_layer;
using vgs::testing::random_net;
using vgs::testing::toy_net;
using vgs::testing::vec;

namespace {

SafetyProperty output_property(const std::string& name, const Box& input_box,
                               Eigen::VectorXd out_coeff, double constant,
                               Relation rel) {
  SafetyProperty p;
  p.name = name;
  p.input_box = input_box;
  LinearTerm t;
  t.in_coeff = Eigen::VectorXd::Zero(input_box.dim());
  t.out_coeff = std::move(out_coeff);
  t.constant = constant;
  t.relation = rel;
  p.linear_terms.push_back(std::move(t));
  return p;
}

// y = max(0, x - 0.5) on [0, 1]: one relu that is genuinely unstable on the
// full domain, so enumeration has to condition on its sign.
Network hinge_net() {
  Network net;
  net.layers.push_back(make_layer({{1.0}}, {-0.5}, Activation::relu));
  net.layers.push_back(make_layer({{1.0}}, {0.0}, Activation::identity));
  return net;
}

// y0 = x0, y1 = x1: the smallest net with a non-trivial argmax.
Network passthrough2() {
  Network net;
  net.layers.push_back(
      make_layer({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0}, Activation::identity));
  return net;
}

void check_witness(const Verdict& v, const SafetyProperty& p,
                   const Network& net, const Box& region) {
  REQUIRE(v.kind == VerdictKind::sat);
  REQUIRE(v.witness.has_value());
  const auto& w = *v.witness;
  CHECK(w.property_name == p.name);
  CHECK(contains(region, w.input));
  CHECK((forward(net, w.input).array() == w.output.array()).all());
  CHECK(holds(p, w.input, w.output));
}

}  // namespace

TEST_CASE("toy net: output <= 30 is satisfiable with a replayable witness") {
  const Network net = toy_net();
  const Box region = unit_box<double>(2);
  const auto p = output_property("le30", region, vec({1.0}), -30.0,
                                 Relation::le);
  const Verdict v = verify(net, p, region);
  check_witness(v, p, net, region);
  CHECK(v.witness->output[0] <= 30.0);
  CHECK(v.stats.branches >= 1);
}

TEST_CASE("toy net: output < 18 is unsatisfiable") {
  const Network net = toy_net();
  const Box region = unit_box<double>(2);
  const auto p = output_property("lt18", region, vec({1.0}), -18.0,
                                 Relation::lt);
  const Verdict v = verify(net, p, region);
  CHECK(v.kind == VerdictKind::unsat);
  CHECK_FALSE(v.witness.has_value());
}

TEST_CASE("empty region is unsatisfiable without any branching") {
  const Network net = toy_net();
  const Box empty = make_box({0.6, 0.0}, {0.4, 1.0});
  const auto p = output_property("le30", unit_box<double>(2), vec({1.0}),
                                 -30.0, Relation::le);
  const Verdict v = verify(net, p, empty);
  CHECK(v.kind == VerdictKind::unsat);
  CHECK(v.stats.branches == 0);

  // Disjoint from the property's own input box counts as empty too.
  const Box outside = make_box({2.0, 2.0}, {3.0, 3.0});
  CHECK(verify(net, p, outside).kind == VerdictKind::unsat);
}

TEST_CASE("witness stays inside a sub-region of the input box") {
  const Network net = toy_net();
  const Box region = make_box({0.0, 0.0}, {0.2, 0.2});
  const auto p = output_property("le30", unit_box<double>(2), vec({1.0}),
                                 -30.0, Relation::le);
  const Verdict v = verify(net, p, region);
  check_witness(v, p, net, region);
}

TEST_CASE("thin satisfiable sliver is found through the LP") {
  // 6*x0 + 18*x1 + 18 >= 41.9 only holds in a corner sliver near (1, 1),
  // which random probing virtually never hits.
  const Network net = toy_net();
  const Box region = unit_box<double>(2);
  const auto p = output_property("ge41.9", region, vec({1.0}), -41.9,
                                 Relation::ge);
  const Verdict v = verify(net, p, region);
  check_witness(v, p, net, region);
  CHECK(v.witness->output[0] >= 41.9);
}

TEST_CASE("strict boundary handling at the output maximum") {
  const Network net = toy_net();
  const Box region = unit_box<double>(2);

  // The maximum 42 is attained only at (1, 1); a strict > 42 can never fire.
  const auto strict_max = output_property("gt42", region, vec({1.0}), -42.0,
                                          Relation::gt);
  CHECK(verify(net, strict_max, region).kind == VerdictKind::unsat);

  // The non-strict version fires exactly at the corner.
  const auto weak_max = output_property("ge42", region, vec({1.0}), -42.0,
                                        Relation::ge);
  const Verdict v = verify(net, weak_max, region);
  check_witness(v, weak_max, net, region);
  CHECK(v.witness->output[0] >= 42.0);

  // A strict threshold just below the maximum leaves enough slack.
  const auto near_max = output_property("gt_near", region, vec({1.0}),
                                        -(42.0 - 1e-6), Relation::gt);
  check_witness(verify(net, near_max, region), near_max, net, region);
}

TEST_CASE("input coefficients participate in the decision") {
  const Network net = toy_net();
  const Box region = unit_box<double>(2);
  SafetyProperty p;
  p.name = "mixed";
  p.input_box = region;
  LinearTerm t;
  t.out_coeff = vec({0.01});
  t.in_coeff = vec({-1.0, 0.0});
  t.constant = -0.5;
  t.relation = Relation::gt;  // 0.01*y - x0 - 0.5 > 0, max 0.42 - 0.5 < 0
  p.linear_terms.push_back(t);
  CHECK(verify(net, p, region).kind == VerdictKind::unsat);

  p.linear_terms[0].constant = 0.0;  // 0.01*y > x0 now satisfiable
  const Verdict v = verify(net, p, region);
  check_witness(v, p, net, region);
}

TEST_CASE("unstable relu is resolved by sign enumeration, not splitting") {
  const Network net = hinge_net();
  const Box region = unit_box<double>(1);

  SafetyProperty band;
  band.name = "band";
  band.input_box = region;
  LinearTerm lo;
  lo.out_coeff = vec({1.0});
  lo.in_coeff = vec({0.0});
  lo.constant = -0.2;
  lo.relation = Relation::ge;  // y >= 0.2
  LinearTerm hi = lo;
  hi.constant = -0.3;
  hi.relation = Relation::le;  // y <= 0.3
  band.linear_terms = {lo, hi};

  const Verdict v = verify(net, band, region);
  check_witness(v, band, net, region);
  CHECK(v.witness->input[0] >= 0.7 - 1e-9);
  CHECK(v.witness->input[0] <= 0.8 + 1e-9);
  CHECK(v.stats.branches == 1);
  CHECK(v.stats.lp_calls >= 1);

  const auto neg = output_property("neg", region, vec({1.0}), 0.1,
                                   Relation::le);  // y <= -0.1
  const Verdict u = verify(net, neg, region);
  CHECK(u.kind == VerdictKind::unsat);
  CHECK(u.stats.branches == 1);
  CHECK(u.stats.lp_calls == 2);
}

TEST_CASE("strict window thinner than the slack is reported unsatisfiable") {
  // True satisfying set: y in (0.3 - 1e-13, 0.3 + 1e-13), a 2e-13 wide input
  // window. The strict relaxation requires 1e-9 of slack on both rows, which
  // is impossible; this hairline loss is the documented semantics.
  const Network net = hinge_net();
  const Box region = unit_box<double>(1);
  SafetyProperty p;
  p.name = "hairline";
  p.input_box = region;
  LinearTerm above;
  above.out_coeff = vec({1.0});
  above.in_coeff = vec({0.0});
  above.constant = -(0.3 - 1e-13);
  above.relation = Relation::gt;
  LinearTerm below = above;
  below.constant = -(0.3 + 1e-13);
  below.relation = Relation::lt;
  p.linear_terms = {above, below};
  CHECK(verify(net, p, region).kind == VerdictKind::unsat);
}

TEST_CASE("argmax selector honors the lowest-index tie-break") {
  const Network net = passthrough2();
  const Box tie_corner = make_box({0.5, 0.0}, {1.0, 0.5});

  // Outputs tie only at (0.5, 0.5). Index 0 wins ties, so selector 0 fires
  // there while selector 1 needs a strict win it can never get.
  SafetyProperty p0;
  p0.name = "argmax0";
  p0.input_box = unit_box<double>(2);
  p0.argmax_selector = 0;
  const Verdict v0 = verify(net, p0, tie_corner);
  check_witness(v0, p0, net, tie_corner);

  SafetyProperty p1 = p0;
  p1.name = "argmax1";
  p1.argmax_selector = 1;
  CHECK(verify(net, p1, tie_corner).kind == VerdictKind::unsat);

  // On the full square selector 1 has an open half-plane to pick from.
  const Box full = unit_box<double>(2);
  const Verdict v1 = verify(net, p1, full);
  check_witness(v1, p1, net, full);
  CHECK(v1.witness->output[1] > v1.witness->output[0]);
}

TEST_CASE("argmax margin constrains the winning gap") {
  const Network net = passthrough2();
  SafetyProperty p;
  p.input_box = unit_box<double>(2);
  p.name = "margin";
  p.argmax_selector = 0;
  p.margin = 0.2;

  const Box wide = make_box({0.5, 0.0}, {1.0, 0.5});
  const Verdict v = verify(net, p, wide);
  check_witness(v, p, net, wide);
  CHECK(v.witness->output[0] - v.witness->output[1] >= 0.2);

  // Max achievable gap here is 0.15 < margin.
  const Box narrow = make_box({0.5, 0.45}, {0.6, 0.5});
  CHECK(verify(net, p, narrow).kind == VerdictKind::unsat);
}

TEST_CASE("exhausted budgets yield inconclusive, never a bogus verdict") {
  const Network net = toy_net();
  const Box region = unit_box<double>(2);
  const auto p = output_property("lt18", region, vec({1.0}), -18.0,
                                 Relation::lt);

  VerifierConfig tight;
  tight.max_branches = 0;
  Verdict v = verify(net, p, region, tight);
  CHECK(v.kind == VerdictKind::inconclusive);
  CHECK_FALSE(v.witness.has_value());

  VerifierConfig timeless;
  timeless.max_seconds = 0.0;
  v = verify(net, p, region, timeless);
  CHECK(v.kind == VerdictKind::inconclusive);
}

TEST_CASE("malformed queries are rejected") {
  const Network net = toy_net();
  const Box region = unit_box<double>(2);
  const auto p = output_property("le30", region, vec({1.0}), -30.0,
                                 Relation::le);

  CHECK_THROWS_AS(verify(net, p, unit_box<double>(3)), std::invalid_argument);

  auto bad_term = p;
  bad_term.linear_terms[0].out_coeff = vec({1.0, 0.0});
  CHECK_THROWS_AS(verify(net, bad_term, region), std::invalid_argument);

  auto bad_sel = p;
  bad_sel.argmax_selector = 5;
  CHECK_THROWS_AS(verify(net, bad_sel, region), std::invalid_argument);

  VerifierConfig bad_cfg;
  bad_cfg.strict_slack = 0.0;
  CHECK_THROWS_AS(verify(net, p, region, bad_cfg), std::invalid_argument);
}

TEST_CASE("query struct overload matches the flat overload") {
  VerificationQuery q;
  q.net = toy_net();
  q.region = unit_box<double>(2);
  q.property = output_property("le30", q.region, vec({1.0}), -30.0,
                               Relation::le);
  const Verdict a = verify(q);
  const Verdict b = verify(q.net, q.property, q.region);
  CHECK(a.kind == b.kind);
  CHECK((a.witness->input.array() == b.witness->input.array()).all());
}

TEST_CASE("verify_any returns the first satisfiable property") {
  const Network net = toy_net();
  const Box region = unit_box<double>(2);
  const auto dead = output_property("lt18", region, vec({1.0}), -18.0,
                                    Relation::lt);
  const auto live = output_property("le30", region, vec({1.0}), -30.0,
                                    Relation::le);

  const Verdict v = verify_any(net, {dead, live}, region);
  REQUIRE(v.kind == VerdictKind::sat);
  CHECK(v.witness->property_name == "le30");

  CHECK(verify_any(net, {dead, dead}, region).kind == VerdictKind::unsat);
  CHECK(verify_any(net, {}, region).kind == VerdictKind::unsat);

  VerifierConfig tight;
  tight.max_branches = 0;
  CHECK(verify_any(net, {dead}, region, tight).kind ==
        VerdictKind::inconclusive);
}

TEST_CASE("identical queries are bitwise deterministic") {
  Rng rng(2026);
  const Network net = random_net({2, 6, 6, 2}, rng);
  const Box region = unit_box<double>(2);
  SafetyProperty p;
  p.name = "det";
  p.input_box = region;
  p.argmax_selector = 1;

  const Verdict a = verify(net, p, region);
  const Verdict b = verify(net, p, region);
  CHECK(a.kind == b.kind);
  CHECK(a.stats.branches == b.stats.branches);
  CHECK(a.stats.lp_calls == b.stats.lp_calls);
  if (a.witness) {
    REQUIRE(b.witness.has_value());
    CHECK((a.witness->input.array() == b.witness->input.array()).all());
  }
}

TEST_CASE("random nets: verdicts are consistent with dense sampling") {
  Rng rng(77);
  int unsat_seen = 0;
  int sat_seen = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Network net = random_net({2, 6, 6, 2}, rng);
    const Box region = unit_box<double>(2);
    SafetyProperty p;
    p.name = "rand";
    p.input_box = region;
    p.argmax_selector = static_cast<int>(rng.below(2));
    LinearTerm t;
    t.out_coeff = vec({1.0, 0.0});
    t.in_coeff = vec({0.0, rng.uniform(-1.0, 1.0)});
    t.constant = rng.uniform(-1.5, 1.5);
    t.relation = trial % 2 == 0 ? Relation::gt : Relation::ge;
    p.linear_terms.push_back(t);

    const Verdict v = verify(net, p, region);
    if (v.kind == VerdictKind::sat) {
      ++sat_seen;
      check_witness(v, p, net, region);
    } else if (v.kind == VerdictKind::unsat) {
      ++unsat_seen;
      Rng probe(derive_seed(404, static_cast<std::uint64_t>(trial)));
      for (int k = 0; k < 2000; ++k) {
        const Eigen::VectorXd x = sample(region, probe);
        CHECK_FALSE(holds(p, x, forward(net, x)));
      }
    }
  }
  // The mix should exercise both verdicts; a degenerate run would hide bugs.
  CHECK(unsat_seen >= 5);
  CHECK(sat_seen >= 5);
}
