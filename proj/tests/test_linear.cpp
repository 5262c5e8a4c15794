#include <doctest.h>

#include "support.hpp"
#include "wtsdist/fixpoint.hpp"
#include "wtsdist/generators.hpp"
#include "wtsdist/linear.hpp"

using namespace wtsdist;
using namespace wtsdist::testing;

namespace {

IneqSystem witness(const char* sigma, const char* tau, const TraceMetric& m) {
  return build_inequivalence({parse_lasso_literal(sigma), parse_lasso_literal(tau), m});
}

}  // namespace

TEST_CASE("linear_discrete: worked cases") {
  auto w = witness("a:0 | b:0", "a:0 | c:0", TraceMetric::discrete());
  CHECK(linear_discrete(w.sys, w.s, w.t) == q(0));
  CHECK(linear_discrete(w.sys, w.t, w.s) == q(0));
  CHECK(linear_discrete(w.sys, w.s, w.s) == q(0));

  // t without the b-branch.
  WtsBuilder b;
  b.set_alphabet({"a", "b", "c"});
  for (const char* n : {"s", "u", "x", "y", "t", "v"}) b.add_state(n);
  b.add_transition("s", W("a", 0), "u").add_transition("u", W("b", 0), "x").add_transition("u", W("c", 0), "y");
  b.add_transition("x", W("b", 0), "x").add_transition("y", W("c", 0), "y");
  b.add_transition("t", W("a", 0), "v").add_transition("v", W("c", 0), "y");
  auto cut = b.build();
  CHECK(linear_discrete(cut, cut.state_id("s"), cut.state_id("t")) == inf());
  CHECK(linear_discrete(cut, cut.state_id("t"), cut.state_id("s")) == q(0));
}

TEST_CASE("property: linear_discrete agrees with prefix inclusion; antichain agrees") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto sys = random_system(seed, 1 + seed % 5, 3, 2, 1);
    const std::size_t depth = (std::size_t{1} << sys.num_states()) + 1;
    for (StateId s = 0; s < sys.num_states(); ++s) {
      for (StateId t = 0; t < sys.num_states(); ++t) {
        const ExtValue v = linear_discrete(sys, s, t);
        CHECK(v.is_zero() == reference_prefix_inclusion(sys, s, t, depth));
        CHECK(linear_discrete(sys, s, t, nullptr, true) == v);
        // Simulation implies inclusion.
        if (discrete_simulation_check(sys, s, t)) CHECK(v.is_zero());
      }
    }
  }
}

TEST_CASE("linear_bound: worked cases") {
  auto loops = loop_pair(W("a", 1), W("a", 3));
  const Rational lambda(1, 2);
  auto b = linear_bound(loops, 0, 1, TraceMetric::accumulated_discounted(lambda), 10);
  const Rational lower = Rational(4) * (1 - pow(lambda, 10));
  CHECK(b.lower == q(0) + ExtValue(lower));
  CHECK(b.upper == ExtValue(lower + pow(lambda, 10) * 2 * 2));
  CHECK(b.method == LinearMethod::kBracket);
  CHECK(b.lower <= q(4));
  CHECK(q(4) <= b.upper);

  for (const char* d : {"discrete", "pointwise", "acc-disc:1/2", "maxlead", "acc-lavg"}) {
    auto same = linear_bound(loops, 1, 1, TraceMetric::parse(d), 4);
    CHECK(same.lower == q(0));
  }
  CHECK(linear_bound(loops, 1, 1, TraceMetric::discrete(), 3).method == LinearMethod::kExact);
  CHECK(linear_bound(loops, 1, 1, TraceMetric::pointwise(), 3).method == LinearMethod::kLowerOnly);

  auto w = witness("a:0 | a:1", "a:0 | a:2", TraceMetric::pointwise());
  for (std::size_t k = 2; k <= 6; ++k) {
    CHECK(linear_bound(w.sys, w.s, w.t, TraceMetric::pointwise(), k).lower == q(0));
  }
}

TEST_CASE("property: linear bounds are monotone in k and consistent with the discrete decision") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto sys = random_system(seed, 1 + seed % 4, 2, 1, 2);
    const TraceMetric disc = TraceMetric::accumulated_discounted(Rational(1, 2));
    for (StateId s = 0; s < sys.num_states(); ++s) {
      for (StateId t = 0; t < sys.num_states(); ++t) {
        LinearBound prev = linear_bound(sys, s, t, disc, 1);
        for (std::size_t k = 2; k <= 6; ++k) {
          LinearBound cur = linear_bound(sys, s, t, disc, k);
          CHECK(prev.lower <= cur.lower);
          CHECK(cur.upper <= prev.upper);
          prev = cur;
        }
        const ExtValue exact = linear_discrete(sys, s, t);
        const auto at = [&](std::size_t k) { return linear_bound(sys, s, t, TraceMetric::discrete(), k).lower; };
        if (exact.is_zero()) {
          for (std::size_t k = 1; k <= 5; ++k) CHECK(at(k) == q(0));
        } else {
          CHECK(at((std::size_t{1} << sys.num_states()) * sys.num_states() + 1) == inf());
        }
      }
    }
  }
}

TEST_CASE("linear_lasso_estimate: worked cases") {
  auto loops = loop_pair(W("a", 1), W("a", 3));
  CHECK(linear_lasso_estimate(loops, 0, 1, TraceMetric::pointwise(), 0, 1) == q(2));
  CHECK(linear_lasso_estimate(loops, 0, 0, TraceMetric::pointwise(), 1, 1) == q(0));
  auto w = witness("a:0 | b:0", "a:0 | c:0", TraceMetric::discrete());
  CHECK(linear_lasso_estimate(w.sys, w.s, w.t, TraceMetric::discrete(), 1, 1) == q(0));
}
