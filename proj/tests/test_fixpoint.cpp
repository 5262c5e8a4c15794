#include <doctest.h>

#include "support.hpp"
#include "wtsdist/errors.hpp"
#include "wtsdist/fixpoint.hpp"
#include "wtsdist/game.hpp"
#include "wtsdist/generators.hpp"
#include "wtsdist/linear.hpp"

using namespace wtsdist;
using namespace wtsdist::testing;

namespace {

IneqSystem witness_discrete() {
  return build_inequivalence({LassoTrace({W("a", 0)}, {W("b", 0)}),
                              LassoTrace({W("a", 0)}, {W("c", 0)}), TraceMetric::discrete()});
}

}  // namespace

TEST_CASE("iterator_for: step functions") {
  const auto disc = scalar_iterator_for(TraceMetric::discrete());
  CHECK(disc.step(W("a", 1), W("a", 1), q(5)) == q(5));
  CHECK(disc.step(W("a", 1), W("b", 1), q(0)) == inf());
  const auto pw = scalar_iterator_for(TraceMetric::pointwise());
  CHECK(pw.step(W("a", 1), W("a", 3), q(0)) == q(2));
  CHECK(pw.step(W("a", 1), W("a", 3), q(7)) == q(7));
  CHECK(pw.step(W("a", 1), W("b", 3), q(0)) == inf());
  const auto dsc = scalar_iterator_for(TraceMetric::accumulated_discounted(Rational(1, 2)));
  CHECK(dsc.step(W("a", 1), W("a", 3), q(2)) == q(3));
  CHECK_THROWS_AS(scalar_iterator_for(TraceMetric::accumulated_limavg()), UnsupportedMetric);
  auto sys = loop_pair(W("a", 1), W("a", 3));
  CHECK(std::holds_alternative<IteratorSpec<LeadTable>>(iterator_for(TraceMetric::max_lead(), sys)));
}

TEST_CASE("apply_I and kleene_lfp on the single-loop pair") {
  auto sys = loop_pair(W("a", 1), W("a", 3));
  const auto pw = scalar_iterator_for(TraceMetric::pointwise());
  PairFunction<ExtValue> bottom(2, ExtValue());
  auto h1 = apply_I(pw, sys, bottom);
  CHECK(h1.at(0, 1) == q(2));
  CHECK(bottom.at(0, 1) == q(0));

  auto run = kleene_lfp(pw, sys, StopRule{});
  CHECK(run.status == FixpointStatus::kExact);
  CHECK(run.table.at(0, 1) == q(2));
  CHECK(run.iterations == 2);

  const auto dsc = scalar_iterator_for(TraceMetric::accumulated_discounted(Rational(1, 2)));
  auto drun = kleene_lfp(dsc, sys, StopRule{});
  CHECK(drun.status == FixpointStatus::kConverged);
  CHECK(gap(drun.table.at(0, 1), q(4)) <= drun.error_bound);
  CHECK(drun.error_bound <= q(1, 1000000000));
}

TEST_CASE("property: the Kleene chain is monotone") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto sys = random_system(seed, 2 + seed % 4, 3, 1, 3);
    for (const char* d : {"pointwise", "acc-disc:1/2", "discrete"}) {
      const auto spec = scalar_iterator_for(TraceMetric::parse(d));
      StopRule stop;
      stop.max_iterations = 30;
      std::optional<PairFunction<ExtValue>> prev;
      kleene_lfp<ExtValue>(spec, sys, stop, [&](std::size_t, const PairFunction<ExtValue>& h) {
        if (prev) {
          for (std::size_t i = 0; i < h.cells().size(); ++i) CHECK(prev->cells()[i] <= h.cells()[i]);
        }
        prev = h;
      });
    }
  }
}

TEST_CASE("property: parallel sweeps equal sequential sweeps") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto sys = random_system(seed, 6, 3, 2, 2);
    for (const char* d : {"pointwise", "acc-disc:1/3", "maxlead"}) {
      FixpointOptions one, four;
      four.jobs = 4;
      auto a = branching_table(sys, TraceMetric::parse(d), one);
      auto b = branching_table(sys, TraceMetric::parse(d), four);
      for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].lower == b.cells[i].lower);
        CHECK(a.cells[i].upper == b.cells[i].upper);
      }
    }
  }
}

TEST_CASE("branching_distance: worked values") {
  auto loops = loop_pair(W("a", 1), W("a", 3));
  auto pw = branching_distance(loops, TraceMetric::pointwise(), 0, 1);
  CHECK(pw.status == DistanceStatus::kExact);
  CHECK(pw.value.lower == q(2));
  CHECK(pw.value.upper == q(2));

  auto disc = branching_distance(loops, TraceMetric::accumulated_discounted(Rational(1, 2)), 0, 1);
  CHECK(disc.status == DistanceStatus::kExact);
  CHECK(disc.value.lower == q(4));

  CHECK(branching_distance(loops, TraceMetric::discrete(), 0, 0).value.upper == q(0));
  CHECK(branching_distance(loops, TraceMetric::pointwise(), 1, 1).value.upper == q(0));

  auto w = witness_discrete();
  CHECK(branching_distance(w.sys, TraceMetric::discrete(), w.s, w.t).value.lower == inf());

  // s: 2-cycle 1, −1; t: self-loop 0. Leads stay in {0, 1}.
  WtsBuilder b;
  b.add_state("s").add_state("s1").add_state("t");
  b.add_transition("s", U(1), "s1").add_transition("s1", U(-1), "s").add_transition("t", U(0), "t");
  auto lead_sys = b.build();
  auto lead = branching_distance(lead_sys, TraceMetric::max_lead(), 0, 2);
  CHECK(lead.status == DistanceStatus::kExact);
  CHECK(lead.value.lower == q(1));
  CHECK(lead.value.upper == q(1));

  // Diverging leads: the cap leaves a bracket whose upper end is infinity.
  auto diverge = branching_distance(loops, TraceMetric::max_lead(), 0, 1);
  CHECK(diverge.status == DistanceStatus::kBracket);
  CHECK(diverge.value.upper == inf());
  CHECK(q(8) <= diverge.value.lower);

  CHECK_THROWS_AS(branching_distance(loops, TraceMetric::accumulated_limavg(), 0, 1), UnsupportedMetric);
}

TEST_CASE("lead domain") {
  std::vector<Rational> diffs{Rational(1), Rational(-1), Rational(1, 2)};
  auto d = LeadDomain::build(diffs, 2, LeadPolicy::kOverapprox, 1000);
  CHECK(d->size() == 9);  // −2, −3/2, ..., 2
  CHECK(d->index_of(Rational(3, 2)).has_value());
  CHECK_FALSE(d->index_of(Rational(5, 2)).has_value());
  CHECK_THROWS_AS(LeadDomain::build(diffs, 100, LeadPolicy::kOverapprox, 10), BudgetExceeded);
  LeadTable over(d, q(0));
  CHECK(over.at(Rational(3)) == inf());
  auto u = LeadDomain::build(diffs, 2, LeadPolicy::kUnderapprox, 1000);
  CHECK(LeadTable(u, q(0)).at(Rational(-3)) == q(3));
}

TEST_CASE("simulation: worked cases") {
  auto loops = loop_pair(W("a", 1), W("a", 3));
  CHECK(discrete_simulation_check(loops, 0, 0));
  CHECK_FALSE(discrete_simulation_check(loops, 0, 1));
  auto w = witness_discrete();
  CHECK_FALSE(discrete_simulation_check(w.sys, w.s, w.t));
  CHECK(discrete_simulation_check(w.sys, w.t, w.s));

  // Deterministic systems with equal traces.
  WtsBuilder b;
  b.add_state("s").add_state("t").add_state("t1");
  b.add_transition("s", U(0), "s").add_transition("t", U(0), "t1").add_transition("t1", U(0), "t");
  CHECK(discrete_simulation_check(b.build(), 0, 1));
}

TEST_CASE("property: discrete zero set is the greatest simulation") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto sys = random_system(seed, 1 + seed % 6, 3, 2, 1);
    auto table = branching_table(sys, TraceMetric::discrete());
    auto ref = reference_simulation(sys);
    for (StateId s = 0; s < sys.num_states(); ++s) {
      for (StateId t = 0; t < sys.num_states(); ++t) {
        CHECK(table.at(s, t).upper.is_zero() == ref.contains({s, t}));
        CHECK(discrete_simulation_check(sys, s, t) == ref.contains({s, t}));
      }
    }
  }
}

TEST_CASE("property: preorder variant matches extended simulation") {
  auto order = std::make_shared<LabelPreorder>(LabelPreorder::parse("a<b"));
  const TraceMetric m = TraceMetric::discrete_preorder(order);
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    auto sys = random_system(seed, 1 + seed % 5, 3, 2, 1);
    auto table = branching_table(sys, m);
    auto rel = greatest_simulation(sys, order.get());
    for (StateId s = 0; s < sys.num_states(); ++s) {
      for (StateId t = 0; t < sys.num_states(); ++t) {
        CHECK(table.at(s, t).upper.is_zero() == rel.contains(s, t));
        // A plain simulation is an extended one.
        if (discrete_simulation_check(sys, s, t)) CHECK(rel.contains(s, t));
      }
    }
  }
}

TEST_CASE("property: discounted distance is bracketed by the oracle") {
  const Rational lambda(1, 2);
  const TraceMetric m = TraceMetric::accumulated_discounted(lambda);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto sys = random_system(seed, 1 + seed % 4, 2, 1, 2);
    auto table = branching_table(sys, m);
    const ExtValue w = max_ground_distance(sys, m);
    const std::size_t k = 10;
    for (StateId s = 0; s < sys.num_states(); ++s) {
      for (StateId t = 0; t < sys.num_states(); ++t) {
        const ExtValue v = bounded_value(sys, s, t, m, k);
        CHECK(v <= table.at(s, t).lower);
        CHECK(table.at(s, t).upper <= v + w.scaled(pow(lambda, k) / (1 - lambda)));
      }
    }
  }
}

TEST_CASE("property: correctness distance vanishes under simulation") {
  const TraceMetric m = TraceMetric::hamming_discounted(Rational(1, 2));
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto sys = random_system(seed, 1 + seed % 5, 3, 2, 1);
    auto table = branching_table(sys, m);
    for (StateId s = 0; s < sys.num_states(); ++s) {
      for (StateId t = 0; t < sys.num_states(); ++t) {
        if (discrete_simulation_check(sys, s, t)) CHECK(table.at(s, t).upper == q(0));
      }
    }
  }
}

TEST_CASE("certify_discounted solves a forced profile exactly") {
  auto loops = loop_pair(W("a", 1), W("a", 3));
  const TraceMetric m = TraceMetric::accumulated_discounted(Rational(1, 2));
  // From bottom the profile is already optimal (no choices) and certifies.
  CHECK(certify_discounted(m, loops, PairFunction<ExtValue>(2, ExtValue())).has_value());
  PairFunction<ExtValue> all_inf(2, inf());
  auto cert = certify_discounted(m, loops, all_inf);
  REQUIRE(cert.has_value());
  CHECK(cert->at(0, 1) == q(4));
}
