#include "wtsdist/fixpoint.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace wtsdist {

std::shared_ptr<const LeadDomain> LeadDomain::build(std::span<const Rational> differences,
                                                    const Rational& cap, LeadPolicy policy,
                                                    std::size_t max_leads) {
  if (cap < 0) throw std::invalid_argument("lead cap must be nonnegative");
  auto domain = std::make_shared<LeadDomain>();
  domain->cap_ = cap;
  domain->policy_ = policy;

  std::set<Rational> steps(differences.begin(), differences.end());
  std::set<Rational> seen{Rational(0)};
  std::deque<Rational> frontier{Rational(0)};
  while (!frontier.empty()) {
    Rational lead = std::move(frontier.front());
    frontier.pop_front();
    for (const Rational& d : steps) {
      Rational next = lead + d;
      if (abs(next) > cap || seen.contains(next)) continue;
      if (seen.size() >= max_leads) {
        throw BudgetExceeded("more than " + std::to_string(max_leads) +
                             " leads within cap " + to_string(cap));
      }
      seen.insert(next);
      frontier.push_back(std::move(next));
    }
  }
  domain->leads_.assign(seen.begin(), seen.end());
  for (std::size_t i = 0; i < domain->leads_.size(); ++i) domain->index_.emplace(domain->leads_[i], i);
  return domain;
}

std::optional<std::size_t> LeadDomain::index_of(const Rational& lead) const {
  auto it = index_.find(lead);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LeadTable::LeadTable(std::shared_ptr<const LeadDomain> domain, const ExtValue& fill)
    : domain_(std::move(domain)), values_(domain_->size(), fill) {}

ExtValue LeadTable::at(const Rational& lead) const {
  if (abs(lead) > domain_->cap()) {
    return domain_->policy() == LeadPolicy::kOverapprox ? ExtValue::infinity()
                                                        : ExtValue(Rational(abs(lead)));
  }
  auto i = domain_->index_of(lead);
  if (!i) throw std::logic_error("lead " + to_string(lead) + " is outside the lead domain");
  return values_[*i];
}

std::shared_ptr<const LeadDomain> lead_domain_for(const WeightedTransitionSystem& sys,
                                                  const Rational& cap, LeadPolicy policy,
                                                  std::size_t max_leads) {
  std::set<Rational> diffs;
  for (const auto& x : sys.transitions()) {
    for (const auto& y : sys.transitions()) {
      if (same_label(x.weight, y.weight)) diffs.insert(x.weight.value - y.weight.value);
    }
  }
  std::vector<Rational> v(diffs.begin(), diffs.end());
  return LeadDomain::build(v, cap, policy, max_leads);
}

namespace {

LatticeSpec<ExtValue> extended_reals() {
  return {
      ExtValue(),
      [](const ExtValue& a, const ExtValue& b) { return max(a, b); },
      [](const ExtValue& a, const ExtValue& b) { return min(a, b); },
      [](const ExtValue& a, const ExtValue& b) { return a <= b; },
      [](const ExtValue& a, const ExtValue& b) { return a == b; },
  };
}

}  // namespace

IteratorSpec<ExtValue> scalar_iterator_for(const TraceMetric& m) {
  IteratorSpec<ExtValue> spec;
  spec.lattice = extended_reals();
  spec.project = [](const ExtValue& z) { return z; };
  const GroundMetric ground = m.ground();
  switch (m.accumulator()) {
    case Accumulator::kDiscrete:
      spec.step = [ground](const Weight& x, const Weight& y, const ExtValue& z) {
        return ground(x, y).is_zero() ? z : ExtValue::infinity();
      };
      return spec;
    case Accumulator::kSup:
      spec.step = [ground](const Weight& x, const Weight& y, const ExtValue& z) {
        return max(ground(x, y), z);
      };
      return spec;
    case Accumulator::kDiscountedSum: {
      const Rational lambda = m.lambda();
      spec.step = [ground, lambda](const Weight& x, const Weight& y, const ExtValue& z) {
        return ground(x, y) + z.scaled(lambda);
      };
      spec.contraction = lambda;
      spec.distance = [](const ExtValue& a, const ExtValue& b) { return gap(a, b); };
      return spec;
    }
    case Accumulator::kLimAvg:
      throw UnsupportedMetric("no recursive iterator for limit-average; use oracle");
    case Accumulator::kMaxLead:
      throw UnsupportedMetric("maximum-lead needs the lead-table iterator");
  }
  throw std::logic_error("unreachable accumulator");
}

IteratorSpec<LeadTable> lead_iterator_for(const TraceMetric& m,
                                          std::shared_ptr<const LeadDomain> domain) {
  if (m.accumulator() != Accumulator::kMaxLead) {
    throw UnsupportedMetric("lead-table iterator applies to maximum-lead only");
  }
  auto pointwise = [](auto op) {
    return [op](const LeadTable& a, const LeadTable& b) {
      LeadTable out = a;
      for (std::size_t i = 0; i < out.values().size(); ++i) {
        out.values()[i] = op(a.values()[i], b.values()[i]);
      }
      return out;
    };
  };
  IteratorSpec<LeadTable> spec{
      LatticeSpec<LeadTable>{
          LeadTable(domain, ExtValue()),
          pointwise([](const ExtValue& a, const ExtValue& b) { return max(a, b); }),
          pointwise([](const ExtValue& a, const ExtValue& b) { return min(a, b); }),
          [](const LeadTable& a, const LeadTable& b) {
            for (std::size_t i = 0; i < a.values().size(); ++i) {
              if (b.values()[i] < a.values()[i]) return false;
            }
            return true;
          },
          [](const LeadTable& a, const LeadTable& b) { return a == b; },
      },
      {}, {}, std::nullopt, {}};
  spec.step = [](const Weight& x, const Weight& y, const LeadTable& h) {
    LeadTable out(h.domain_ptr(), ExtValue::infinity());
    if (!same_label(x, y)) return out;
    const Rational d = x.value - y.value;
    const auto& leads = h.domain().leads();
    for (std::size_t i = 0; i < leads.size(); ++i) {
      Rational next = leads[i] + d;
      out.values()[i] = max(ExtValue(Rational(abs(next))), h.at(next));
    }
    return out;
  };
  spec.project = [](const LeadTable& h) { return h.at(Rational(0)); };
  return spec;
}

AnyIteratorSpec iterator_for(const TraceMetric& m, const WeightedTransitionSystem& sys,
                             const Rational& lead_cap, LeadPolicy policy, std::size_t max_leads) {
  if (m.accumulator() == Accumulator::kMaxLead) {
    return lead_iterator_for(m, lead_domain_for(sys, lead_cap, policy, max_leads));
  }
  return scalar_iterator_for(m);
}

std::string_view to_string(DistanceStatus status) {
  switch (status) {
    case DistanceStatus::kExact: return "EXACT";
    case DistanceStatus::kConverged: return "CONVERGED";
    case DistanceStatus::kBracket: return "BRACKET";
  }
  return "?";
}

std::optional<PairFunction<ExtValue>> certify_discounted(const TraceMetric& m,
                                                         const WeightedTransitionSystem& sys,
                                                         const PairFunction<ExtValue>& h) {
  const IteratorSpec<ExtValue> spec = scalar_iterator_for(m);
  if (!spec.contraction) return std::nullopt;
  const Rational& lambda = *spec.contraction;
  const std::size_t n = sys.num_states();
  const std::size_t cells = n * n;

  // Positional profile: Player 1 maximizes, Player 2 answers by minimizing,
  // both against the current iterate. Each cell then has one successor.
  std::vector<std::size_t> succ(cells);
  std::vector<ExtValue> cost(cells);
  for (std::size_t p = 0; p < cells; ++p) {
    const StateId s = p / n;
    const StateId t = p % n;
    std::optional<ExtValue> best;
    for (TransitionId xi : sys.outgoing(s)) {
      const Transition& x = sys.transition(xi);
      std::optional<ExtValue> reply;
      const Transition* answer = nullptr;
      for (TransitionId yi : sys.outgoing(t)) {
        const Transition& y = sys.transition(yi);
        ExtValue v = spec.step(x.weight, y.weight, h.at(x.target, y.target));
        if (!reply || v < *reply) {
          reply = v;
          answer = &y;
        }
      }
      if (!best || *best < *reply) {
        best = reply;
        succ[p] = x.target * n + answer->target;
        cost[p] = m.step(x.weight, answer->weight);
      }
    }
  }

  // v(p) = cost(p) + λ·v(succ(p)) on a functional graph: solve each cycle in
  // closed form, then unwind the paths leading into it.
  std::vector<std::optional<ExtValue>> value(cells);
  std::vector<int> on_stack(cells, -1);
  for (std::size_t start = 0; start < cells; ++start) {
    if (value[start]) continue;
    std::vector<std::size_t> stack;
    std::size_t p = start;
    while (!value[p] && on_stack[p] < 0) {
      on_stack[p] = static_cast<int>(stack.size());
      stack.push_back(p);
      p = succ[p];
    }
    std::size_t resolved = stack.size();
    if (!value[p]) {
      const std::size_t first = static_cast<std::size_t>(on_stack[p]);
      ExtValue sum;
      Rational factor = 1;
      for (std::size_t i = first; i < stack.size(); ++i) {
        sum = sum + cost[stack[i]].scaled(factor);
        factor *= lambda;
      }
      value[stack[first]] = sum.scaled(1 / (1 - factor));
      for (std::size_t i = stack.size() - 1; i > first; --i) {
        value[stack[i]] = cost[stack[i]] + value[succ[stack[i]]]->scaled(lambda);
      }
      resolved = first;
    }
    for (std::size_t i = resolved; i-- > 0;) {
      value[stack[i]] = cost[stack[i]] + value[succ[stack[i]]]->scaled(lambda);
    }
    for (std::size_t q : stack) on_stack[q] = -1;
  }

  PairFunction<ExtValue> candidate(n, ExtValue());
  for (std::size_t p = 0; p < cells; ++p) {
    candidate.cells()[p] = *value[p];
    // Infinite cells must already be infinite in the iterate (h ≤ h*);
    // together with I(v) = v this pins v to the least fixed point.
    if (value[p]->is_infinite() && h.cells()[p].is_finite()) return std::nullopt;
  }
  if (apply_I(spec, sys, candidate).cells() != candidate.cells()) return std::nullopt;
  return candidate;
}

namespace {

std::size_t distinct_ground_values(const WeightedTransitionSystem& sys, const TraceMetric& m) {
  std::set<ExtValue> values{ExtValue()};
  for (const auto& x : sys.transitions()) {
    for (const auto& y : sys.transitions()) values.insert(m.step(x.weight, y.weight));
  }
  return values.size();
}

BranchingTable scalar_table(const WeightedTransitionSystem& sys, const TraceMetric& m,
                            const FixpointOptions& opts) {
  const IteratorSpec<ExtValue> spec = scalar_iterator_for(m);
  const std::size_t n = sys.num_states();
  StopRule stop;
  stop.epsilon = opts.epsilon;
  stop.max_iterations = opts.max_iterations;
  stop.jobs = opts.jobs;
  if (!spec.contraction) {
    stop.termination_bound = n * n * (distinct_ground_values(sys, m) + 1) + 1;
  }

  KleeneResult<ExtValue> run = kleene_lfp(spec, sys, stop);
  std::size_t iterations = run.iterations;
  if (run.status == FixpointStatus::kMaxIter) {
    throw ConvergenceError("no fixed point within " + std::to_string(opts.max_iterations) +
                           " sweeps");
  }

  BranchingTable table;
  table.num_states = n;
  table.cells.resize(n * n);
  if (run.status == FixpointStatus::kConverged && opts.exact_discounted) {
    // The profile read off the iterate is usually optimal already; if not,
    // keep sweeping a little and try again.
    PairFunction<ExtValue> h = run.table;
    for (int attempt = 0; attempt < 8 && iterations < opts.max_iterations; ++attempt) {
      if (auto exact = certify_discounted(m, sys, h)) {
        for (std::size_t p = 0; p < n * n; ++p) table.cells[p] = {exact->cells()[p], exact->cells()[p]};
        table.iterations = iterations;
        table.status = DistanceStatus::kExact;
        return table;
      }
      for (int i = 0; i < 8 && iterations < opts.max_iterations; ++i, ++iterations) {
        h = apply_I(spec, sys, h, opts.jobs);
      }
    }
  }

  for (std::size_t p = 0; p < n * n; ++p) {
    const ExtValue& lo = run.table.cells()[p];
    table.cells[p] = {lo, lo + run.error_bound};
  }
  table.iterations = run.iterations;
  table.status = run.status == FixpointStatus::kExact ? DistanceStatus::kExact
                                                       : DistanceStatus::kConverged;
  return table;
}

PairFunction<LeadTable> lead_fixpoint(const WeightedTransitionSystem& sys, const TraceMetric& m,
                                      const FixpointOptions& opts, LeadPolicy policy,
                                      std::size_t& iterations) {
  auto domain = lead_domain_for(sys, opts.lead_cap, policy, opts.max_leads);
  const IteratorSpec<LeadTable> spec = lead_iterator_for(m, domain);
  const std::size_t n = sys.num_states();
  StopRule stop;
  stop.max_iterations = opts.max_iterations;
  stop.jobs = opts.jobs;
  // Values come from {|δ|} ∪ {0, ∞}; every sweep raises at least one entry.
  stop.termination_bound = n * n * domain->size() * (domain->size() + 3) + 1;
  KleeneResult<LeadTable> run = kleene_lfp(spec, sys, stop);
  if (run.status != FixpointStatus::kExact) {
    throw ConvergenceError("maximum-lead iteration did not stabilize within " +
                           std::to_string(opts.max_iterations) + " sweeps");
  }
  iterations += run.iterations;
  return std::move(run.table);
}

BranchingTable lead_table(const WeightedTransitionSystem& sys, const TraceMetric& m,
                          const FixpointOptions& opts) {
  const std::size_t n = sys.num_states();
  BranchingTable table;
  table.num_states = n;
  table.cells.resize(n * n);
  auto under = lead_fixpoint(sys, m, opts, LeadPolicy::kUnderapprox, table.iterations);
  auto over = lead_fixpoint(sys, m, opts, LeadPolicy::kOverapprox, table.iterations);
  table.status = DistanceStatus::kExact;
  for (std::size_t p = 0; p < n * n; ++p) {
    table.cells[p] = {under.cells()[p].at(Rational(0)), over.cells()[p].at(Rational(0))};
    if (!table.cells[p].exact()) table.status = DistanceStatus::kBracket;
  }
  return table;
}

}  // namespace

BranchingTable branching_table(const WeightedTransitionSystem& sys, const TraceMetric& m,
                               const FixpointOptions& opts) {
  switch (m.accumulator()) {
    case Accumulator::kLimAvg:
      throw UnsupportedMetric("no recursive iterator for limit-average; use oracle");
    case Accumulator::kMaxLead:
      return lead_table(sys, m, opts);
    default:
      return scalar_table(sys, m, opts);
  }
}

BranchResult branching_distance(const WeightedTransitionSystem& sys, const TraceMetric& m,
                                StateId s, StateId t, const FixpointOptions& opts) {
  if (s >= sys.num_states() || t >= sys.num_states()) throw ValidationError("unknown state");
  BranchingTable table = branching_table(sys, m, opts);
  BranchResult result{table.at(s, t), table.iterations, table.status};
  if (result.status == DistanceStatus::kBracket && result.value.exact()) {
    result.status = DistanceStatus::kExact;
  }
  return result;
}

SimulationRelation greatest_simulation(const WeightedTransitionSystem& sys,
                                       const LabelPreorder* order) {
  const std::size_t n = sys.num_states();
  SimulationRelation rel(n);
  auto matches = [order](const Weight& x, const Weight& y) {
    return order ? order->leq(x, y) : x == y;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (StateId s = 0; s < n; ++s) {
      for (StateId t = 0; t < n; ++t) {
        if (!rel.contains(s, t)) continue;
        for (TransitionId xi : sys.outgoing(s)) {
          const Transition& x = sys.transition(xi);
          bool answered = false;
          for (TransitionId yi : sys.outgoing(t)) {
            const Transition& y = sys.transition(yi);
            if (matches(x.weight, y.weight) && rel.contains(x.target, y.target)) {
              answered = true;
              break;
            }
          }
          if (!answered) {
            rel.remove(s, t);
            changed = true;
            break;
          }
        }
      }
    }
  }
  return rel;
}

bool discrete_simulation_check(const WeightedTransitionSystem& sys, StateId s, StateId t,
                               const LabelPreorder* order) {
  if (s >= sys.num_states() || t >= sys.num_states()) throw ValidationError("unknown state");
  return greatest_simulation(sys, order).contains(s, t);
}

}  // namespace wtsdist
