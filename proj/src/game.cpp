#include "wtsdist/game.hpp"

#include <cstdlib>
#include <map>
#include <string>
#include <tuple>

namespace wtsdist {

std::uint64_t OracleOptions::default_max_nodes() {
  if (const char* env = std::getenv("WTSDIST_MAX_NODES")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      // fall through to the default
    }
  }
  return 50'000'000;
}

Player1Strategy blind_strategy(LassoPath path) {
  return [path = std::move(path)](const Configuration& c) { return path.step(c.p1.length()); };
}

Player2Strategy mimic_strategy(const WeightedTransitionSystem& sys) {
  return [&sys](const Configuration& c) {
    const StateId here = c.p2.last(sys);
    auto options = sys.outgoing(here);
    if (c.p1.steps.empty()) return options.front();
    const Transition& move = sys.transition(c.p1.steps.back());
    std::optional<TransitionId> same_weight;
    for (TransitionId id : options) {
      const Transition& t = sys.transition(id);
      if (t.weight == move.weight) {
        if (t.target == move.target) return id;
        if (!same_weight) same_weight = id;
      }
    }
    return same_weight.value_or(options.front());
  };
}

namespace {

void check_move(const WeightedTransitionSystem& sys, TransitionId id, StateId expected,
                const char* who) {
  if (id >= sys.num_transitions()) {
    throw StrategyViolation(std::string(who) + " chose an unknown transition");
  }
  if (sys.transition(id).source != expected) {
    throw StrategyViolation(std::string(who) + " moved from " +
                            sys.state_name(sys.transition(id).source) + " instead of " +
                            sys.state_name(expected));
  }
}

}  // namespace

Configuration round(const WeightedTransitionSystem& sys, const Player1Strategy& theta1,
                    const Player2Strategy& theta2, const Configuration& c) {
  Configuration next = c;
  TransitionId first = theta1(c);
  check_move(sys, first, c.p1.last(sys), "player 1");
  next.p1.steps.push_back(first);
  TransitionId reply = theta2(next);
  check_move(sys, reply, c.p2.last(sys), "player 2");
  next.p2.steps.push_back(reply);
  return next;
}

Playout playout(const WeightedTransitionSystem& sys, const Player1Strategy& theta1,
                const Player2Strategy& theta2, StateId s, StateId t, std::size_t k) {
  Configuration c{{s, {}}, {t, {}}};
  for (std::size_t i = 0; i < k; ++i) c = round(sys, theta1, theta2, c);
  Playout out;
  out.trace1 = c.p1.trace(sys);
  out.trace2 = c.p2.trace(sys);
  out.p1 = std::move(c.p1);
  out.p2 = std::move(c.p2);
  return out;
}

namespace {

class NodeBudget {
 public:
  explicit NodeBudget(std::uint64_t cap) : cap_(cap) {}
  void tick() {
    if (++used_ > cap_) {
      throw BudgetExceeded("oracle search exceeded " + std::to_string(cap_) +
                           " nodes (set WTSDIST_MAX_NODES to raise)");
    }
  }

 private:
  std::uint64_t cap_;
  std::uint64_t used_ = 0;
};

struct MemoKey {
  StateId s;
  StateId t;
  std::size_t remaining;
  Rational lead;

  friend bool operator<(const MemoKey& a, const MemoKey& b) {
    if (a.s != b.s) return a.s < b.s;
    if (a.t != b.t) return a.t < b.t;
    if (a.remaining != b.remaining) return a.remaining < b.remaining;
    return a.lead < b.lead;
  }
};

// Backward induction over (state pair, remaining depth[, lead]). The value
// returned is the best future contribution; the accumulator's combine step
// is monotone, so it commutes with the max/min of the two players.
class MemoSearch {
 public:
  MemoSearch(const WeightedTransitionSystem& sys, const TraceMetric& m, std::uint64_t cap)
      : sys_(sys), m_(m), budget_(cap) {}

  ExtValue value(StateId s, StateId t, std::size_t remaining, const Rational& lead) {
    if (remaining == 0) return ExtValue();
    MemoKey key{s, t, remaining, m_.accumulator() == Accumulator::kMaxLead ? lead : Rational(0)};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    budget_.tick();

    ExtValue best;
    bool first_x = true;
    for (TransitionId xi : sys_.outgoing(s)) {
      const Transition& x = sys_.transition(xi);
      std::optional<ExtValue> reply;
      for (TransitionId yi : sys_.outgoing(t)) {
        const Transition& y = sys_.transition(yi);
        ExtValue v = combine(x, y, remaining, key.lead);
        if (!reply || v < *reply) reply = v;
        if (reply->is_zero()) break;
      }
      if (first_x || best < *reply) best = *reply;
      first_x = false;
      if (best.is_infinite()) break;
    }
    memo_.emplace(std::move(key), best);
    return best;
  }

 private:
  ExtValue combine(const Transition& x, const Transition& y, std::size_t remaining,
                   const Rational& lead) {
    switch (m_.accumulator()) {
      case Accumulator::kDiscrete:
      case Accumulator::kSup: {
        ExtValue here = m_.step(x.weight, y.weight);
        if (here.is_infinite()) return here;
        return max(here, value(x.target, y.target, remaining - 1, lead));
      }
      case Accumulator::kDiscountedSum: {
        ExtValue here = m_.step(x.weight, y.weight);
        if (here.is_infinite()) return here;
        return here + value(x.target, y.target, remaining - 1, lead).scaled(m_.lambda());
      }
      case Accumulator::kMaxLead: {
        if (!same_label(x.weight, y.weight)) return ExtValue::infinity();
        Rational next = lead + x.weight.value - y.weight.value;
        ExtValue here(Rational(abs(next)));
        return max(here, value(x.target, y.target, remaining - 1, next));
      }
      case Accumulator::kLimAvg:
        break;
    }
    throw std::logic_error("memoized search does not handle " +
                           std::string(to_string(m_.accumulator())));
  }

  const WeightedTransitionSystem& sys_;
  const TraceMetric& m_;
  NodeBudget budget_;
  std::map<MemoKey, ExtValue> memo_;
};

class TreeSearch {
 public:
  TreeSearch(const WeightedTransitionSystem& sys, const TraceMetric& m, std::size_t k,
             std::uint64_t cap)
      : sys_(sys), m_(m), k_(k), budget_(cap) {}

  ExtValue value(StateId s, StateId t) {
    budget_.tick();
    if (trace1_.size() == k_) return eval_truncated(m_, trace1_, trace2_, k_);
    std::optional<ExtValue> best;
    for (TransitionId xi : sys_.outgoing(s)) {
      const Transition& x = sys_.transition(xi);
      trace1_.push_back(x.weight);
      std::optional<ExtValue> reply;
      for (TransitionId yi : sys_.outgoing(t)) {
        const Transition& y = sys_.transition(yi);
        trace2_.push_back(y.weight);
        ExtValue v = value(x.target, y.target);
        trace2_.pop_back();
        if (!reply || v < *reply) reply = v;
      }
      trace1_.pop_back();
      if (!best || *best < *reply) best = reply;
    }
    return *best;
  }

 private:
  const WeightedTransitionSystem& sys_;
  const TraceMetric& m_;
  std::size_t k_;
  NodeBudget budget_;
  std::vector<Weight> trace1_;
  std::vector<Weight> trace2_;
};

bool memo_safe(Accumulator acc) { return acc != Accumulator::kLimAvg; }

void check_states(const WeightedTransitionSystem& sys, StateId s, StateId t) {
  if (s >= sys.num_states() || t >= sys.num_states()) throw ValidationError("unknown state");
}

}  // namespace

ExtValue bounded_value(const WeightedTransitionSystem& sys, StateId s, StateId t,
                       const TraceMetric& m, std::size_t k, const OracleOptions& opts) {
  check_states(sys, s, t);
  if (!memo_safe(m.accumulator())) return bounded_value_tree(sys, s, t, m, k, opts);
  MemoSearch search(sys, m, opts.max_nodes);
  return search.value(s, t, k, Rational(0));
}

ExtValue bounded_value_tree(const WeightedTransitionSystem& sys, StateId s, StateId t,
                            const TraceMetric& m, std::size_t k, const OracleOptions& opts) {
  check_states(sys, s, t);
  TreeSearch search(sys, m, k, opts.max_nodes);
  return search.value(s, t);
}

namespace {

// Player 2's knowledge after Player 1 committed to a prefix: for every
// reachable (t-state, lead) the least partial payoff of any matching path.
// Entries at ∞ are dropped; an empty belief means every answer pays ∞.
using Belief = std::map<std::pair<StateId, Rational>, ExtValue>;

class BlindSearch {
 public:
  BlindSearch(const WeightedTransitionSystem& sys, const TraceMetric& m, std::size_t k,
              std::uint64_t cap)
      : sys_(sys), m_(m), k_(k), budget_(cap) {}

  ExtValue value(StateId s, std::size_t depth, const Belief& belief) {
    if (belief.empty()) return ExtValue::infinity();
    if (depth == k_) return finish(belief);
    auto key = std::make_tuple(s, depth, belief);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    budget_.tick();

    ExtValue best;
    for (TransitionId xi : sys_.outgoing(s)) {
      const Transition& x = sys_.transition(xi);
      best = max(best, value(x.target, depth + 1, advance(belief, x.weight, depth)));
      if (best.is_infinite()) break;
    }
    memo_.emplace(std::move(key), best);
    return best;
  }

 private:
  ExtValue finish(const Belief& belief) const {
    ExtValue best = ExtValue::infinity();
    for (const auto& [_, v] : belief) best = min(best, v);
    if (m_.accumulator() == Accumulator::kLimAvg && k_ > 0) {
      best = best.scaled(Rational(1, static_cast<unsigned long>(k_)));
    }
    return best;
  }

  Belief advance(const Belief& belief, const Weight& x, std::size_t index) {
    Belief next;
    const bool discounted = m_.accumulator() == Accumulator::kDiscountedSum;
    const Rational factor = discounted ? pow(m_.lambda(), index) : Rational(1);
    for (const auto& [key, partial] : belief) {
      const auto& [q, lead] = key;
      for (TransitionId yi : sys_.outgoing(q)) {
        const Transition& y = sys_.transition(yi);
        Rational next_lead = 0;
        ExtValue v;
        switch (m_.accumulator()) {
          case Accumulator::kDiscrete:
          case Accumulator::kSup:
            v = max(partial, m_.step(x, y.weight));
            break;
          case Accumulator::kDiscountedSum:
            v = partial + m_.step(x, y.weight).scaled(factor);
            break;
          case Accumulator::kLimAvg:
            v = partial + m_.step(x, y.weight);
            break;
          case Accumulator::kMaxLead:
            if (!same_label(x, y.weight)) continue;
            next_lead = lead + x.value - y.weight.value;
            v = max(partial, ExtValue(Rational(abs(next_lead))));
            break;
        }
        if (v.is_infinite()) continue;
        auto [it, inserted] = next.try_emplace({y.target, next_lead}, v);
        if (!inserted && v < it->second) it->second = v;
      }
    }
    return next;
  }

  const WeightedTransitionSystem& sys_;
  const TraceMetric& m_;
  std::size_t k_;
  NodeBudget budget_;
  std::map<std::tuple<StateId, std::size_t, Belief>, ExtValue> memo_;
};

}  // namespace

ExtValue bounded_blind_value(const WeightedTransitionSystem& sys, StateId s, StateId t,
                             const TraceMetric& m, std::size_t k, const OracleOptions& opts) {
  check_states(sys, s, t);
  BlindSearch search(sys, m, k, opts.max_nodes);
  Belief start{{{t, Rational(0)}, ExtValue()}};
  return search.value(s, 0, start);
}

}  // namespace wtsdist
