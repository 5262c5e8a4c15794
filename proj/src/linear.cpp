#include "wtsdist/linear.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "wtsdist/errors.hpp"
#include "wtsdist/game.hpp"

namespace wtsdist {

std::string_view to_string(LinearMethod method) {
  switch (method) {
    case LinearMethod::kExact: return "EXACT";
    case LinearMethod::kBracket: return "BRACKET";
    case LinearMethod::kLowerOnly: return "LOWER_ONLY";
    case LinearMethod::kEstimate: return "ESTIMATE";
  }
  return "?";
}

namespace {

void check_states(const WeightedTransitionSystem& sys, StateId s, StateId t) {
  if (s >= sys.num_states() || t >= sys.num_states()) throw ValidationError("unknown state");
}

bool subsumed(const std::map<StateId, std::vector<std::set<StateId>>>& seen,
              const SubsetState& q) {
  auto it = seen.find(q.left);
  if (it == seen.end()) return false;
  for (const auto& r : it->second) {
    if (std::includes(q.right.begin(), q.right.end(), r.begin(), r.end())) return true;
  }
  return false;
}

}  // namespace

ExtValue linear_discrete(const WeightedTransitionSystem& sys, StateId s, StateId t,
                         const LabelPreorder* order, bool antichain) {
  check_states(sys, s, t);
  auto matches = [order](const Weight& x, const Weight& y) {
    return order ? order->leq(x, y) : x == y;
  };

  std::set<SubsetState> visited;
  // For the antichain variant: right sets seen per left state. A larger
  // right set offers Player 2 more options, so it cannot fail first.
  std::map<StateId, std::vector<std::set<StateId>>> minimal;
  std::deque<SubsetState> frontier;
  SubsetState start{s, {t}};
  visited.insert(start);
  minimal[s].push_back(start.right);
  frontier.push_back(std::move(start));

  while (!frontier.empty()) {
    SubsetState q = std::move(frontier.front());
    frontier.pop_front();
    for (TransitionId xi : sys.outgoing(q.left)) {
      const Transition& x = sys.transition(xi);
      SubsetState next{x.target, {}};
      for (StateId r : q.right) {
        for (TransitionId yi : sys.outgoing(r)) {
          const Transition& y = sys.transition(yi);
          if (matches(x.weight, y.weight)) next.right.insert(y.target);
        }
      }
      if (next.right.empty()) return ExtValue::infinity();
      if (antichain && subsumed(minimal, next)) continue;
      if (!visited.insert(next).second) continue;
      if (antichain) minimal[next.left].push_back(next.right);
      frontier.push_back(std::move(next));
    }
  }
  return ExtValue();
}

ExtValue max_ground_distance(const WeightedTransitionSystem& sys, const TraceMetric& m) {
  ExtValue w;
  for (const auto& x : sys.transitions()) {
    for (const auto& y : sys.transitions()) w = max(w, m.step(x.weight, y.weight));
  }
  return w;
}

LinearBound linear_bound(const WeightedTransitionSystem& sys, StateId s, StateId t,
                         const TraceMetric& m, std::size_t k) {
  if (k < 1) throw std::invalid_argument("linear bound needs depth k >= 1");
  check_states(sys, s, t);
  LinearBound out;
  out.depth = k;
  out.lower = bounded_blind_value(sys, s, t, m, k);
  switch (m.accumulator()) {
    case Accumulator::kDiscrete:
      out.upper = linear_discrete(sys, s, t, m.ground().order());
      break;
    case Accumulator::kDiscountedSum: {
      const Rational& lambda = m.lambda();
      out.upper = out.lower + max_ground_distance(sys, m).scaled(pow(lambda, k) / (1 - lambda));
      break;
    }
    default:
      out.upper = ExtValue::infinity();
      out.method = out.lower.is_infinite() ? LinearMethod::kExact : LinearMethod::kLowerOnly;
      return out;
  }
  out.method = out.lower == out.upper ? LinearMethod::kExact : LinearMethod::kBracket;
  return out;
}

ExtValue linear_lasso_estimate(const WeightedTransitionSystem& sys, StateId s, StateId t,
                               const TraceMetric& m, std::size_t max_prefix,
                               std::size_t max_cycle) {
  check_states(sys, s, t);
  if (max_cycle < 1) throw std::invalid_argument("lasso cycle bound must be >= 1");
  std::vector<LassoTrace> left;
  std::vector<LassoTrace> right;
  for (const auto& p : enumerate_lassos(sys, s, max_prefix, max_cycle)) {
    left.push_back(trace_of_lasso_path(sys, p));
  }
  for (const auto& p : enumerate_lassos(sys, t, max_prefix, max_cycle)) {
    right.push_back(trace_of_lasso_path(sys, p));
  }
  if (left.empty()) return ExtValue();
  if (right.empty()) return ExtValue::infinity();

  ExtValue best;
  for (const auto& a : left) {
    std::optional<ExtValue> reply;
    for (const auto& b : right) {
      ExtValue v = eval_exact(m, a, b);
      if (!reply || v < *reply) reply = v;
      if (reply->is_zero()) break;
    }
    best = max(best, *reply);
  }
  return best;
}

}  // namespace wtsdist
