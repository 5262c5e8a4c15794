#pragma once

#include <set>
#include <string_view>

#include "wtsdist/ext_value.hpp"
#include "wtsdist/metrics.hpp"
#include "wtsdist/wts.hpp"

namespace wtsdist {

/// A node of the determinized product used for trace inclusion: Player 1
/// sits at `left`, and `right` holds every t-state that can have produced
/// a matching trace so far. An empty `right` means inclusion failed.
struct SubsetState {
  StateId left;
  std::set<StateId> right;

  friend auto operator<=>(const SubsetState&, const SubsetState&) = default;
};

enum class LinearMethod { kExact, kBracket, kLowerOnly, kEstimate };

std::string_view to_string(LinearMethod method);

struct LinearBound {
  ExtValue lower;
  ExtValue upper;
  std::size_t depth = 0;
  LinearMethod method = LinearMethod::kLowerOnly;
};

/// 0 if every trace from s is matched index-wise (or ⊑-dominated, when an
/// order is given) by a trace from t; infinity otherwise.
///
/// With `antichain` set, a subset state is skipped when a visited state has
/// the same left component and a smaller right set.
ExtValue linear_discrete(const WeightedTransitionSystem& sys, StateId s, StateId t,
                         const LabelPreorder* order = nullptr, bool antichain = false);

/// Bounds on the linear distance from the depth-k blind game.
///
/// Discrete metrics are decided exactly. Discounted sums get the tail bound
/// λ^k·W/(1−λ), W being the largest ground distance over transition pairs.
/// Other accumulators only get the lower bound (upper is infinity).
LinearBound linear_bound(const WeightedTransitionSystem& sys, StateId s, StateId t,
                         const TraceMetric& m, std::size_t k);

/// sup over lassos from s of inf over lassos from t of eval_exact, both
/// sets restricted to the given prefix and cycle bounds. Neither a lower nor
/// an upper bound in general.
ExtValue linear_lasso_estimate(const WeightedTransitionSystem& sys, StateId s, StateId t,
                               const TraceMetric& m, std::size_t max_prefix,
                               std::size_t max_cycle);

/// Largest ground distance between two transition weights of the system.
ExtValue max_ground_distance(const WeightedTransitionSystem& sys, const TraceMetric& m);

}  // namespace wtsdist
