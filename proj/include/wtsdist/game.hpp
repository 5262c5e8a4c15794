#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "wtsdist/errors.hpp"
#include "wtsdist/ext_value.hpp"
#include "wtsdist/metrics.hpp"
#include "wtsdist/wts.hpp"

namespace wtsdist {

/// A game position: the two histories built so far. Between rounds both
/// paths have the same length; within a round p1 is one step ahead.
struct Configuration {
  FinitePath p1;
  FinitePath p2;
};

/// Player 1 maps a configuration to a transition leaving last(p1).
using Player1Strategy = std::function<TransitionId(const Configuration&)>;
/// Player 2 sees (p1 extended by Player 1's move, p2) and answers with a
/// transition leaving last(p2).
using Player2Strategy = std::function<TransitionId(const Configuration&)>;

/// A blind Player-1 strategy is a committed path; it ignores p2.
Player1Strategy blind_strategy(LassoPath path);

/// A Player-2 strategy carrying extra memory of type M.
template <class M>
struct MemoryStrategy2 {
  M initial;
  std::function<std::pair<TransitionId, M>(const Configuration&, const M&)> choose;
};

/// Plays a memory strategy as an ordinary one: the memory is recomputed by
/// replaying the rounds recorded in the configuration, so the result stays a
/// pure function of the history.
template <class M>
Player2Strategy with_memory(MemoryStrategy2<M> strategy) {
  return [strategy = std::move(strategy)](const Configuration& c) {
    M memory = strategy.initial;
    const std::size_t rounds = c.p2.steps.size();
    for (std::size_t i = 0; i < rounds; ++i) {
      Configuration past{{c.p1.start, {c.p1.steps.begin(), c.p1.steps.begin() + static_cast<std::ptrdiff_t>(i + 1)}},
                         {c.p2.start, {c.p2.steps.begin(), c.p2.steps.begin() + static_cast<std::ptrdiff_t>(i)}}};
      memory = strategy.choose(past, memory).second;
    }
    return strategy.choose(c, memory).first;
  };
}

/// Copies Player 1's last weight when possible (preferring the same target
/// state), otherwise takes the first outgoing transition.
Player2Strategy mimic_strategy(const WeightedTransitionSystem& sys);

/// Round(θ1, θ2)(p1, p2) = (p1·θ1(p1,p2), p2·θ2(p1·θ1(p1,p2), p2)).
/// Throws StrategyViolation on a move from the wrong state.
Configuration round(const WeightedTransitionSystem& sys, const Player1Strategy& theta1,
                    const Player2Strategy& theta2, const Configuration& c);

struct Playout {
  FinitePath p1;
  FinitePath p2;
  std::vector<Weight> trace1;
  std::vector<Weight> trace2;
};

/// k rounds of the profile from (s, t).
Playout playout(const WeightedTransitionSystem& sys, const Player1Strategy& theta1,
                const Player2Strategy& theta2, StateId s, StateId t, std::size_t k);

struct OracleOptions {
  /// Search-node budget; BudgetExceeded is thrown beyond it.
  std::uint64_t max_nodes = default_max_nodes();

  /// WTSDIST_MAX_NODES from the environment, else 50 million.
  static std::uint64_t default_max_nodes();
};

/// Depth-k value of the full-information game: Player 1 moves, Player 2
/// answers after seeing the move, payoff eval_truncated(m, ·, ·, k).
/// Memoized backward induction for kDiscrete, kSup, kDiscountedSum and
/// kMaxLead; plain tree search otherwise.
ExtValue bounded_value(const WeightedTransitionSystem& sys, StateId s, StateId t,
                       const TraceMetric& m, std::size_t k, const OracleOptions& opts = {});

/// Unmemoized game-tree search over explicit histories, scoring every leaf
/// with eval_truncated. Exponential; meant for cross-checking.
ExtValue bounded_value_tree(const WeightedTransitionSystem& sys, StateId s, StateId t,
                            const TraceMetric& m, std::size_t k,
                            const OracleOptions& opts = {});

/// max over length-k paths from s of min over length-k paths from t of
/// eval_truncated. Player 1's paths are enumerated; Player 2's best answer is
/// computed by a forward sweep over t-states for each committed prefix.
ExtValue bounded_blind_value(const WeightedTransitionSystem& sys, StateId s, StateId t,
                             const TraceMetric& m, std::size_t k,
                             const OracleOptions& opts = {});

}  // namespace wtsdist
