#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wtsdist/rational.hpp"

namespace wtsdist {

using StateId = std::size_t;
using TransitionId = std::size_t;

/// One element of K: an optional discrete label and an exact weight.
struct Weight {
  std::optional<std::string> label;
  Rational value;

  Weight() = default;
  Weight(Rational v) : value(std::move(v)) {}  // NOLINT
  Weight(std::string l, Rational v) : label(std::move(l)), value(std::move(v)) {}

  /// "label:value" or just "value".
  std::string to_string() const;

  friend bool operator==(const Weight& a, const Weight& b) {
    return a.label == b.label && a.value == b.value;
  }
  friend bool operator<(const Weight& a, const Weight& b) {
    if (a.label != b.label) return a.label < b.label;
    return a.value < b.value;
  }
};

struct Transition {
  StateId source;
  Weight weight;
  StateId target;
};

/// Finite, non-blocking weighted transition system. Immutable once built;
/// construct through WtsBuilder or parse_wts.
class WeightedTransitionSystem {
 public:
  std::size_t num_states() const { return names_.size(); }
  std::size_t num_transitions() const { return transitions_.size(); }

  const std::string& state_name(StateId s) const { return names_.at(s); }
  /// Throws ValidationError("unknown state <name>").
  StateId state_id(std::string_view name) const;
  bool has_state(std::string_view name) const;

  const Transition& transition(TransitionId id) const { return transitions_.at(id); }
  const std::vector<Transition>& transitions() const { return transitions_; }
  std::span<const TransitionId> outgoing(StateId s) const { return outgoing_.at(s); }

  const std::optional<std::vector<std::string>>& alphabet() const { return alphabet_; }
  bool labeled() const { return alphabet_.has_value(); }

 private:
  friend class WtsBuilder;

  std::vector<std::string> names_;
  std::map<std::string, StateId, std::less<>> index_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<TransitionId>> outgoing_;
  std::optional<std::vector<std::string>> alphabet_;
};

/// Accumulates states and transitions by name; build() validates.
class WtsBuilder {
 public:
  WtsBuilder& set_alphabet(std::vector<std::string> symbols);
  /// Duplicate names are reported by build().
  WtsBuilder& add_state(std::string name);
  WtsBuilder& add_transition(std::string from, Weight weight, std::string to);

  /// Checks: unique state names, known endpoints, labels inside the alphabet,
  /// uniform presence of labels, and non-blocking. Identical transitions
  /// collapse into one (T is a set).
  WeightedTransitionSystem build() const;

 private:
  struct PendingTransition {
    std::string from;
    Weight weight;
    std::string to;
  };
  std::optional<std::vector<std::string>> alphabet_;
  std::vector<std::string> states_;
  std::vector<PendingTransition> transitions_;
};

/// Parses the JSON wire format:
///   {"alphabet": [...]?, "states": [...],
///    "transitions": [{"from": s, "label": a?, "weight": "p/q"|int, "to": t}]}
WeightedTransitionSystem parse_wts(std::string_view text);

/// Emits the same format; weights as canonical rational strings.
std::string serialize_wts(const WeightedTransitionSystem& sys, int indent = 2);

/// A finite path: `steps` are transitions chained from `start`.
struct FinitePath {
  StateId start = 0;
  std::vector<TransitionId> steps;

  std::size_t length() const { return steps.size(); }
  StateId last(const WeightedTransitionSystem& sys) const;
  std::vector<Weight> trace(const WeightedTransitionSystem& sys) const;
  /// Throws ValidationError when the chaining is broken.
  void validate(const WeightedTransitionSystem& sys) const;

  friend bool operator==(const FinitePath&, const FinitePath&) = default;
};

/// An ultimately periodic infinite path: prefix followed by a repeated cycle
/// that returns to the prefix's last state.
struct LassoPath {
  FinitePath prefix;
  std::vector<TransitionId> cycle;

  void validate(const WeightedTransitionSystem& sys) const;
  /// Shortest prefix and primitive cycle with the same unrolling.
  LassoPath normalized() const;
  TransitionId step(std::size_t j) const;

  friend bool operator==(const LassoPath&, const LassoPath&) = default;
  friend auto operator<=>(const LassoPath& a, const LassoPath& b) {
    return std::tie(a.prefix.start, a.prefix.steps, a.cycle) <=>
           std::tie(b.prefix.start, b.prefix.steps, b.cycle);
  }
};

/// An ultimately periodic trace σ = prefix · cycle^ω.
///
/// The regular constructor normalizes (shortest prefix, primitive cycle), so
/// two normalized lassos are trace-equal iff they are structurally equal.
/// `unnormalized` keeps the given shape; align() uses it.
class LassoTrace {
 public:
  LassoTrace(std::vector<Weight> prefix, std::vector<Weight> cycle);
  static LassoTrace unnormalized(std::vector<Weight> prefix,
                                 std::vector<Weight> cycle);

  const std::vector<Weight>& prefix() const { return prefix_; }
  const std::vector<Weight>& cycle() const { return cycle_; }

  /// σ_j of the unrolled trace.
  const Weight& at(std::size_t j) const;
  /// σ^j: the trace with the first j elements removed.
  LassoTrace tail(std::size_t j) const;
  /// First n elements of the unrolling.
  std::vector<Weight> unroll(std::size_t n) const;
  LassoTrace normalized() const;
  bool labeled() const;

  std::string to_string() const;

  /// Trace equality (unrollings agree everywhere).
  friend bool operator==(const LassoTrace& a, const LassoTrace& b);

 private:
  LassoTrace() = default;
  std::vector<Weight> prefix_;
  std::vector<Weight> cycle_;
};

/// tr(π) of a lasso path.
LassoTrace trace_of_lasso_path(const WeightedTransitionSystem& sys,
                               const LassoPath& path);

/// Rewrites both traces to share prefix length max(|a.prefix|, |b.prefix|)
/// and cycle length lcm(|a.cycle|, |b.cycle|).
std::pair<LassoTrace, LassoTrace> align(const LassoTrace& a, const LassoTrace& b);

/// All lasso paths from `s` whose normalized form has prefix length
/// ≤ max_prefix and cycle length ≤ max_cycle, normalized and sorted.
std::vector<LassoPath> enumerate_lassos(const WeightedTransitionSystem& sys,
                                        StateId s, std::size_t max_prefix,
                                        std::size_t max_cycle);

namespace detail {

/// Shared normalization for lasso paths and traces.
template <class T>
void normalize_lasso(std::vector<T>& prefix, std::vector<T>& cycle) {
  const std::size_t n = cycle.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = cycle[i] == cycle[i - p];
    if (periodic) {
      cycle.resize(p);
      break;
    }
  }
  while (!prefix.empty() && prefix.back() == cycle.back()) {
    T last = std::move(cycle.back());
    cycle.pop_back();
    cycle.insert(cycle.begin(), std::move(last));
    prefix.pop_back();
  }
}

}  // namespace detail
}  // namespace wtsdist
