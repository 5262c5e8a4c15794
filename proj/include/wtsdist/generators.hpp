#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "wtsdist/metrics.hpp"
#include "wtsdist/wts.hpp"

namespace wtsdist {

/// Two traces with a shared first weight that the metric separates in both
/// directions.
struct IneqSpec {
  LassoTrace sigma;
  LassoTrace tau;
  TraceMetric metric;
};

struct IneqSystem {
  WeightedTransitionSystem sys;
  StateId s;
  StateId t;
};

/// The classic "inclusion without simulation" pair. From s, one step of the
/// shared head leads to a choice between the σ and τ continuations; from t
/// the choice is made up front. Tr(s) = Tr(t) by construction.
/// Throws ValidationError naming the failed precondition.
IneqSystem build_inequivalence(const IneqSpec& spec);

struct RandomWtsOptions {
  std::size_t states = 4;
  std::size_t max_out = 2;
  /// 0 gives an unlabeled system; otherwise labels a, b, c, ...
  std::size_t alphabet_size = 2;
  Rational weight_min = 0;
  Rational weight_max = 2;
  /// Weights are drawn from weight_min + j/denominator.
  unsigned long denominator = 1;
  std::uint64_t seed = 0;
};

WeightedTransitionSystem random_wts(const RandomWtsOptions& opts);

/// "a:0 | a:1, b:2": comma-separated prefix, a bar, comma-separated cycle.
/// Items are "label:weight" or a bare weight. The prefix may be empty.
LassoTrace parse_lasso_literal(std::string_view text);
std::string format_lasso_literal(const LassoTrace& trace);

}  // namespace wtsdist
