#pragma once

// Fixtures and brute-force reference implementations shared by the unit
// tests and the acceptance driver. Nothing here calls the code it checks.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wtsdist/ext_value.hpp"
#include "wtsdist/generators.hpp"
#include "wtsdist/metrics.hpp"
#include "wtsdist/wts.hpp"

namespace wtsdist::testing {

inline Weight W(const std::string& label, long num, long den = 1) {
  return Weight{label, Rational(num, den)};
}
inline Weight U(long num, long den = 1) { return Weight(Rational(num, den)); }

inline ExtValue inf() { return ExtValue::infinity(); }
inline ExtValue q(long num, long den = 1) { return ExtValue(Rational(num, den)); }

// s loops on `left`, t loops on `right`.
inline WeightedTransitionSystem loop_pair(const Weight& left, const Weight& right) {
  WtsBuilder b;
  if (left.label) b.set_alphabet(left.label == right.label ? std::vector<std::string>{*left.label}
                                                           : std::vector<std::string>{*left.label, *right.label});
  b.add_state("s").add_state("t");
  b.add_transition("s", left, "s").add_transition("t", right, "t");
  return b.build();
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

 private:
  std::mt19937_64 gen_;
};

// Random labeled lasso over `labels` with values in {lo..hi}/den.
inline LassoTrace random_lasso(Rng& rng, const std::vector<std::string>& labels, long lo, long hi,
                               long den = 1, std::size_t max_prefix = 3,
                               std::size_t max_cycle = 3) {
  auto draw = [&]() {
    return W(labels[rng.below(labels.size())], lo + static_cast<long>(rng.below(hi - lo + 1)), den);
  };
  std::vector<Weight> prefix(rng.below(max_prefix + 1));
  std::vector<Weight> cycle(rng.between(1, max_cycle));
  for (auto& w : prefix) w = draw();
  for (auto& w : cycle) w = draw();
  return LassoTrace(std::move(prefix), std::move(cycle));
}

inline WeightedTransitionSystem random_system(std::uint64_t seed, std::size_t states,
                                              std::size_t max_out, std::size_t alphabet,
                                              long wmax = 1, unsigned long denom = 1) {
  RandomWtsOptions o;
  o.states = states;
  o.max_out = max_out;
  o.alphabet_size = alphabet;
  o.weight_min = 0;
  o.weight_max = wmax;
  o.denominator = denom;
  o.seed = seed;
  return random_wts(o);
}

// Greatest simulation by naive refinement over an explicit pair set:
// drop (p, q) while some move of p has no equal-weight answer from q that
// lands back inside the set.
inline std::set<std::pair<StateId, StateId>> reference_simulation(
    const WeightedTransitionSystem& sys) {
  std::set<std::pair<StateId, StateId>> rel;
  for (StateId p = 0; p < sys.num_states(); ++p) {
    for (StateId q = 0; q < sys.num_states(); ++q) rel.emplace(p, q);
  }
  for (;;) {
    std::set<std::pair<StateId, StateId>> keep;
    for (const auto& [p, q] : rel) {
      bool ok = true;
      for (const auto& x : sys.transitions()) {
        if (x.source != p) continue;
        bool answered = false;
        for (const auto& y : sys.transitions()) {
          if (y.source == q && y.weight == x.weight && rel.contains({x.target, y.target})) {
            answered = true;
          }
        }
        ok = ok && answered;
      }
      if (ok) keep.emplace(p, q);
    }
    if (keep == rel) return rel;
    rel = std::move(keep);
  }
}

// Finite-prefix trace inclusion up to `depth` steps: layer by layer, every
// s-state reachable by a word is paired with the set of t-states reachable by
// the same word. Inclusion fails as soon as some word has no partner.
inline bool reference_prefix_inclusion(const WeightedTransitionSystem& sys, StateId s, StateId t,
                                       std::size_t depth) {
  std::set<std::pair<StateId, std::set<StateId>>> layer{{s, {t}}};
  for (std::size_t d = 0; d < depth; ++d) {
    std::set<std::pair<StateId, std::set<StateId>>> next;
    for (const auto& [p, reach] : layer) {
      for (const auto& x : sys.transitions()) {
        if (x.source != p) continue;
        std::set<StateId> r;
        for (const auto& y : sys.transitions()) {
          if (reach.contains(y.source) && y.weight == x.weight) r.insert(y.target);
        }
        if (r.empty()) return false;
        next.emplace(x.target, std::move(r));
      }
    }
    layer = std::move(next);
  }
  return true;
}


}  // namespace wtsdist::testing
