#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <variant>
#include <vector>

#include "wtsdist/errors.hpp"
#include "wtsdist/ext_value.hpp"
#include "wtsdist/metrics.hpp"
#include "wtsdist/wts.hpp"

namespace wtsdist {

/// A complete lattice, given by its operations on a representation type L.
template <class L>
struct LatticeSpec {
  L bottom;
  std::function<L(const L&, const L&)> join;
  std::function<L(const L&, const L&)> meet;
  std::function<bool(const L&, const L&)> leq;
  std::function<bool(const L&, const L&)> equal;
};

/// A distance iterator: f(σ, τ) = F(σ_0, τ_0, f(σ^1, τ^1)) with d_T = g ∘ f.
template <class L>
struct IteratorSpec {
  LatticeSpec<L> lattice;
  /// F(x, y, ·), monotone in its lattice argument.
  std::function<L(const Weight&, const Weight&, const L&)> step;
  /// g, monotone.
  std::function<ExtValue(const L&)> project;
  /// Set when F(x, y, ·) is a λ-contraction in the sup norm; `distance`
  /// then measures |b − a| for a ≤ b.
  std::optional<Rational> contraction;
  std::function<ExtValue(const L&, const L&)> distance;
};

/// A total map S × S → L, stored row-major.
template <class L>
class PairFunction {
 public:
  PairFunction(std::size_t n, const L& fill) : n_(n), cells_(n * n, fill) {}

  std::size_t num_states() const { return n_; }
  L& at(StateId s, StateId t) { return cells_.at(s * n_ + t); }
  const L& at(StateId s, StateId t) const { return cells_.at(s * n_ + t); }
  std::vector<L>& cells() { return cells_; }
  const std::vector<L>& cells() const { return cells_; }

 private:
  std::size_t n_;
  std::vector<L> cells_;
};

// --- Maximum-lead lattice -------------------------------------------------

enum class LeadPolicy {
  kOverapprox,   // leads beyond the cap are worth ∞
  kUnderapprox,  // leads beyond the cap are worth |δ|
};

/// The finite set of leads a lead table is defined on: every lead reachable
/// from 0 by adding step differences while staying within [−cap, cap].
class LeadDomain {
 public:
  /// Throws BudgetExceeded when more than `max_leads` leads are reachable.
  static std::shared_ptr<const LeadDomain> build(std::span<const Rational> differences,
                                                 const Rational& cap, LeadPolicy policy,
                                                 std::size_t max_leads);

  const Rational& cap() const { return cap_; }
  LeadPolicy policy() const { return policy_; }
  const std::vector<Rational>& leads() const { return leads_; }
  std::size_t size() const { return leads_.size(); }
  std::optional<std::size_t> index_of(const Rational& lead) const;

 private:
  Rational cap_;
  LeadPolicy policy_ = LeadPolicy::kOverapprox;
  std::vector<Rational> leads_;
  std::map<Rational, std::size_t> index_;
};

/// h(δ) for δ in a LeadDomain; out-of-cap leads follow the domain's policy.
class LeadTable {
 public:
  LeadTable(std::shared_ptr<const LeadDomain> domain, const ExtValue& fill);

  ExtValue at(const Rational& lead) const;
  const std::vector<ExtValue>& values() const { return values_; }
  std::vector<ExtValue>& values() { return values_; }
  const LeadDomain& domain() const { return *domain_; }
  const std::shared_ptr<const LeadDomain>& domain_ptr() const { return domain_; }

  friend bool operator==(const LeadTable& a, const LeadTable& b) {
    return a.values_ == b.values_;
  }

 private:
  std::shared_ptr<const LeadDomain> domain_;
  std::vector<ExtValue> values_;
};

/// Leads reachable in `sys` under label-compatible step differences.
std::shared_ptr<const LeadDomain> lead_domain_for(const WeightedTransitionSystem& sys,
                                                  const Rational& cap, LeadPolicy policy,
                                                  std::size_t max_leads = 100000);

// --- Iterators --------------------------------------------------------------

/// L = [0, ∞], g = id. Covers kDiscrete, kSup and kDiscountedSum:
///   discrete  F(x, y, z) = z if x ⊑ y, ∞ otherwise
///   sup       F(x, y, z) = max(d(x, y), z)
///   discounted F(x, y, z) = d(x, y) + λz
/// Throws UnsupportedMetric for the other accumulators.
IteratorSpec<ExtValue> scalar_iterator_for(const TraceMetric& m);

/// L = lead tables, g(h) = h(0), F(x, y, h)(δ) = max(|δ'|, h(δ')) with
/// δ' = δ + x − y; ∞ on label mismatch.
IteratorSpec<LeadTable> lead_iterator_for(const TraceMetric& m,
                                          std::shared_ptr<const LeadDomain> domain);

using AnyIteratorSpec = std::variant<IteratorSpec<ExtValue>, IteratorSpec<LeadTable>>;

/// Dispatches on the accumulator. The lead lattice depends on the system's
/// step differences, hence the extra arguments.
AnyIteratorSpec iterator_for(const TraceMetric& m, const WeightedTransitionSystem& sys,
                             const Rational& lead_cap = 8,
                             LeadPolicy policy = LeadPolicy::kOverapprox,
                             std::size_t max_leads = 100000);

// --- The iterator I and its least fixed point ------------------------------

/// I(h)(s, t) = sup_{s -x-> s'} inf_{t -y-> t'} F(x, y, h(s', t')).
/// Cells are computed independently from the snapshot `h`; `jobs` > 1
/// splits the cells across threads with identical results.
template <class L>
PairFunction<L> apply_I(const IteratorSpec<L>& spec, const WeightedTransitionSystem& sys,
                        const PairFunction<L>& h, unsigned jobs = 1) {
  const std::size_t n = sys.num_states();
  if (h.num_states() != n) throw std::invalid_argument("pair function has the wrong size");
  PairFunction<L> out(n, spec.lattice.bottom);

  auto cell = [&](std::size_t index) {
    const StateId s = index / n;
    const StateId t = index % n;
    std::optional<L> sup;
    for (TransitionId xi : sys.outgoing(s)) {
      const Transition& x = sys.transition(xi);
      std::optional<L> inf;
      for (TransitionId yi : sys.outgoing(t)) {
        const Transition& y = sys.transition(yi);
        L v = spec.step(x.weight, y.weight, h.at(x.target, y.target));
        inf = inf ? spec.lattice.meet(*inf, v) : std::move(v);
      }
      sup = sup ? spec.lattice.join(*sup, *inf) : std::move(*inf);
    }
    out.cells()[index] = std::move(*sup);
  };

  const std::size_t total = n * n;
  if (jobs <= 1 || total < 2) {
    for (std::size_t i = 0; i < total; ++i) cell(i);
    return out;
  }
  const std::size_t workers = std::min<std::size_t>(jobs, total);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < total; i += workers) cell(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

enum class FixpointStatus { kExact, kConverged, kMaxIter };

struct StopRule {
  /// Certified accuracy for contracting iterators.
  Rational epsilon = Rational(1, 1000000000);
  std::size_t max_iterations = 100000;
  /// When set, failing to stabilize within this many sweeps is a logic
  /// error (used for finite-height lattices).
  std::optional<std::size_t> termination_bound;
  unsigned jobs = 1;
};

template <class L>
struct KleeneResult {
  PairFunction<L> table;
  std::size_t iterations = 0;
  FixpointStatus status = FixpointStatus::kMaxIter;
  /// Sup-norm bound on h* − table (0 when exact, ∞ when unknown).
  ExtValue error_bound;
};

/// Kleene iteration h_{n+1} = I(h_n) from bottom (Jacobi sweeps).
/// kExact when h_{n+1} = h_n; kConverged when the iterator contracts with
/// factor λ and ‖h_{n+1} − h_n‖ ≤ ε(1 − λ)/λ, which certifies
/// ‖h* − h_{n+1}‖ ≤ ε; kMaxIter otherwise.
template <class L>
KleeneResult<L> kleene_lfp(
    const IteratorSpec<L>& spec, const WeightedTransitionSystem& sys, const StopRule& stop,
    const std::function<void(std::size_t, const PairFunction<L>&)>& on_sweep = nullptr) {
  const std::size_t n = sys.num_states();
  KleeneResult<L> result{PairFunction<L>(n, spec.lattice.bottom), 0, FixpointStatus::kMaxIter,
                         ExtValue::infinity()};
  if (on_sweep) on_sweep(0, result.table);
  while (result.iterations < stop.max_iterations) {
    PairFunction<L> next = apply_I(spec, sys, result.table, stop.jobs);
    ++result.iterations;
    if (on_sweep) on_sweep(result.iterations, next);

    bool same = true;
    for (std::size_t i = 0; i < next.cells().size() && same; ++i) {
      same = spec.lattice.equal(next.cells()[i], result.table.cells()[i]);
    }
    if (same) {
      result.table = std::move(next);
      result.status = FixpointStatus::kExact;
      result.error_bound = ExtValue();
      return result;
    }

    if (spec.contraction) {
      ExtValue widest;
      for (std::size_t i = 0; i < next.cells().size(); ++i) {
        widest = max(widest, spec.distance(result.table.cells()[i], next.cells()[i]));
      }
      const Rational& lambda = *spec.contraction;
      if (widest.is_finite() && widest.finite() * lambda <= stop.epsilon * (1 - lambda)) {
        result.table = std::move(next);
        result.status = FixpointStatus::kConverged;
        result.error_bound = widest.scaled(lambda / (1 - lambda));
        return result;
      }
    }
    result.table = std::move(next);
    if (stop.termination_bound && result.iterations > *stop.termination_bound) {
      throw std::logic_error("finite-height iteration exceeded its termination bound of " +
                             std::to_string(*stop.termination_bound) + " sweeps");
    }
  }
  return result;
}

// --- Branching distance -----------------------------------------------------

struct FixpointOptions {
  /// Lead cap for the maximum-lead lattice.
  Rational lead_cap = 8;
  std::size_t max_leads = 100000;
  Rational epsilon = Rational(1, 1000000000);
  std::size_t max_iterations = 100000;
  unsigned jobs = 1;
  /// For discounted metrics, try to certify the exact rational fixed point
  /// from the strategies read off the converged iterate.
  bool exact_discounted = true;
};

enum class DistanceStatus { kExact, kConverged, kBracket };

std::string_view to_string(DistanceStatus status);

/// lower ≤ d_B ≤ upper.
struct DistanceBracket {
  ExtValue lower;
  ExtValue upper;
  bool exact() const { return lower == upper; }
};

struct BranchingTable {
  std::size_t num_states = 0;
  std::vector<DistanceBracket> cells;
  std::size_t iterations = 0;
  DistanceStatus status = DistanceStatus::kExact;

  const DistanceBracket& at(StateId s, StateId t) const { return cells.at(s * num_states + t); }
};

struct BranchResult {
  DistanceBracket value;
  std::size_t iterations = 0;
  DistanceStatus status = DistanceStatus::kExact;
};

/// d_B = g ∘ h* for every state pair. Throws UnsupportedMetric for
/// limit-average and ConvergenceError when the sweep budget runs out.
BranchingTable branching_table(const WeightedTransitionSystem& sys, const TraceMetric& m,
                               const FixpointOptions& opts = {});

BranchResult branching_distance(const WeightedTransitionSystem& sys, const TraceMetric& m,
                                StateId s, StateId t, const FixpointOptions& opts = {});

/// Solves the discounted game exactly for the positional profile read off
/// `h` and returns the value table if it is the least fixed point of I.
std::optional<PairFunction<ExtValue>> certify_discounted(const TraceMetric& m,
                                                         const WeightedTransitionSystem& sys,
                                                         const PairFunction<ExtValue>& h);

// --- Discrete simulation ------------------------------------------------------

/// The greatest (extended, when `order` is given) simulation relation,
/// computed by removing violating pairs until none remain.
class SimulationRelation {
 public:
  explicit SimulationRelation(std::size_t n) : n_(n), related_(n * n, 1) {}
  bool contains(StateId s, StateId t) const { return related_.at(s * n_ + t) != 0; }
  void remove(StateId s, StateId t) { related_.at(s * n_ + t) = 0; }
  std::size_t num_states() const { return n_; }

 private:
  std::size_t n_;
  std::vector<char> related_;
};

SimulationRelation greatest_simulation(const WeightedTransitionSystem& sys,
                                       const LabelPreorder* order = nullptr);

/// True iff t simulates s.
bool discrete_simulation_check(const WeightedTransitionSystem& sys, StateId s, StateId t,
                               const LabelPreorder* order = nullptr);

}  // namespace wtsdist
