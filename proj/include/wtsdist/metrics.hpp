#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wtsdist/ext_value.hpp"
#include "wtsdist/rational.hpp"
#include "wtsdist/wts.hpp"

namespace wtsdist {

/// A reflexive-transitive relation ⊑ over label symbols. Built from
/// generating pairs; the closure is taken on construction.
class LabelPreorder {
 public:
  LabelPreorder() = default;
  explicit LabelPreorder(std::vector<std::pair<std::string, std::string>> generators);

  /// Parses "a<b,b<c" (also accepts "a:b" pairs).
  static LabelPreorder parse(std::string_view text);

  bool leq(const std::string& a, const std::string& b) const;
  /// x ⊑ y on weights: labels related by the preorder, equal values.
  /// Unlabeled weights are related iff equal.
  bool leq(const Weight& x, const Weight& y) const;

  const std::set<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

 private:
  std::set<std::pair<std::string, std::string>> pairs_;  // strict part of the closure
};

/// A (hemi)metric d on K.
class GroundMetric {
 public:
  enum class Kind {
    kHamming,       // 0 if x = y, else 1
    kPreorder,      // 0 if x ⊑ y (or x = y without preorder), else ∞
    kLabelledAbs,   // |x^w − y^w| if labels agree, else ∞
    kCustom,
  };

  static GroundMetric hamming();
  static GroundMetric preorder(std::shared_ptr<const LabelPreorder> order = nullptr);
  static GroundMetric labelled_abs();
  static GroundMetric custom(std::string name,
                             std::function<ExtValue(const Weight&, const Weight&)> eval);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const LabelPreorder* order() const { return order_.get(); }

  ExtValue operator()(const Weight& x, const Weight& y) const;

 private:
  Kind kind_ = Kind::kHamming;
  std::string name_;
  std::shared_ptr<const LabelPreorder> order_;
  std::function<ExtValue(const Weight&, const Weight&)> custom_;
};

enum class Accumulator { kDiscrete, kSup, kDiscountedSum, kLimAvg, kMaxLead };

std::string_view to_string(Accumulator acc);

/// A hemimetric on infinite traces, assembled from an accumulator and a
/// ground metric. The discount is present iff the accumulator is
/// kDiscountedSum and lies in [0, 1).
class TraceMetric {
 public:
  TraceMetric(std::string name, Accumulator acc, GroundMetric ground,
              std::optional<Rational> discount = std::nullopt);

  static TraceMetric discrete();
  static TraceMetric discrete_preorder(std::shared_ptr<const LabelPreorder> order);
  static TraceMetric hamming_limavg();
  static TraceMetric hamming_discounted(const Rational& lambda);
  static TraceMetric pointwise();
  static TraceMetric accumulated_discounted(const Rational& lambda);
  static TraceMetric accumulated_limavg();
  static TraceMetric max_lead();

  /// Descriptor strings: discrete, discrete-pre, hamming-davg (alias
  /// hamming-lavg), hamming-disc:λ, pointwise, acc-disc:λ, acc-lavg, maxlead.
  /// `discrete-pre` uses `order` (identity preorder when null).
  static TraceMetric parse(std::string_view descriptor,
                           std::shared_ptr<const LabelPreorder> order = nullptr);

  const std::string& name() const { return name_; }
  Accumulator accumulator() const { return acc_; }
  const GroundMetric& ground() const { return ground_; }
  const std::optional<Rational>& discount() const { return discount_; }
  /// The discount; throws if the metric has none.
  const Rational& lambda() const;

  /// Canonical descriptor, parseable by parse().
  std::string descriptor() const;

  /// Step distance used by the accumulator. For kDiscrete this is the 0/∞
  /// preorder ground; for kMaxLead it is unused.
  ExtValue step(const Weight& x, const Weight& y) const { return ground_(x, y); }

 private:
  std::string name_;
  Accumulator acc_;
  GroundMetric ground_;
  std::optional<Rational> discount_;
};

/// True iff labels agree (both absent or both equal).
inline bool same_label(const Weight& x, const Weight& y) { return x.label == y.label; }

/// Exact d_T(a, b) on the unrolled traces.
ExtValue eval_exact(const TraceMetric& m, const LassoTrace& a, const LassoTrace& b);

/// The metric's formula restricted to the first k indices.
ExtValue eval_truncated(const TraceMetric& m, std::span<const Weight> a,
                        std::span<const Weight> b, std::size_t k);

/// True iff a_0 = b_0 and both directed distances are positive, i.e. the pair
/// shows that m is not one-step indiscriminate.
bool is_one_step_discriminating_witness(const TraceMetric& m, const LassoTrace& a,
                                        const LassoTrace& b);

}  // namespace wtsdist
