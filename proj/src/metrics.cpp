#include "wtsdist/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "wtsdist/errors.hpp"

namespace wtsdist {

LabelPreorder::LabelPreorder(std::vector<std::pair<std::string, std::string>> generators) {
  for (auto& [a, b] : generators) {
    if (a != b) pairs_.emplace(std::move(a), std::move(b));
  }
  // Warshall-style closure over the finite symbol set.
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<std::string, std::string>> added;
    for (const auto& [a, b] : pairs_) {
      for (auto it = pairs_.lower_bound({b, std::string()}); it != pairs_.end() && it->first == b;
           ++it) {
        if (a != it->second && !pairs_.contains({a, it->second})) added.emplace_back(a, it->second);
      }
    }
    for (auto& p : added) changed |= pairs_.insert(std::move(p)).second;
  }
}

LabelPreorder LabelPreorder::parse(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> gens;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string_view item = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      std::size_t sep = item.find_first_of("<:");
      if (sep == std::string_view::npos || sep == 0 || sep + 1 == item.size()) {
        throw ParseError("malformed preorder pair \"" + std::string(item) + "\"");
      }
      gens.emplace_back(std::string(item.substr(0, sep)), std::string(item.substr(sep + 1)));
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return LabelPreorder(std::move(gens));
}

bool LabelPreorder::leq(const std::string& a, const std::string& b) const {
  return a == b || pairs_.contains({a, b});
}

bool LabelPreorder::leq(const Weight& x, const Weight& y) const {
  if (x.value != y.value) return false;
  if (x.label && y.label) return leq(*x.label, *y.label);
  return x.label == y.label;
}

GroundMetric GroundMetric::hamming() {
  GroundMetric g;
  g.kind_ = Kind::kHamming;
  g.name_ = "hamming";
  return g;
}

GroundMetric GroundMetric::preorder(std::shared_ptr<const LabelPreorder> order) {
  GroundMetric g;
  g.kind_ = Kind::kPreorder;
  g.name_ = order ? "preorder" : "equality";
  g.order_ = std::move(order);
  return g;
}

GroundMetric GroundMetric::labelled_abs() {
  GroundMetric g;
  g.kind_ = Kind::kLabelledAbs;
  g.name_ = "abs";
  return g;
}

GroundMetric GroundMetric::custom(std::string name,
                                  std::function<ExtValue(const Weight&, const Weight&)> eval) {
  GroundMetric g;
  g.kind_ = Kind::kCustom;
  g.name_ = std::move(name);
  g.custom_ = std::move(eval);
  return g;
}

ExtValue GroundMetric::operator()(const Weight& x, const Weight& y) const {
  if (x.label.has_value() != y.label.has_value()) {
    throw MetricError("cannot compare labeled and unlabeled weights");
  }
  switch (kind_) {
    case Kind::kHamming:
      return x == y ? ExtValue(0) : ExtValue(1);
    case Kind::kPreorder: {
      bool related = order_ ? order_->leq(x, y) : x == y;
      return related ? ExtValue(0) : ExtValue::infinity();
    }
    case Kind::kLabelledAbs:
      if (!same_label(x, y)) return ExtValue::infinity();
      return ExtValue(Rational(abs(x.value - y.value)));
    case Kind::kCustom:
      return custom_(x, y);
  }
  throw std::logic_error("unreachable ground kind");
}

std::string_view to_string(Accumulator acc) {
  switch (acc) {
    case Accumulator::kDiscrete: return "DISCRETE";
    case Accumulator::kSup: return "SUP";
    case Accumulator::kDiscountedSum: return "DISCOUNTED_SUM";
    case Accumulator::kLimAvg: return "LIMAVG";
    case Accumulator::kMaxLead: return "MAXLEAD";
  }
  return "?";
}

TraceMetric::TraceMetric(std::string name, Accumulator acc, GroundMetric ground,
                         std::optional<Rational> discount)
    : name_(std::move(name)), acc_(acc), ground_(std::move(ground)), discount_(std::move(discount)) {
  if ((acc_ == Accumulator::kDiscountedSum) != discount_.has_value()) {
    throw std::invalid_argument("a discount is required exactly for discounted sums");
  }
  if (discount_ && (*discount_ < 0 || *discount_ >= 1)) {
    throw std::invalid_argument("discount must lie in [0, 1), got " + to_string(*discount_));
  }
}

TraceMetric TraceMetric::discrete() {
  return {"discrete", Accumulator::kDiscrete, GroundMetric::preorder()};
}

TraceMetric TraceMetric::discrete_preorder(std::shared_ptr<const LabelPreorder> order) {
  if (!order) order = std::make_shared<LabelPreorder>();
  return {"discrete-pre", Accumulator::kDiscrete, GroundMetric::preorder(std::move(order))};
}

TraceMetric TraceMetric::hamming_limavg() {
  return {"hamming-davg", Accumulator::kLimAvg, GroundMetric::hamming()};
}

TraceMetric TraceMetric::hamming_discounted(const Rational& lambda) {
  return {"hamming-disc", Accumulator::kDiscountedSum, GroundMetric::hamming(), lambda};
}

TraceMetric TraceMetric::pointwise() {
  return {"pointwise", Accumulator::kSup, GroundMetric::labelled_abs()};
}

TraceMetric TraceMetric::accumulated_discounted(const Rational& lambda) {
  return {"acc-disc", Accumulator::kDiscountedSum, GroundMetric::labelled_abs(), lambda};
}

TraceMetric TraceMetric::accumulated_limavg() {
  return {"acc-lavg", Accumulator::kLimAvg, GroundMetric::labelled_abs()};
}

TraceMetric TraceMetric::max_lead() {
  return {"maxlead", Accumulator::kMaxLead, GroundMetric::labelled_abs()};
}

TraceMetric TraceMetric::parse(std::string_view descriptor,
                               std::shared_ptr<const LabelPreorder> order) {
  std::string_view head = descriptor;
  std::optional<Rational> lambda;
  if (auto colon = descriptor.find(':'); colon != std::string_view::npos) {
    head = descriptor.substr(0, colon);
    lambda = parse_rational(descriptor.substr(colon + 1));
    if (*lambda < 0 || *lambda >= 1) {
      throw ParseError("discount must lie in [0, 1) in \"" + std::string(descriptor) + "\"");
    }
  }
  auto no_lambda = [&] {
    if (lambda) throw ParseError("metric \"" + std::string(head) + "\" takes no discount");
  };
  auto need_lambda = [&] {
    if (!lambda) throw ParseError("metric \"" + std::string(head) + "\" needs a discount, e.g. " +
                                  std::string(head) + ":1/2");
  };
  if (head == "discrete") { no_lambda(); return discrete(); }
  if (head == "discrete-pre") { no_lambda(); return discrete_preorder(std::move(order)); }
  if (head == "hamming-davg" || head == "hamming-lavg") { no_lambda(); return hamming_limavg(); }
  if (head == "hamming-disc") { need_lambda(); return hamming_discounted(*lambda); }
  if (head == "pointwise") { no_lambda(); return pointwise(); }
  if (head == "acc-disc") { need_lambda(); return accumulated_discounted(*lambda); }
  if (head == "acc-lavg") { no_lambda(); return accumulated_limavg(); }
  if (head == "maxlead") { no_lambda(); return max_lead(); }
  throw ParseError("unknown metric \"" + std::string(descriptor) + "\"");
}

const Rational& TraceMetric::lambda() const {
  if (!discount_) throw std::logic_error("metric " + name_ + " has no discount");
  return *discount_;
}

std::string TraceMetric::descriptor() const {
  return discount_ ? name_ + ":" + to_string(*discount_) : name_;
}

namespace {

void require_uniform_labels(std::span<const Weight> a, std::span<const Weight> b) {
  if (a.empty() && b.empty()) return;
  bool labeled = (a.empty() ? b : a).front().label.has_value();
  for (auto seq : {a, b}) {
    for (const auto& w : seq) {
      if (w.label.has_value() != labeled) {
        throw MetricError("traces mix labeled and unlabeled weights");
      }
    }
  }
}

// Per-index ground distances d_0 .. d_{n-1}.
std::vector<ExtValue> ground_sequence(const TraceMetric& m, std::span<const Weight> a,
                                      std::span<const Weight> b, std::size_t n) {
  std::vector<ExtValue> d;
  d.reserve(n);
  for (std::size_t j = 0; j < n; ++j) d.push_back(m.step(a[j], b[j]));
  return d;
}

}  // namespace

ExtValue eval_exact(const TraceMetric& m, const LassoTrace& a, const LassoTrace& b) {
  auto [x, y] = align(a, b);
  const std::size_t p = x.prefix().size();
  const std::size_t c = x.cycle().size();
  std::vector<Weight> xs = x.unroll(p + c);
  std::vector<Weight> ys = y.unroll(p + c);
  require_uniform_labels(xs, ys);

  switch (m.accumulator()) {
    case Accumulator::kDiscrete:
    case Accumulator::kSup: {
      ExtValue best;
      for (const auto& d : ground_sequence(m, xs, ys, p + c)) best = max(best, d);
      return best;
    }
    case Accumulator::kDiscountedSum: {
      const Rational& lambda = m.lambda();
      auto d = ground_sequence(m, xs, ys, p + c);
      ExtValue head;
      Rational factor = 1;
      for (std::size_t j = 0; j < p; ++j) {
        head = head + d[j].scaled(factor);
        factor *= lambda;
      }
      ExtValue period;
      Rational inner = 1;
      for (std::size_t i = 0; i < c; ++i) {
        period = period + d[p + i].scaled(inner);
        inner *= lambda;
      }
      // λ^P · period / (1 − λ^C)
      Rational scale = factor / (1 - inner);
      return head + period.scaled(scale);
    }
    case Accumulator::kLimAvg: {
      auto d = ground_sequence(m, xs, ys, p + c);
      ExtValue sum;
      for (std::size_t i = 0; i < c; ++i) sum = sum + d[p + i];
      return sum.scaled(Rational(1, static_cast<unsigned long>(c)));
    }
    case Accumulator::kMaxLead: {
      for (std::size_t j = 0; j < p + c; ++j) {
        if (!same_label(xs[j], ys[j])) return ExtValue::infinity();
      }
      Rational drift = 0;
      for (std::size_t i = 0; i < c; ++i) drift += xs[p + i].value - ys[p + i].value;
      if (drift != 0) return ExtValue::infinity();
      Rational lead = 0;
      Rational best = 0;
      for (std::size_t j = 0; j < p + c; ++j) {
        lead += xs[j].value - ys[j].value;
        if (abs(lead) > best) best = abs(lead);
      }
      return ExtValue(best);
    }
  }
  throw std::logic_error("unreachable accumulator");
}

ExtValue eval_truncated(const TraceMetric& m, std::span<const Weight> a, std::span<const Weight> b,
                        std::size_t k) {
  if (a.size() < k || b.size() < k) {
    throw MetricError("sequences shorter than truncation depth " + std::to_string(k));
  }
  a = a.first(k);
  b = b.first(k);
  require_uniform_labels(a, b);

  switch (m.accumulator()) {
    case Accumulator::kDiscrete:
    case Accumulator::kSup: {
      ExtValue best;
      for (std::size_t j = 0; j < k; ++j) best = max(best, m.step(a[j], b[j]));
      return best;
    }
    case Accumulator::kDiscountedSum: {
      ExtValue sum;
      Rational factor = 1;
      for (std::size_t j = 0; j < k; ++j) {
        sum = sum + m.step(a[j], b[j]).scaled(factor);
        factor *= m.lambda();
      }
      return sum;
    }
    case Accumulator::kLimAvg: {
      if (k == 0) return ExtValue();
      ExtValue sum;
      for (std::size_t j = 0; j < k; ++j) sum = sum + m.step(a[j], b[j]);
      return sum.scaled(Rational(1, static_cast<unsigned long>(k)));
    }
    case Accumulator::kMaxLead: {
      Rational lead = 0;
      Rational best = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if (!same_label(a[j], b[j])) return ExtValue::infinity();
        lead += a[j].value - b[j].value;
        if (abs(lead) > best) best = abs(lead);
      }
      return ExtValue(best);
    }
  }
  throw std::logic_error("unreachable accumulator");
}

bool is_one_step_discriminating_witness(const TraceMetric& m, const LassoTrace& a,
                                        const LassoTrace& b) {
  if (!(a.at(0) == b.at(0))) return false;
  return !eval_exact(m, a, b).is_zero() && !eval_exact(m, b, a).is_zero();
}

}  // namespace wtsdist
