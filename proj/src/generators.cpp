#include "wtsdist/generators.hpp"

#include <random>
#include <set>

#include "wtsdist/errors.hpp"

namespace wtsdist {

namespace {

// Adds states name_0 .. name_{P+C-1} spelling `trace`, the last one looping
// back to the start of the cycle. Returns the entry state's name.
std::string add_chain(WtsBuilder& b, const std::string& name, const LassoTrace& trace) {
  const std::size_t p = trace.prefix().size();
  const std::size_t len = p + trace.cycle().size();
  auto state = [&](std::size_t i) { return name + "_" + std::to_string(i); };
  for (std::size_t i = 0; i < len; ++i) b.add_state(state(i));
  for (std::size_t i = 0; i < len; ++i) {
    b.add_transition(state(i), trace.at(i), state(i + 1 < len ? i + 1 : p));
  }
  return state(0);
}

void collect_labels(const LassoTrace& trace, std::set<std::string>& out) {
  for (const auto* part : {&trace.prefix(), &trace.cycle()}) {
    for (const auto& w : *part) {
      if (w.label) out.insert(*w.label);
    }
  }
}

}  // namespace

IneqSystem build_inequivalence(const IneqSpec& spec) {
  const LassoTrace& sigma = spec.sigma;
  const LassoTrace& tau = spec.tau;
  if (!(sigma.at(0) == tau.at(0))) {
    throw ValidationError("sigma and tau must share their first weight");
  }
  if (eval_exact(spec.metric, sigma, tau).is_zero()) {
    throw ValidationError("distance from sigma to tau must be positive");
  }
  if (eval_exact(spec.metric, tau, sigma).is_zero()) {
    throw ValidationError("distance from tau to sigma must be positive");
  }

  WtsBuilder b;
  std::set<std::string> labels;
  collect_labels(sigma, labels);
  collect_labels(tau, labels);
  if (!labels.empty()) b.set_alphabet({labels.begin(), labels.end()});

  for (const char* name : {"s", "t", "u", "v_sigma", "v_tau"}) b.add_state(name);
  const std::string sigma_tail = add_chain(b, "sigma", sigma.tail(2));
  const std::string tau_tail = add_chain(b, "tau", tau.tail(2));

  b.add_transition("s", sigma.at(0), "u");
  b.add_transition("u", sigma.at(1), sigma_tail);
  b.add_transition("u", tau.at(1), tau_tail);
  b.add_transition("t", sigma.at(0), "v_sigma");
  b.add_transition("t", tau.at(0), "v_tau");
  b.add_transition("v_sigma", sigma.at(1), sigma_tail);
  b.add_transition("v_tau", tau.at(1), tau_tail);

  IneqSystem out{b.build(), 0, 0};
  out.s = out.sys.state_id("s");
  out.t = out.sys.state_id("t");
  return out;
}

WeightedTransitionSystem random_wts(const RandomWtsOptions& opts) {
  if (opts.states < 1) throw std::invalid_argument("random system needs at least one state");
  if (opts.max_out < 1) throw std::invalid_argument("random system needs max_out >= 1");
  if (opts.denominator < 1) throw std::invalid_argument("weight denominator must be >= 1");
  if (opts.weight_max < opts.weight_min) throw std::invalid_argument("empty weight range");
  if (opts.alphabet_size > 26) throw std::invalid_argument("at most 26 labels");

  std::mt19937_64 rng(opts.seed);
  // Modulo keeps the stream identical across standard libraries.
  auto pick = [&rng](std::uint64_t n) { return rng() % n; };

  Rational steps_q = (opts.weight_max - opts.weight_min) * opts.denominator;
  const std::uint64_t grid = mpz_class(steps_q.get_num() / steps_q.get_den()).get_ui() + 1;

  WtsBuilder b;
  std::vector<std::string> alphabet;
  for (std::size_t i = 0; i < opts.alphabet_size; ++i) alphabet.emplace_back(1, char('a' + i));
  if (!alphabet.empty()) b.set_alphabet(alphabet);
  auto name = [](std::size_t i) { return "q" + std::to_string(i); };
  for (std::size_t i = 0; i < opts.states; ++i) b.add_state(name(i));

  for (std::size_t i = 0; i < opts.states; ++i) {
    const std::uint64_t out = 1 + pick(opts.max_out);
    for (std::uint64_t j = 0; j < out; ++j) {
      Weight w;
      if (!alphabet.empty()) w.label = alphabet[pick(alphabet.size())];
      w.value = opts.weight_min + Rational(static_cast<long>(pick(grid)),
                                           static_cast<long>(opts.denominator));
      w.value.canonicalize();
      b.add_transition(name(i), std::move(w), name(pick(opts.states)));
    }
  }
  return b.build();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<Weight> parse_items(std::string_view text) {
  std::vector<Weight> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    std::string_view item = trim(text.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
    if (item.empty()) throw ParseError("empty item in lasso literal");
    Weight w;
    if (const auto colon = item.rfind(':'); colon != std::string_view::npos) {
      std::string_view label = trim(item.substr(0, colon));
      if (label.empty()) throw ParseError("empty label in lasso literal");
      w.label = std::string(label);
      item = trim(item.substr(colon + 1));
    }
    w.value = parse_rational(item);
    out.push_back(std::move(w));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

LassoTrace parse_lasso_literal(std::string_view text) {
  const auto bar = text.find('|');
  if (bar == std::string_view::npos || text.find('|', bar + 1) != std::string_view::npos) {
    throw ParseError("lasso literal needs exactly one '|' between prefix and cycle");
  }
  std::vector<Weight> cycle = parse_items(text.substr(bar + 1));
  if (cycle.empty()) throw ParseError("lasso literal has an empty cycle");
  return LassoTrace(parse_items(text.substr(0, bar)), std::move(cycle));
}

std::string format_lasso_literal(const LassoTrace& trace) { return trace.to_string(); }

}  // namespace wtsdist
