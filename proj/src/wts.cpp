#include "wtsdist/wts.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "wtsdist/errors.hpp"

namespace wtsdist {

using nlohmann::json;

std::string Weight::to_string() const {
  std::string v = wtsdist::to_string(value);
  return label ? *label + ":" + v : v;
}

StateId WeightedTransitionSystem::state_id(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown state " + std::string(name));
  return it->second;
}

bool WeightedTransitionSystem::has_state(std::string_view name) const {
  return index_.find(name) != index_.end();
}

WtsBuilder& WtsBuilder::set_alphabet(std::vector<std::string> symbols) {
  alphabet_ = std::move(symbols);
  return *this;
}

WtsBuilder& WtsBuilder::add_state(std::string name) {
  states_.push_back(std::move(name));
  return *this;
}

WtsBuilder& WtsBuilder::add_transition(std::string from, Weight weight, std::string to) {
  transitions_.push_back({std::move(from), std::move(weight), std::move(to)});
  return *this;
}

WeightedTransitionSystem WtsBuilder::build() const {
  WeightedTransitionSystem sys;
  for (const auto& name : states_) {
    if (!sys.index_.emplace(name, sys.names_.size()).second) {
      throw ValidationError("duplicate state " + name);
    }
    sys.names_.push_back(name);
  }
  std::set<std::string, std::less<>> symbols;
  if (alphabet_) {
    for (const auto& a : *alphabet_) {
      if (!symbols.insert(a).second) throw ValidationError("duplicate symbol " + a);
    }
    sys.alphabet_ = *alphabet_;
  }

  std::optional<bool> any_labeled;
  std::set<std::tuple<StateId, Weight, StateId>> seen;
  sys.outgoing_.resize(sys.names_.size());
  for (const auto& t : transitions_) {
    auto from = sys.index_.find(t.from);
    if (from == sys.index_.end()) throw ValidationError("unknown state " + t.from);
    auto to = sys.index_.find(t.to);
    if (to == sys.index_.end()) throw ValidationError("unknown state " + t.to);

    bool labeled = t.weight.label.has_value();
    if (any_labeled && *any_labeled != labeled) {
      throw ValidationError("mixed labeled/unlabeled weights");
    }
    any_labeled = labeled;
    if (labeled) {
      if (!alphabet_) {
        throw ValidationError("label " + *t.weight.label + " outside alphabet");
      }
      if (!symbols.contains(*t.weight.label)) {
        throw ValidationError("label " + *t.weight.label + " outside alphabet");
      }
    } else if (alphabet_) {
      throw ValidationError("mixed labeled/unlabeled weights");
    }

    if (!seen.emplace(from->second, t.weight, to->second).second) continue;
    sys.outgoing_[from->second].push_back(sys.transitions_.size());
    sys.transitions_.push_back({from->second, t.weight, to->second});
  }

  for (StateId s = 0; s < sys.names_.size(); ++s) {
    if (sys.outgoing_[s].empty()) throw ValidationError("blocking state " + sys.names_[s]);
  }
  return sys;
}

namespace {

Rational weight_from_json(const json& w) {
  if (w.is_string()) return parse_rational(w.get<std::string>());
  if (w.is_number_integer()) {
    if (w.is_number_unsigned()) return Rational(mpz_class(std::to_string(w.get<std::uint64_t>())));
    return Rational(mpz_class(std::to_string(w.get<std::int64_t>())));
  }
  throw ParseError("weight must be a rational string or an integer");
}

const json& require(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string("missing key \"") + key + "\" in " + where);
  }
  return *it;
}

std::string require_string(const json& obj, const char* key, const char* where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw ParseError(std::string("\"") + key + "\" must be a string");
  return v.get<std::string>();
}

}  // namespace

WeightedTransitionSystem parse_wts(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ParseError("document must be a JSON object");

  WtsBuilder builder;
  if (auto it = doc.find("alphabet"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("\"alphabet\" must be an array");
    std::vector<std::string> symbols;
    for (const auto& a : *it) {
      if (!a.is_string()) throw ParseError("alphabet symbols must be strings");
      symbols.push_back(a.get<std::string>());
    }
    builder.set_alphabet(std::move(symbols));
  }

  const json& states = require(doc, "states", "document");
  if (!states.is_array()) throw ParseError("\"states\" must be an array");
  for (const auto& s : states) {
    if (!s.is_string()) throw ParseError("state identifiers must be strings");
    builder.add_state(s.get<std::string>());
  }

  const json& transitions = require(doc, "transitions", "document");
  if (!transitions.is_array()) throw ParseError("\"transitions\" must be an array");
  for (const auto& t : transitions) {
    if (!t.is_object()) throw ParseError("transition must be an object");
    Weight w(weight_from_json(require(t, "weight", "transition")));
    if (auto l = t.find("label"); l != t.end()) {
      if (!l->is_string()) throw ParseError("\"label\" must be a string");
      w.label = l->get<std::string>();
    }
    builder.add_transition(require_string(t, "from", "transition"), std::move(w),
                           require_string(t, "to", "transition"));
  }
  return builder.build();
}

std::string serialize_wts(const WeightedTransitionSystem& sys, int indent) {
  json doc = json::object();
  if (sys.alphabet()) doc["alphabet"] = *sys.alphabet();
  json states = json::array();
  for (StateId s = 0; s < sys.num_states(); ++s) states.push_back(sys.state_name(s));
  doc["states"] = std::move(states);
  json transitions = json::array();
  for (const auto& t : sys.transitions()) {
    json item = {{"from", sys.state_name(t.source)},
                 {"weight", to_string(t.weight.value)},
                 {"to", sys.state_name(t.target)}};
    if (t.weight.label) item["label"] = *t.weight.label;
    transitions.push_back(std::move(item));
  }
  doc["transitions"] = std::move(transitions);
  return doc.dump(indent);
}

StateId FinitePath::last(const WeightedTransitionSystem& sys) const {
  return steps.empty() ? start : sys.transition(steps.back()).target;
}

std::vector<Weight> FinitePath::trace(const WeightedTransitionSystem& sys) const {
  std::vector<Weight> out;
  out.reserve(steps.size());
  for (TransitionId id : steps) out.push_back(sys.transition(id).weight);
  return out;
}

void FinitePath::validate(const WeightedTransitionSystem& sys) const {
  if (start >= sys.num_states()) throw ValidationError("path starts at unknown state");
  StateId at = start;
  for (TransitionId id : steps) {
    if (id >= sys.num_transitions()) throw ValidationError("path uses unknown transition");
    const auto& t = sys.transition(id);
    if (t.source != at) {
      throw ValidationError("path broken at state " + sys.state_name(at));
    }
    at = t.target;
  }
}

void LassoPath::validate(const WeightedTransitionSystem& sys) const {
  prefix.validate(sys);
  if (cycle.empty()) throw ValidationError("lasso cycle is empty");
  StateId anchor = prefix.last(sys);
  FinitePath loop{anchor, cycle};
  loop.validate(sys);
  if (loop.last(sys) != anchor) throw ValidationError("lasso cycle does not close");
}

LassoPath LassoPath::normalized() const {
  LassoPath out = *this;
  detail::normalize_lasso(out.prefix.steps, out.cycle);
  return out;
}

TransitionId LassoPath::step(std::size_t j) const {
  if (j < prefix.steps.size()) return prefix.steps[j];
  return cycle[(j - prefix.steps.size()) % cycle.size()];
}

LassoTrace::LassoTrace(std::vector<Weight> prefix, std::vector<Weight> cycle)
    : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
  if (cycle_.empty()) throw std::invalid_argument("lasso cycle must be nonempty");
  detail::normalize_lasso(prefix_, cycle_);
}

LassoTrace LassoTrace::unnormalized(std::vector<Weight> prefix, std::vector<Weight> cycle) {
  if (cycle.empty()) throw std::invalid_argument("lasso cycle must be nonempty");
  LassoTrace t;
  t.prefix_ = std::move(prefix);
  t.cycle_ = std::move(cycle);
  return t;
}

const Weight& LassoTrace::at(std::size_t j) const {
  if (j < prefix_.size()) return prefix_[j];
  return cycle_[(j - prefix_.size()) % cycle_.size()];
}

LassoTrace LassoTrace::tail(std::size_t j) const {
  if (j <= prefix_.size()) {
    return LassoTrace(std::vector<Weight>(prefix_.begin() + static_cast<std::ptrdiff_t>(j), prefix_.end()),
                      cycle_);
  }
  std::size_t shift = (j - prefix_.size()) % cycle_.size();
  std::vector<Weight> rotated(cycle_.begin() + static_cast<std::ptrdiff_t>(shift), cycle_.end());
  rotated.insert(rotated.end(), cycle_.begin(), cycle_.begin() + static_cast<std::ptrdiff_t>(shift));
  return LassoTrace({}, std::move(rotated));
}

std::vector<Weight> LassoTrace::unroll(std::size_t n) const {
  std::vector<Weight> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) out.push_back(at(j));
  return out;
}

LassoTrace LassoTrace::normalized() const { return LassoTrace(prefix_, cycle_); }

bool LassoTrace::labeled() const { return cycle_.front().label.has_value(); }

std::string LassoTrace::to_string() const {
  auto join = [](const std::vector<Weight>& ws) {
    std::string out;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      if (i) out += ", ";
      out += ws[i].to_string();
    }
    return out;
  };
  std::string p = join(prefix_);
  return (p.empty() ? "" : p + " ") + "| " + join(cycle_);
}

bool operator==(const LassoTrace& a, const LassoTrace& b) {
  LassoTrace na = a.normalized();
  LassoTrace nb = b.normalized();
  return na.prefix_ == nb.prefix_ && na.cycle_ == nb.cycle_;
}

LassoTrace trace_of_lasso_path(const WeightedTransitionSystem& sys, const LassoPath& path) {
  path.validate(sys);
  std::vector<Weight> prefix = path.prefix.trace(sys);
  std::vector<Weight> cycle;
  cycle.reserve(path.cycle.size());
  for (TransitionId id : path.cycle) cycle.push_back(sys.transition(id).weight);
  return LassoTrace(std::move(prefix), std::move(cycle));
}

std::pair<LassoTrace, LassoTrace> align(const LassoTrace& a, const LassoTrace& b) {
  const std::size_t p = std::max(a.prefix().size(), b.prefix().size());
  const std::size_t c = std::lcm(a.cycle().size(), b.cycle().size());
  auto reshape = [&](const LassoTrace& t) {
    std::vector<Weight> prefix = t.unroll(p);
    std::vector<Weight> cycle;
    cycle.reserve(c);
    for (std::size_t j = 0; j < c; ++j) cycle.push_back(t.at(p + j));
    return LassoTrace::unnormalized(std::move(prefix), std::move(cycle));
  };
  return {reshape(a), reshape(b)};
}

std::vector<LassoPath> enumerate_lassos(const WeightedTransitionSystem& sys, StateId s,
                                        std::size_t max_prefix, std::size_t max_cycle) {
  if (s >= sys.num_states()) throw ValidationError("unknown state");
  if (max_cycle == 0) return {};

  std::set<LassoPath> found;
  // Depth-first over all paths of length ≤ max_prefix + max_cycle; every
  // split point that closes a loop of admissible length yields a lasso.
  std::vector<TransitionId> path;
  std::vector<StateId> visited{s};
  const std::size_t max_len = max_prefix + max_cycle;
  auto dfs = [&](auto&& self) -> void {
    const std::size_t len = path.size();
    const StateId here = visited.back();
    for (std::size_t split = len > max_cycle ? len - max_cycle : 0;
         split < len && split <= max_prefix; ++split) {
      if (visited[split] != here) continue;
      LassoPath lasso{{s, {path.begin(), path.begin() + static_cast<std::ptrdiff_t>(split)}},
                      {path.begin() + static_cast<std::ptrdiff_t>(split), path.end()}};
      found.insert(lasso.normalized());
    }
    if (len == max_len) return;
    for (TransitionId id : sys.outgoing(here)) {
      path.push_back(id);
      visited.push_back(sys.transition(id).target);
      self(self);
      path.pop_back();
      visited.pop_back();
    }
  };
  dfs(dfs);
  return {found.begin(), found.end()};
}

}  // namespace wtsdist
