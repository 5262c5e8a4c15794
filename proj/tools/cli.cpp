#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wtsdist/errors.hpp"
#include "wtsdist/fixpoint.hpp"
#include "wtsdist/game.hpp"
#include "wtsdist/generators.hpp"
#include "wtsdist/linear.hpp"
#include "wtsdist/metrics.hpp"
#include "wtsdist/wts.hpp"

namespace wtsdist::cli {

namespace {

using Record = nlohmann::ordered_json;

struct Common {
  std::string format = "json";
  std::string metric = "discrete";
  std::string preorder;
  std::string from;
  std::string to;
  std::string file;
  bool timing = false;
};

class Emitter {
 public:
  Emitter(std::ostream& out, const std::string& format) : out_(out), table_(format == "table") {}

  void emit(const Record& r) {
    if (!table_) {
      out_ << r.dump() << '\n';
      return;
    }
    for (const auto& [key, value] : r.items()) {
      out_ << key << std::string(key.size() < 12 ? 12 - key.size() : 1, ' ')
           << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
  bool table_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TraceMetric metric_of(const Common& c) {
  std::shared_ptr<const LabelPreorder> order;
  if (!c.preorder.empty()) order = std::make_shared<LabelPreorder>(LabelPreorder::parse(c.preorder));
  return TraceMetric::parse(c.metric, order);
}

// Parses "depth=k".
std::size_t oracle_depth(const std::string& spec) {
  constexpr std::string_view kKey = "depth=";
  if (spec.rfind(kKey, 0) != 0) throw ParseError("--oracle expects depth=k, got \"" + spec + "\"");
  try {
    std::size_t used = 0;
    const unsigned long k = std::stoul(spec.substr(kKey.size()), &used);
    if (used != spec.size() - kKey.size()) throw std::invalid_argument(spec);
    return k;
  } catch (const std::exception&) {
    throw ParseError("--oracle expects depth=k, got \"" + spec + "\"");
  }
}

void put_bracket(Record& r, const ExtValue& lower, const ExtValue& upper) {
  if (lower == upper) {
    r["value"] = lower.to_string();
  } else {
    r["lower"] = lower.to_string();
    r["upper"] = upper.to_string();
  }
}

using Clock = std::chrono::steady_clock;

void put_timing(Record& r, const Common& c, Clock::time_point start) {
  if (!c.timing) return;
  r["wall_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void add_common(CLI::App* sub, Common& c, bool metric, bool pair, bool file) {
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "table"}));
  sub->add_flag("--timing", c.timing, "Include wall time in records");
  if (metric) {
    sub->add_option("--metric", c.metric, "Trace metric descriptor");
    sub->add_option("--preorder", c.preorder, "Label preorder for discrete-pre, e.g. \"a<b\"");
  }
  if (pair) {
    sub->add_option("--from", c.from, "Player 1 state")->required();
    sub->add_option("--to", c.to, "Player 2 state")->required();
  }
  if (file) sub->add_option("file", c.file, "System file (JSON)")->required();
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  int validate();
  int branch();
  int linear();
  int oracle();
  int gen_ineq();
  int gen_random();
  int compare();

  Record base(const std::string& command) const {
    Record r;
    r["command"] = command;
    return r;
  }

  std::ostream& out_;
  std::ostream& err_;
  Common c_;
  std::string command_;

  unsigned jobs_ = 1;
  std::string cap_ = "8";
  std::string eps_ = "1/1000000000";
  std::size_t max_iter_ = 100000;
  std::string oracle_;
  bool blind_ = false;
  std::size_t depth_ = 0;
  std::string lasso_;
  bool antichain_ = false;

  std::string sigma_;
  std::string tau_;
  RandomWtsOptions random_;
  std::string wmin_ = "0";
  std::string wmax_ = "2";

  std::size_t systems_ = 20;
  std::vector<std::string> metrics_{"discrete", "pointwise", "acc-disc:1/2"};
};

int Runner::run(const std::vector<std::string>& args) {
  CLI::App app{"Linear and branching distances on weighted transition systems", "wtsdist"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "Parse and check a system file");
  add_common(validate, c_, false, false, true);

  auto* branch = app.add_subcommand("branch", "Branching distance by fixed-point iteration");
  add_common(branch, c_, true, true, true);
  branch->add_option("--cap", cap_, "Lead cap for maxlead");
  branch->add_option("--eps", eps_, "Accuracy for discounted iteration");
  branch->add_option("--max-iter", max_iter_, "Sweep budget");
  branch->add_option("--jobs", jobs_, "Worker threads per sweep")->check(CLI::PositiveNumber);
  branch->add_option("--oracle", oracle_, "Use the depth-k game oracle instead (depth=k)");

  auto* linear = app.add_subcommand("linear", "Linear distance: exact decision or bounds");
  add_common(linear, c_, true, true, true);
  auto* depth_opt = linear->add_option("--depth", depth_, "Blind-game depth k");
  linear->add_option("--lasso", lasso_, "Lasso enumeration bounds p,c")->excludes(depth_opt);
  linear->add_flag("--antichain", antichain_, "Antichain pruning in the subset construction");

  auto* oracle = app.add_subcommand("oracle", "Depth-k value of the simulation game");
  add_common(oracle, c_, true, true, true);
  oracle->add_option("--oracle", oracle_, "depth=k")->required();
  oracle->add_flag("--blind", blind_, "Blind Player 1 (linear game)");

  auto* gen = app.add_subcommand("gen", "Generate systems");
  gen->require_subcommand(1);
  auto* ineq = gen->add_subcommand("ineq", "Topological inequivalence witness");
  add_common(ineq, c_, true, false, false);
  ineq->add_option("--sigma", sigma_, "Lasso literal, e.g. \"a:0 | a:1\"")->required();
  ineq->add_option("--tau", tau_, "Lasso literal")->required();
  auto* random = gen->add_subcommand("random", "Random system");
  add_common(random, c_, false, false, false);
  random->add_option("--states", random_.states, "Number of states");
  random->add_option("--seed", random_.seed, "Seed");
  random->add_option("--max-out", random_.max_out, "Maximum out-degree");
  random->add_option("--alphabet", random_.alphabet_size, "Alphabet size (0 = unlabeled)");
  random->add_option("--wmin", wmin_, "Smallest weight");
  random->add_option("--wmax", wmax_, "Largest weight");
  random->add_option("--denom", random_.denominator, "Weight grid denominator");

  auto* compare = app.add_subcommand("compare", "Check d_L <= d_B and triangles on random systems");
  add_common(compare, c_, false, false, false);
  compare->add_option("--metric", metrics_, "Metric descriptors");
  compare->add_option("--systems", systems_, "Number of random systems");
  compare->add_option("--states", random_.states, "States per system");
  compare->add_option("--max-out", random_.max_out, "Maximum out-degree");
  compare->add_option("--alphabet", random_.alphabet_size, "Alphabet size");
  compare->add_option("--seed", random_.seed, "First seed");
  compare->add_option("--depth", depth_, "Blind-game depth for the linear lower bound");
  compare->add_option("--jobs", jobs_, "Worker threads per sweep")->check(CLI::PositiveNumber);

  // CLI11 wants a mutable argv.
  std::vector<std::string> copy = args;
  if (copy.empty()) copy.emplace_back("wtsdist");
  std::vector<char*> argv;
  for (auto& a : copy) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, err_, err_);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, err_, err_);
  } catch (const CLI::ParseError& e) {
    Emitter(out_, c_.format).emit({{"command", copy.size() > 1 ? copy[1] : ""},
                                   {"status", "ERROR"},
                                   {"message", e.what()}});
    return kInputError;
  }

  auto dispatch = [&]() -> int {
    if (*validate) return command_ = "validate", this->validate();
    if (*branch) return command_ = "branch", this->branch();
    if (*linear) return command_ = "linear", this->linear();
    if (*oracle) return command_ = "oracle", this->oracle();
    if (*ineq) return command_ = "gen ineq", gen_ineq();
    if (*random) return command_ = "gen random", gen_random();
    if (*compare) return command_ = "compare", this->compare();
    return kInputError;
  };

  auto fail = [&](const std::exception& e, int code) {
    Record r = base(command_);
    r["status"] = "ERROR";
    r["message"] = e.what();
    Emitter(out_, c_.format).emit(r);
    return code;
  };

  try {
    return dispatch();
  } catch (const BudgetExceeded& e) {
    return fail(e, kNoConvergence);
  } catch (const ConvergenceError& e) {
    return fail(e, kNoConvergence);
  } catch (const Error& e) {
    return fail(e, kInputError);
  } catch (const std::invalid_argument& e) {
    return fail(e, kInputError);
  }
}

int Runner::validate() {
  const auto start = Clock::now();
  WeightedTransitionSystem sys = parse_wts(read_file(c_.file));
  Record r = base(command_);
  r["file"] = c_.file;
  r["status"] = "OK";
  r["states"] = sys.num_states();
  r["transitions"] = sys.num_transitions();
  r["labeled"] = sys.labeled();
  put_timing(r, c_, start);
  Emitter(out_, c_.format).emit(r);
  return kOk;
}

int Runner::branch() {
  const auto start = Clock::now();
  WeightedTransitionSystem sys = parse_wts(read_file(c_.file));
  const TraceMetric m = metric_of(c_);
  const StateId s = sys.state_id(c_.from);
  const StateId t = sys.state_id(c_.to);

  Record r = base(command_);
  r["metric"] = m.descriptor();
  r["from"] = c_.from;
  r["to"] = c_.to;
  if (!oracle_.empty()) {
    const std::size_t k = oracle_depth(oracle_);
    r["value"] = bounded_value(sys, s, t, m, k).to_string();
    r["status"] = "EXACT";
    r["depth"] = k;
  } else {
    FixpointOptions opts;
    opts.lead_cap = parse_rational(cap_);
    opts.epsilon = parse_rational(eps_);
    opts.max_iterations = max_iter_;
    opts.jobs = jobs_;
    if (opts.epsilon <= 0) throw std::invalid_argument("--eps must be positive");
    BranchResult res = branching_distance(sys, m, s, t, opts);
    put_bracket(r, res.value.lower, res.value.upper);
    r["status"] = std::string(to_string(res.status));
    r["iterations"] = res.iterations;
  }
  put_timing(r, c_, start);
  Emitter(out_, c_.format).emit(r);
  return kOk;
}

int Runner::linear() {
  const auto start = Clock::now();
  WeightedTransitionSystem sys = parse_wts(read_file(c_.file));
  const TraceMetric m = metric_of(c_);
  const StateId s = sys.state_id(c_.from);
  const StateId t = sys.state_id(c_.to);

  Record r = base(command_);
  r["metric"] = m.descriptor();
  r["from"] = c_.from;
  r["to"] = c_.to;
  if (!lasso_.empty()) {
    const auto comma = lasso_.find(',');
    if (comma == std::string::npos) throw ParseError("--lasso expects p,c");
    std::size_t p = 0;
    std::size_t cyc = 0;
    try {
      p = std::stoul(lasso_.substr(0, comma));
      cyc = std::stoul(lasso_.substr(comma + 1));
    } catch (const std::exception&) {
      throw ParseError("--lasso expects p,c");
    }
    r["value"] = linear_lasso_estimate(sys, s, t, m, p, cyc).to_string();
    r["status"] = "ESTIMATE";
    r["lasso"] = lasso_;
  } else if (depth_ == 0 && m.accumulator() == Accumulator::kDiscrete) {
    r["value"] = linear_discrete(sys, s, t, m.ground().order(), antichain_).to_string();
    r["status"] = "EXACT";
  } else {
    const std::size_t k = depth_ == 0 ? 8 : depth_;
    LinearBound b = linear_bound(sys, s, t, m, k);
    put_bracket(r, b.lower, b.upper);
    r["status"] = std::string(to_string(b.method));
    r["depth"] = b.depth;
  }
  put_timing(r, c_, start);
  Emitter(out_, c_.format).emit(r);
  return kOk;
}

int Runner::oracle() {
  const auto start = Clock::now();
  WeightedTransitionSystem sys = parse_wts(read_file(c_.file));
  const TraceMetric m = metric_of(c_);
  const StateId s = sys.state_id(c_.from);
  const StateId t = sys.state_id(c_.to);
  const std::size_t k = oracle_depth(oracle_);

  Record r = base(command_);
  r["metric"] = m.descriptor();
  r["from"] = c_.from;
  r["to"] = c_.to;
  r["game"] = blind_ ? "blind" : "full";
  r["value"] = (blind_ ? bounded_blind_value(sys, s, t, m, k) : bounded_value(sys, s, t, m, k))
                   .to_string();
  r["status"] = "EXACT";
  r["depth"] = k;
  put_timing(r, c_, start);
  Emitter(out_, c_.format).emit(r);
  return kOk;
}

int Runner::gen_ineq() {
  IneqSpec spec{parse_lasso_literal(sigma_), parse_lasso_literal(tau_), metric_of(c_)};
  IneqSystem built = build_inequivalence(spec);
  out_ << serialize_wts(built.sys, c_.format == "table" ? 2 : -1) << '\n';
  return kOk;
}

int Runner::gen_random() {
  random_.weight_min = parse_rational(wmin_);
  random_.weight_max = parse_rational(wmax_);
  out_ << serialize_wts(random_wts(random_), c_.format == "table" ? 2 : -1) << '\n';
  return kOk;
}

int Runner::compare() {
  const auto start = Clock::now();
  Emitter emit(out_, c_.format);
  const std::size_t k = depth_ == 0 ? 4 : depth_;
  FixpointOptions opts;
  opts.jobs = jobs_;
  std::size_t checks = 0;
  std::size_t violations = 0;

  for (const auto& descriptor : metrics_) {
    const TraceMetric m = TraceMetric::parse(descriptor);
    for (std::size_t i = 0; i < systems_; ++i) {
      RandomWtsOptions ro = random_;
      ro.seed = random_.seed + i;
      const WeightedTransitionSystem sys = random_wts(ro);
      const BranchingTable table = branching_table(sys, m, opts);
      const std::size_t n = sys.num_states();

      auto report = [&](const std::string& property, const std::string& where,
                        const ExtValue& lhs, const ExtValue& rhs) {
        ++violations;
        Record r = base(command_);
        r["status"] = "ERROR";
        r["metric"] = m.descriptor();
        r["seed"] = ro.seed;
        r["property"] = property;
        r["states"] = where;
        r["lhs"] = lhs.to_string();
        r["rhs"] = rhs.to_string();
        emit.emit(r);
      };

      for (StateId s = 0; s < n; ++s) {
        for (StateId t = 0; t < n; ++t) {
          const ExtValue lower = linear_bound(sys, s, t, m, k).lower;
          ++checks;
          if (table.at(s, t).upper < lower) {
            report("linear<=branching", sys.state_name(s) + "," + sys.state_name(t), lower,
                   table.at(s, t).upper);
          }
          for (StateId u = 0; u < n; ++u) {
            const ExtValue via = table.at(s, t).upper + table.at(t, u).upper;
            ++checks;
            if (via < table.at(s, u).lower) {
              report("triangle",
                     sys.state_name(s) + "," + sys.state_name(t) + "," + sys.state_name(u),
                     table.at(s, u).lower, via);
            }
          }
        }
      }
    }
  }

  Record r = base(command_);
  r["status"] = violations == 0 ? "OK" : "ERROR";
  r["checks"] = checks;
  r["violations"] = violations;
  if (violations) r["message"] = std::to_string(violations) + " property violations";
  put_timing(r, c_, start);
  emit.emit(r);
  return violations == 0 ? kOk : kViolation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Runner(out, err).run(args);
}

}  // namespace wtsdist::cli
