#include <algorithm>
#include <random>

#include "flowalg/dataflow.hpp"
#include "flowalg/error.hpp"

namespace flowalg {

namespace {

std::string describe(const Value& v) {
  if (v.isSequence()) return std::to_string(v.size()) + (v.size() == 1 ? " element" : " elements");
  return v.str();
}

Error tagged(const std::string& who, const Error& e) {
  return Error(e.kind(), who + ": " + e.what());
}

// A schedulable unit: a transformation outside every loop, or a whole loop.
struct Unit {
  std::string id;
  const LoopSpec* loop = nullptr;
  std::map<std::string, std::int64_t> demand;
};

class Executor {
 public:
  Executor(const ProgramGraph& g, const ExecOptions& options) : g_(g), options_(options) {}

  ExecResult run(const std::map<std::string, Value>& inputs) {
    bindInputs(inputs);
    buildUnits();
    ExecResult result;
    marking_ = initialMarking(g_);
    std::mt19937_64 rng(options_.schedulerSeed.value_or(0));
    for (;;) {
      std::vector<const Unit*> enabled;
      // A fan-out place holds one token per reader; without this check a
      // single reader could fire once per token.
      for (const auto& u : units_) {
        if (!fired_.count(u.id) && isEnabled(u)) enabled.push_back(&u);
      }
      if (enabled.empty()) break;
      std::size_t pick = 0;
      if (options_.schedulerSeed) {
        pick = std::uniform_int_distribution<std::size_t>(0, enabled.size() - 1)(rng);
      }
      const Unit& u = *enabled[pick];
      fired_.insert(u.id);
      for (const auto& [place, k] : u.demand) marking_[place] -= k;
      const std::string out = u.loop ? runLoop(*u.loop) : runTransition(u.id);
      marking_[out] += g_.tokensProduced(out);
    }
    for (const auto& [id, p] : g_.places) {
      if (p.role == PlaceRole::Output) {
        auto it = values_.find(id);
        if (it == values_.end() || bypassed_.count(id)) {
          throw Error(ErrorKind::NonQuiescent, "execution stopped before producing output " + id);
        }
        result.outputs.emplace(id, it->second);
      } else if (marking_[id] != 0) {
        throw Error(ErrorKind::NonQuiescent, "execution stopped with " + std::to_string(marking_[id]) +
                                                 " token(s) left on " + id);
      }
    }
    result.trace = std::move(trace_);
    result.finalMarking = std::move(marking_);
    return result;
  }

 private:
  void bindInputs(const std::map<std::string, Value>& inputs) {
    for (const auto& [id, p] : g_.places) {
      if (p.role != PlaceRole::Input) continue;
      auto it = inputs.find(id);
      if (it == inputs.end()) throw Error(ErrorKind::InvalidProgram, "no data bound to input " + id);
      if (p.type && !conformsTo(it->second, *p.type)) {
        throw Error(ErrorKind::TypeMismatch, "input " + id + " is declared " + p.type->str() +
                                                 " but holds " + it->second.str());
      }
      values_.insert_or_assign(id, it->second);
    }
    for (const auto& [id, v] : inputs) {
      auto p = g_.places.find(id);
      if (p == g_.places.end() || p->second.role != PlaceRole::Input) {
        throw Error(ErrorKind::InvalidProgram, "data bound to " + id + ", which is not an input dataset");
      }
    }
  }

  void buildUnits() {
    for (const auto& [id, t] : g_.transitions) {
      if (t.isControl() || g_.loopOfTransition(id)) continue;
      Unit u{id, nullptr, {}};
      for (const auto* e : g_.inputsOf(id)) u.demand[e->from] += g_.weight(*e);
      units_.push_back(std::move(u));
    }
    for (const auto& [id, loop] : g_.loops) {
      Unit u{id, &loop, {}};
      u.demand[loop.d0] += 1;
      const auto inside = bodyPlaces(loop);
      for (const auto& t : loop.body) {
        for (const auto* e : g_.inputsOf(t)) {
          if (!inside.count(e->from)) u.demand[e->from] += 1;
        }
      }
      units_.push_back(std::move(u));
    }
    std::sort(units_.begin(), units_.end(), [](const Unit& a, const Unit& b) { return a.id < b.id; });
  }

  std::set<std::string> bodyPlaces(const LoopSpec& loop) const {
    std::set<std::string> inside{loop.stepIn};
    for (const auto& t : loop.body) {
      if (const Edge* out = g_.outputOf(t)) inside.insert(out->to);
    }
    return inside;
  }

  bool isEnabled(const Unit& u) const {
    return std::all_of(u.demand.begin(), u.demand.end(), [&](const auto& kv) {
      auto it = marking_.find(kv.first);
      return it != marking_.end() && it->second >= kv.second;
    });
  }

  // Evaluates one transformation against `env`, which maps places to values;
  // returns the output place.
  std::string evaluate(const std::string& id, std::map<std::string, Value>& env,
                       std::set<std::string>& bypassed, const std::string& prefix) {
    const Transformation& t = g_.transitions.at(id).transformation();
    const std::string out = g_.outputOf(id)->to;
    std::vector<Value> args;
    std::vector<bool> skipped;
    std::string names;
    for (const auto* e : g_.inputsOf(id)) {
      args.push_back(env.at(e->from));
      skipped.push_back(bypassed.count(e->from) != 0);
      names += (names.empty() ? "" : ", ") + e->from;
    }
    const std::string head = prefix + id + " " + std::string(kindName(t.kind)) + "(" + names + ") -> " + out;

    if (t.kind == TransformKind::LoopSelect) {
      const bool useEntry = skipped[1];
      env.insert_or_assign(out, useEntry ? args[0] : args[1]);
      bypassed.erase(out);
      trace_.push_back(head + ": " + (useEntry ? "loop had stopped, keeps " + names.substr(0, names.find(','))
                                               : describe(args[1])));
      return out;
    }
    if (std::find(skipped.begin(), skipped.end(), true) != skipped.end()) {
      env.insert_or_assign(out, args[0]);
      bypassed.insert(out);
      trace_.push_back(head + ": skipped");
      return out;
    }
    try {
      if (t.kind == TransformKind::LoopGuard) {
        const bool go = evalFunc(*t.fn, std::span(&args[0], 1)).asBool();
        env.insert_or_assign(out, args[0]);
        if (go) bypassed.erase(out); else bypassed.insert(out);
        trace_.push_back(head + ": predicate " + (go ? "holds" : "fails, loop stops"));
        return out;
      }
      Value result = flowalg::apply(t, args);
      trace_.push_back(head + ": " + describe(result));
      env.insert_or_assign(out, std::move(result));
      bypassed.erase(out);
    } catch (const Error& e) {
      throw tagged(id, e);
    }
    return out;
  }

  std::string runTransition(const std::string& id) {
    return evaluate(id, values_, bypassed_, "");
  }

  std::string runLoop(const LoopSpec& loop) {
    auto it = options_.loopOverrides.find(loop.id);
    const std::int64_t n = it != options_.loopOverrides.end() ? it->second : loop.n;
    if (n < 0) {
      throw Error(ErrorKind::NegativeIterations, loop.id + ": iteration count " + std::to_string(n));
    }
    const auto inside = bodyPlaces(loop);
    std::vector<std::string> order;
    for (const auto& t : topologicalOrder(g_)) {
      if (std::find(loop.body.begin(), loop.body.end(), t) != loop.body.end()) order.push_back(t);
    }
    std::int64_t iteration = 0;
    const algebra::StepFunction step = [&](const Value& x) {
      ++iteration;
      std::map<std::string, Value> env;
      for (const auto& t : order) {
        for (const auto* e : g_.inputsOf(t)) {
          if (!inside.count(e->from)) env.insert_or_assign(e->from, values_.at(e->from));
        }
      }
      env.insert_or_assign(loop.stepIn, x);
      std::set<std::string> none;
      const std::string prefix = loop.id + "[" + std::to_string(iteration) + "] ";
      for (const auto& t : order) evaluate(t, env, none, prefix);
      return env.at(loop.stepOut);
    };
    const Value& start = values_.at(loop.d0);
    Value result;
    try {
      result = loop.predicate ? applyIterateWithCondition(step, *loop.predicate, n, start)
                              : applyIterate(step, n, start);
    } catch (const Error& e) {
      throw tagged(loop.id, e);
    }
    trace_.push_back(loop.id + " " + (loop.predicate ? "iterateWithCondition" : "iterate") + "(" +
                     loop.d0 + ", n=" + std::to_string(n) + ") -> " + loop.dn + ": " +
                     std::to_string(iteration) + " iteration(s), " + describe(result));
    values_.insert_or_assign(loop.dn, std::move(result));
    return loop.dn;
  }

  const ProgramGraph& g_;
  const ExecOptions& options_;
  std::vector<Unit> units_;
  std::set<std::string> fired_;
  Marking marking_;
  std::map<std::string, Value> values_;
  std::set<std::string> bypassed_;
  std::vector<std::string> trace_;
};

}  // namespace

ExecResult execute(const ProgramGraph& g, const std::map<std::string, Value>& inputs,
                   const ExecOptions& options) {
  if (options.viaUnfold) {
    ExecOptions plain = options;
    plain.viaUnfold = false;
    plain.loopOverrides.clear();
    return execute(unfold(g, options.loopOverrides), inputs, plain);
  }
  return Executor(g, options).run(inputs);
}

}  // namespace flowalg
