#include <algorithm>
#include <queue>

#include "flowalg/dataflow.hpp"
#include "flowalg/error.hpp"

namespace flowalg {

std::string_view roleName(PlaceRole role) {
  switch (role) {
    case PlaceRole::Input: return "input";
    case PlaceRole::Intermediate: return "intermediate";
    case PlaceRole::Output: return "output";
  }
  return "?";
}

std::string_view controlName(ControlKind kind) {
  switch (kind) {
    case ControlKind::Start: return "start";
    case ControlKind::Iterative: return "iterative";
    case ControlKind::End: return "end";
  }
  return "?";
}

void ProgramGraph::addPlace(std::string id, PlaceRole role, std::optional<ElemType> type) {
  DatasetNode node{id, std::move(type), role};
  places.insert_or_assign(std::move(id), std::move(node));
}

void ProgramGraph::addTransformation(std::string id, Transformation t,
                                     const std::vector<std::string>& inputs,
                                     const std::string& output) {
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    edges.push_back(Edge{inputs[i], id, static_cast<int>(i)});
  }
  edges.push_back(Edge{id, output, 0});
  TransitionNode node{id, std::move(t)};
  transitions.insert_or_assign(std::move(id), std::move(node));
}

void ProgramGraph::addLoop(LoopSpec loop) {
  const std::set<std::string> body(loop.body.begin(), loop.body.end());
  std::set<std::string> produced, consumed;
  for (const auto& e : edges) {
    if (body.count(e.from)) produced.insert(e.to);
    if (body.count(e.to)) consumed.insert(e.from);
  }
  if (loop.stepIn.empty()) {
    std::vector<std::string> candidates;
    for (const auto& p : consumed) {
      auto it = places.find(p);
      if (produced.count(p) || producers(p).size() != 0) continue;
      if (it != places.end() && it->second.role == PlaceRole::Input) continue;
      candidates.push_back(p);
    }
    if (candidates.size() != 1) {
      throw Error(ErrorKind::InvalidProgram,
                  "loop " + loop.id + ": cannot tell which place the body starts from; declare stepIn");
    }
    loop.stepIn = candidates.front();
  }
  if (loop.stepOut.empty()) {
    std::vector<std::string> candidates;
    for (const auto& p : produced) {
      if (!consumed.count(p)) candidates.push_back(p);
    }
    if (candidates.size() != 1) {
      throw Error(ErrorKind::InvalidProgram,
                  "loop " + loop.id + ": cannot tell which place the body ends in; declare stepOut");
    }
    loop.stepOut = candidates.front();
  }
  const auto control = [&](const std::string& id, ControlKind kind, const std::string& from,
                           const std::string& to) {
    transitions.insert_or_assign(id, TransitionNode{id, IterControl{kind, loop.id}});
    edges.push_back(Edge{from, id, 0});
    edges.push_back(Edge{id, to, 0});
  };
  control(loop.startId(), ControlKind::Start, loop.d0, loop.stepIn);
  control(loop.iterativeId(), ControlKind::Iterative, loop.stepOut, loop.stepIn);
  control(loop.endId(), ControlKind::End, loop.stepOut, loop.dn);
  std::string id = loop.id;
  loops.insert_or_assign(std::move(id), std::move(loop));
}

std::vector<const Edge*> ProgramGraph::inputsOf(const std::string& transition) const {
  std::vector<const Edge*> out;
  for (const auto& e : edges) {
    if (e.to == transition) out.push_back(&e);
  }
  std::stable_sort(out.begin(), out.end(), [](const Edge* a, const Edge* b) { return a->port < b->port; });
  return out;
}

const Edge* ProgramGraph::outputOf(const std::string& transition) const {
  for (const auto& e : edges) {
    if (e.from == transition) return &e;
  }
  return nullptr;
}

std::vector<std::string> ProgramGraph::consumers(const std::string& place) const {
  std::vector<std::string> out;
  for (const auto& e : edges) {
    if (e.from == place) out.push_back(e.to);
  }
  return out;
}

std::vector<std::string> ProgramGraph::producers(const std::string& place) const {
  std::vector<std::string> out;
  for (const auto& e : edges) {
    if (e.to == place) out.push_back(e.from);
  }
  return out;
}

int ProgramGraph::uses(const std::string& place) const {
  int count = 0;
  for (const auto& e : edges) {
    if (e.from == place) ++count;
  }
  for (const auto& [id, loop] : loops) {
    if (loop.stepOut != place) continue;
    bool toIterative = false, toEnd = false;
    for (const auto& e : edges) {
      if (e.from != place) continue;
      toIterative = toIterative || e.to == loop.iterativeId();
      toEnd = toEnd || e.to == loop.endId();
    }
    if (toIterative && toEnd) --count;
  }
  return count;
}

int ProgramGraph::tokensProduced(const std::string& place) const {
  const int n = uses(place);
  auto it = places.find(place);
  if (it != places.end() && it->second.role == PlaceRole::Output) return std::max(1, n);
  return n;
}

int ProgramGraph::weight(const Edge& e) const {
  if (isPlace(e.from)) return 1;
  return tokensProduced(e.to);
}

const LoopSpec* ProgramGraph::loopOfTransition(const std::string& transition) const {
  for (const auto& [id, loop] : loops) {
    if (std::find(loop.body.begin(), loop.body.end(), transition) != loop.body.end()) return &loop;
  }
  return nullptr;
}

std::size_t ProgramGraph::transformationCount() const {
  return static_cast<std::size_t>(std::count_if(transitions.begin(), transitions.end(),
                                                [](const auto& kv) { return !kv.second.isControl(); }));
}

std::string Diagnostic::str() const {
  std::string out = severity == Severity::Error ? "error" : "warning";
  if (!where.empty()) out += ": " + where;
  return out + ": " + message;
}

bool hasErrors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::Error; });
}

namespace {

// Kahn's algorithm over places and transitions, skipping the loop-back
// edges (iterative control -> stepIn). Ready nodes are taken in id order.
std::vector<std::string> nodeOrder(const ProgramGraph& g, bool& acyclic) {
  std::map<std::string, int> indegree;
  std::map<std::string, std::vector<std::string>> next;
  for (const auto& [id, p] : g.places) indegree[id];
  for (const auto& [id, t] : g.transitions) indegree[id];
  for (const auto& e : g.edges) {
    auto t = g.transitions.find(e.from);
    if (t != g.transitions.end() && t->second.isControl() &&
        t->second.control().kind == ControlKind::Iterative) {
      continue;
    }
    if (!indegree.count(e.from) || !indegree.count(e.to)) continue;
    ++indegree[e.to];
    next[e.from].push_back(e.to);
  }
  std::set<std::string> ready;
  for (const auto& [id, d] : indegree) {
    if (d == 0) ready.insert(id);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    const std::string id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    for (const auto& n : next[id]) {
      if (--indegree[n] == 0) ready.insert(n);
    }
  }
  acyclic = order.size() == indegree.size();
  return order;
}

class Validator {
 public:
  explicit Validator(const ProgramGraph& g) : g_(g) {}

  std::vector<Diagnostic> run() {
    checkNodes();
    checkEdges();
    checkTransitions();
    checkPlaces();
    checkLoops();
    bool acyclic = true;
    nodeOrder(g_, acyclic);
    if (!acyclic) error("", "cycle that does not pass through an iterative control transition");
    return std::move(out_);
  }

 private:
  void error(std::string where, std::string msg) {
    out_.push_back({Diagnostic::Severity::Error, std::move(where), std::move(msg)});
  }
  void warning(std::string where, std::string msg) {
    out_.push_back({Diagnostic::Severity::Warning, std::move(where), std::move(msg)});
  }

  void checkNodes() {
    for (const auto& [id, p] : g_.places) {
      if (id.empty()) error("", "place with an empty id");
      if (g_.isTransition(id)) error(id, "id used by both a place and a transition");
      if (p.id != id) error(id, "place registered under a different id");
    }
    for (const auto& [id, t] : g_.transitions) {
      if (t.id != id) error(id, "transition registered under a different id");
    }
  }

  void checkEdges() {
    std::set<std::tuple<std::string, std::string, int>> seen;
    for (const auto& e : g_.edges) {
      const bool fp = g_.isPlace(e.from), ft = g_.isTransition(e.from);
      const bool tp = g_.isPlace(e.to), tt = g_.isTransition(e.to);
      if (!(fp || ft)) error(e.from, "edge from unknown node");
      if (!(tp || tt)) error(e.to, "edge to unknown node");
      if ((fp && tp) || (ft && tt)) {
        error(e.from + " -> " + e.to, "not bipartite: edges must join a place and a transition");
      }
      if (!seen.insert({e.from, e.to, e.port}).second) {
        error(e.from + " -> " + e.to, "duplicate edge");
      }
    }
  }

  void checkTransitions() {
    for (const auto& [id, t] : g_.transitions) {
      std::vector<const Edge*> ins;
      std::vector<const Edge*> outs;
      for (const auto& e : g_.edges) {
        if (e.to == id && g_.isPlace(e.from)) ins.push_back(&e);
        if (e.from == id && g_.isPlace(e.to)) outs.push_back(&e);
      }
      if (outs.size() != 1) {
        error(id, "needs exactly one output dataset, has " + std::to_string(outs.size()));
      }
      if (t.isControl()) {
        if (ins.size() != 1) error(id, "loop control needs exactly one input dataset");
        if (!g_.loops.count(t.control().loopId)) {
          error(id, "malformed iterative subnet: control of unknown loop " + t.control().loopId);
        }
        continue;
      }
      const auto& tr = t.transformation();
      const int want = arity(tr.kind);
      if (static_cast<int>(ins.size()) != want) {
        error(id, std::string(kindName(tr.kind)) + " takes " + std::to_string(want) +
                      " input dataset(s), has " + std::to_string(ins.size()));
      } else {
        std::set<int> ports;
        for (const auto* e : ins) ports.insert(e->port);
        if (static_cast<int>(ports.size()) != want || *ports.begin() != 0 || *ports.rbegin() != want - 1) {
          error(id, "input ports must be numbered 0.." + std::to_string(want - 1));
        }
      }
      const bool needsFn = tr.kind == TransformKind::Map || tr.kind == TransformKind::FlatMap ||
                           tr.kind == TransformKind::Filter || tr.kind == TransformKind::GroupBy ||
                           tr.kind == TransformKind::Reduce || tr.kind == TransformKind::ReduceByKey ||
                           tr.kind == TransformKind::LoopGuard;
      if (needsFn && !tr.fn) error(id, std::string(kindName(tr.kind)) + " needs a function parameter");
      if (tr.kind == TransformKind::Iterate || tr.kind == TransformKind::IterateWithCondition) {
        error(id, "iterations must be declared as loops");
      }
    }
  }

  bool isLoopStepIn(const std::string& place) const {
    return std::any_of(g_.loops.begin(), g_.loops.end(),
                       [&](const auto& kv) { return kv.second.stepIn == place; });
  }

  void checkPlaces() {
    int inputs = 0, outputs = 0;
    for (const auto& [id, p] : g_.places) {
      const auto prod = g_.producers(id);
      const auto cons = g_.consumers(id);
      switch (p.role) {
        case PlaceRole::Input:
          ++inputs;
          if (!prod.empty()) error(id, "input dataset cannot be produced by a transition");
          if (!p.type) error(id, "input dataset needs a declared type");
          if (cons.empty()) warning(id, "input dataset is never used");
          break;
        case PlaceRole::Output:
          ++outputs;
          if (!cons.empty()) error(id, "output dataset must be terminal but is read by " + cons.front());
          [[fallthrough]];
        case PlaceRole::Intermediate:
          if (prod.empty()) error(id, "dataset is never produced");
          if (prod.size() > 1 && !isLoopStepIn(id)) error(id, "dataset is produced by more than one transition");
          if (p.role == PlaceRole::Intermediate && cons.empty()) {
            warning(id, "intermediate dataset is never read");
          }
          break;
      }
      if (p.type && !p.type->isCollection()) {
        error(id, "dataset type must be a Bag or List, got " + p.type->str());
      }
    }
    if (inputs == 0) error("", "program has no input dataset");
    if (outputs == 0) error("", "program has no output dataset");
  }

  bool hasEdge(const std::string& from, const std::string& to) const {
    return std::any_of(g_.edges.begin(), g_.edges.end(),
                       [&](const Edge& e) { return e.from == from && e.to == to; });
  }

  void checkControl(const LoopSpec& loop, const std::string& id, ControlKind kind,
                    const std::string& from, const std::string& to) {
    auto it = g_.transitions.find(id);
    if (it == g_.transitions.end() || !it->second.isControl() ||
        it->second.control().kind != kind || it->second.control().loopId != loop.id) {
      error(loop.id, "malformed iterative subnet: missing " + std::string(controlName(kind)) +
                         " transition " + id);
      return;
    }
    if (!hasEdge(from, id) || !hasEdge(id, to)) {
      error(loop.id, "malformed iterative subnet: " + id + " must connect " + from + " to " + to);
    }
  }

  void checkLoops() {
    std::set<std::string> claimed;
    for (const auto& [id, loop] : g_.loops) {
      for (const auto* p : {&loop.d0, &loop.dn, &loop.stepIn, &loop.stepOut}) {
        if (!g_.isPlace(*p)) error(id, "malformed iterative subnet: unknown place '" + *p + "'");
      }
      if (loop.n < 0) error(id, "negative iteration count " + std::to_string(loop.n));
      if (loop.body.empty()) error(id, "malformed iterative subnet: empty body");
      const std::set<std::string> body(loop.body.begin(), loop.body.end());
      for (const auto& t : loop.body) {
        auto it = g_.transitions.find(t);
        if (it == g_.transitions.end() || it->second.isControl()) {
          error(id, "malformed iterative subnet: body transition '" + t + "' is not a transformation");
        }
        if (!claimed.insert(t).second) error(t, "transition belongs to more than one loop body");
      }
      checkControl(loop, loop.startId(), ControlKind::Start, loop.d0, loop.stepIn);
      checkControl(loop, loop.iterativeId(), ControlKind::Iterative, loop.stepOut, loop.stepIn);
      checkControl(loop, loop.endId(), ControlKind::End, loop.stepOut, loop.dn);

      // Data produced inside the body stays inside, except through t_end.
      for (const auto& t : loop.body) {
        const Edge* out = g_.outputOf(t);
        if (!out) continue;
        for (const auto& c : g_.consumers(out->to)) {
          if (body.count(c)) continue;
          if (out->to == loop.stepOut && (c == loop.iterativeId() || c == loop.endId())) continue;
          error(id, "malformed iterative subnet: " + out->to + " escapes the body into " + c);
        }
      }
      for (const auto& c : g_.consumers(loop.stepIn)) {
        if (!body.count(c)) error(id, "malformed iterative subnet: step input read by " + c);
      }
      for (const auto& p : g_.producers(loop.stepIn)) {
        if (p != loop.startId() && p != loop.iterativeId()) {
          error(id, "malformed iterative subnet: step input produced by " + p);
        }
      }
      if (std::none_of(loop.body.begin(), loop.body.end(), [&](const std::string& t) {
            const Edge* out = g_.outputOf(t);
            return out && out->to == loop.stepOut;
          })) {
        error(id, "malformed iterative subnet: no body transition produces " + loop.stepOut);
      }
    }
  }

  const ProgramGraph& g_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const ProgramGraph& g) { return Validator(g).run(); }

std::vector<std::string> topologicalOrder(const ProgramGraph& g) {
  bool acyclic = true;
  std::vector<std::string> order = nodeOrder(g, acyclic);
  if (!acyclic) throw Error(ErrorKind::InvalidProgram, "program graph has a cycle");
  std::vector<std::string> out;
  for (auto& id : order) {
    if (g.isTransition(id)) out.push_back(std::move(id));
  }
  return out;
}

TypecheckResult typecheckProgram(const ProgramGraph& g) {
  TypecheckResult r;
  auto err = [&](const std::string& where, const std::string& msg) {
    r.diagnostics.push_back({Diagnostic::Severity::Error, where, msg});
  };
  for (const auto& [id, p] : g.places) {
    if (p.role == PlaceRole::Input && p.type) r.types[id] = *p.type;
  }
  std::vector<std::string> order;
  try {
    order = topologicalOrder(g);
  } catch (const Error& e) {
    err("", e.what());
    return r;
  }

  auto assign = [&](const std::string& place, const ElemType& inferred, const std::string& by) {
    auto pit = g.places.find(place);
    if (pit == g.places.end()) return;
    if (pit->second.type) {
      auto u = unify(*pit->second.type, inferred);
      if (!u) {
        err(by, "produces " + inferred.str() + " but " + place + " is declared " + pit->second.type->str());
        return;
      }
      r.types[place] = *pit->second.type;
      return;
    }
    auto prev = r.types.find(place);
    if (prev != r.types.end()) {
      auto u = unify(prev->second, inferred);
      if (!u) {
        err(by, "produces " + inferred.str() + " but " + place + " already has type " + prev->second.str());
        return;
      }
      prev->second = *u;
      return;
    }
    r.types[place] = inferred;
  };

  for (const auto& id : order) {
    const TransitionNode& t = g.transitions.at(id);
    const Edge* out = g.outputOf(id);
    const auto ins = g.inputsOf(id);
    std::vector<ElemType> inTypes;
    bool ready = out != nullptr;
    for (const auto* e : ins) {
      auto it = r.types.find(e->from);
      if (it == r.types.end()) {
        ready = false;
        break;
      }
      inTypes.push_back(it->second);
    }
    if (!ready) continue;  // an upstream problem was already reported

    if (t.isControl()) {
      const IterControl& c = t.control();
      const LoopSpec& loop = g.loops.at(c.loopId);
      if (c.kind == ControlKind::Iterative) {
        auto it = r.types.find(loop.stepIn);
        if (it != r.types.end() && !unify(it->second, inTypes[0])) {
          err(loop.id, "step function maps " + it->second.str() + " to " + inTypes[0].str() +
                           "; loop entry and exit must have the same type");
        }
        continue;
      }
      if (!inTypes.empty() && inTypes[0].kind != TypeKind::Bag) {
        err(id, "iterations run over bags, got " + inTypes[0].str());
        continue;
      }
      assign(out->to, inTypes[0], id);
      if (c.kind == ControlKind::Start && loop.predicate) {
        try {
          const ElemType stepType = r.types.count(loop.stepIn) ? r.types.at(loop.stepIn) : inTypes[0];
          FuncDef p = bindParams(*loop.predicate, std::span(&stepType, 1));
          p.returnType = ElemType::boolean();
          typecheckFunc(p);
        } catch (const Error& e) {
          err(loop.id, std::string("loop predicate: ") + e.what());
        }
      }
      continue;
    }
    try {
      assign(out->to, outputType(t.transformation(), inTypes), id);
    } catch (const Error& e) {
      err(id, t.transformation().str() + ": " + e.what());
    }
  }
  // Untyped places downstream of a reported error need no second message.
  const bool clean = r.ok();
  for (const auto& [id, p] : g.places) {
    if (clean && !r.types.count(id)) err(id, "type could not be determined");
  }
  return r;
}

ProgramGraph withInferredTypes(const ProgramGraph& g, const std::map<std::string, ElemType>& types) {
  ProgramGraph out = g;
  for (auto& [id, p] : out.places) {
    auto it = types.find(id);
    if (!p.type && it != types.end()) p.type = it->second;
  }
  return out;
}

Marking initialMarking(const ProgramGraph& g) {
  Marking m;
  for (const auto& [id, p] : g.places) m[id] = p.role == PlaceRole::Input ? g.uses(id) : 0;
  return m;
}

namespace {

std::map<std::string, std::int64_t> demand(const ProgramGraph& g, const std::string& transition) {
  std::map<std::string, std::int64_t> need;
  for (const auto* e : g.inputsOf(transition)) need[e->from] += g.weight(*e);
  return need;
}

bool satisfied(const Marking& m, const std::map<std::string, std::int64_t>& need) {
  return std::all_of(need.begin(), need.end(), [&](const auto& kv) {
    auto it = m.find(kv.first);
    return it != m.end() && it->second >= kv.second;
  });
}

}  // namespace

std::set<std::string> enabledTransitions(const ProgramGraph& g, const Marking& m) {
  std::set<std::string> out;
  for (const auto& [id, t] : g.transitions) {
    const auto need = demand(g, id);
    if (!need.empty() && satisfied(m, need)) out.insert(id);
  }
  return out;
}

Marking fireTransition(const ProgramGraph& g, const Marking& m, const std::string& transition) {
  if (!g.isTransition(transition)) {
    throw Error(ErrorKind::NotEnabled, "no transition named " + transition);
  }
  const auto need = demand(g, transition);
  if (need.empty() || !satisfied(m, need)) {
    throw Error(ErrorKind::NotEnabled, transition + " is not enabled");
  }
  Marking next = m;
  for (const auto& [place, k] : need) next[place] -= k;
  for (const auto& e : g.edges) {
    if (e.from == transition) next[e.to] += g.weight(e);
  }
  return next;
}

}  // namespace flowalg
