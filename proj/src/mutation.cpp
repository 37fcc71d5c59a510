#include <algorithm>

#include "flowalg/error.hpp"
#include "flowalg/mutation.hpp"

namespace flowalg {

std::string_view operatorName(MutationOperator op) {
  switch (op) {
    case MutationOperator::TransformationReplacement: return "TransformationReplacement";
    case MutationOperator::TransformationsSwap: return "TransformationsSwap";
    case MutationOperator::TransformationDeletion: return "TransformationDeletion";
    case MutationOperator::AggregationFunctionSubstitution: return "AggregationFunctionSubstitution";
    case MutationOperator::SetOperatorReplacement: return "SetOperatorReplacement";
    case MutationOperator::JoinInputSwap: return "JoinInputSwap";
    case MutationOperator::OrderFlagFlip: return "OrderFlagFlip";
    case MutationOperator::FilterPredicateSubstitution: return "FilterPredicateSubstitution";
    case MutationOperator::MappingFunctionSubstitution: return "MappingFunctionSubstitution";
  }
  return "?";
}

bool isDataflowOperator(MutationOperator op) {
  return op == MutationOperator::TransformationReplacement || op == MutationOperator::TransformationsSwap ||
         op == MutationOperator::TransformationDeletion;
}

bool isExtendedOperator(MutationOperator op) {
  return op == MutationOperator::JoinInputSwap || op == MutationOperator::OrderFlagFlip ||
         op == MutationOperator::FilterPredicateSubstitution ||
         op == MutationOperator::MappingFunctionSubstitution;
}

namespace {

std::string abbreviation(MutationOperator op) {
  switch (op) {
    case MutationOperator::TransformationReplacement: return "REP";
    case MutationOperator::TransformationsSwap: return "SWP";
    case MutationOperator::TransformationDeletion: return "DEL";
    case MutationOperator::AggregationFunctionSubstitution: return "AFS";
    case MutationOperator::SetOperatorReplacement: return "SOR";
    case MutationOperator::JoinInputSwap: return "JIS";
    case MutationOperator::OrderFlagFlip: return "OFF";
    case MutationOperator::FilterPredicateSubstitution: return "FPS";
    case MutationOperator::MappingFunctionSubstitution: return "MFS";
  }
  return "MUT";
}

// Mutable sites: transformations the user wrote (loop plumbing excluded).
bool isSite(const TransitionNode& t) {
  if (t.isControl()) return false;
  const auto k = t.transformation().kind;
  return k != TransformKind::LoopGuard && k != TransformKind::LoopSelect;
}

struct Signature {
  std::vector<ElemType> inputs;
  ElemType output;
  friend bool operator==(const Signature&, const Signature&) = default;
};

class Generator {
 public:
  explicit Generator(const ProgramGraph& g) : g_(g), types_(typecheckProgram(g).types) {}

  std::vector<Mutant> take() { return std::move(out_); }

  Signature signature(const std::string& t) const {
    Signature s;
    for (const auto* e : g_.inputsOf(t)) s.inputs.push_back(typeAt(e->from));
    s.output = typeAt(g_.outputOf(t)->to);
    return s;
  }

  ElemType typeAt(const std::string& place) const {
    auto it = types_.find(place);
    return it == types_.end() ? ElemType::unknown() : it->second;
  }

  const Transformation& op(const std::string& t) const { return g_.transitions.at(t).transformation(); }

  // Keeps the mutant if it validates and type-checks; when `sameTypes` holds
  // the inferred place types (except `retyped`) must also be unchanged.
  void accept(MutationOperator mop, std::vector<std::string> sites, std::string description,
              ProgramGraph graph, bool sameTypes = true, const std::string& retyped = "") {
    if (hasErrors(validate(graph))) return;
    const TypecheckResult tc = typecheckProgram(graph);
    if (!tc.ok()) return;
    if (sameTypes) {
      for (const auto& [place, type] : tc.types) {
        if (place == retyped) continue;
        auto it = types_.find(place);
        if (it != types_.end() && it->second != type) return;
      }
    }
    std::string id = abbreviation(mop);
    for (const auto& s : sites) id += "-" + s;
    const int k = ++counters_[id];
    id += "-" + std::to_string(k);
    out_.push_back(Mutant{std::move(id), mop, std::move(sites), std::move(description), std::move(graph)});
  }

  ProgramGraph replaced(const std::string& site, Transformation t) const {
    ProgramGraph m = g_;
    m.transitions.at(site).op = std::move(t);
    return m;
  }

  void replacement() {
    for (const auto& [a, ta] : g_.transitions) {
      if (!isSite(ta)) continue;
      for (const auto& [b, tb] : g_.transitions) {
        if (a == b || !isSite(tb)) continue;
        const auto& opA = ta.transformation();
        const auto& opB = tb.transformation();
        if (arity(opA.kind) != arity(opB.kind) || sameTransformation(opA, opB)) continue;
        if (!(signature(a) == signature(b))) continue;
        accept(MutationOperator::TransformationReplacement, {a, b},
               a + ": " + opA.str() + " replaced by " + opB.str() + " (from " + b + ")", replaced(a, opB));
      }
    }
  }

  void swap() {
    for (const auto& [first, t1] : g_.transitions) {
      if (!isSite(t1) || arity(t1.transformation().kind) != 1) continue;
      const std::string middle = g_.outputOf(first)->to;
      const auto readers = g_.consumers(middle);
      if (readers.size() != 1 || g_.places.at(middle).role != PlaceRole::Intermediate) continue;
      const std::string& second = readers.front();
      const auto& t2 = g_.transitions.at(second);
      if (!isSite(t2) || arity(t2.transformation().kind) != 1) continue;
      if (g_.loopOfTransition(first) != g_.loopOfTransition(second)) continue;
      const bool loopBoundary = std::any_of(g_.loops.begin(), g_.loops.end(), [&](const auto& kv) {
        const LoopSpec& l = kv.second;
        return middle == l.stepIn || middle == l.stepOut || middle == l.d0 || middle == l.dn;
      });
      if (loopBoundary || sameTransformation(t1.transformation(), t2.transformation())) continue;
      ProgramGraph m = g_;
      m.transitions.at(first).op = t2.transformation();
      m.transitions.at(second).op = t1.transformation();
      m.places.at(middle).type.reset();
      accept(MutationOperator::TransformationsSwap, {first, second},
             "swap " + first + " (" + t1.transformation().str() + ") and " + second + " (" +
                 t2.transformation().str() + ")",
             std::move(m), true, middle);
    }
  }

  void deletion() {
    for (const auto& [id, t] : g_.transitions) {
      if (!isSite(t) || arity(t.transformation().kind) != 1) continue;
      if (t.transformation().kind == TransformKind::Identity) continue;
      const Signature s = signature(id);
      if (s.inputs[0] != s.output) continue;
      accept(MutationOperator::TransformationDeletion, {id}, id + ": " + t.transformation().str() + " deleted",
             replaced(id, Transformation::of(TransformKind::Identity)));
    }
  }

  void aggregation(const std::string& site) {
    const Transformation& t = op(site);
    if (!isAggregation(t.kind) || !t.fn || t.fn->params.size() != 2) return;
    const FuncDef& f = *t.fn;
    const std::string& x = f.params[0].name;
    const std::string& y = f.params[1].name;
    const auto vx = Expr::var(x);
    const auto vy = Expr::var(y);
    const std::vector<ExprPtr> bodies{
        vx,
        vy,
        substitute(f.body, {{y, vx}}),
        substitute(f.body, {{x, vy}}),
        substitute(f.body, {{x, vy}, {y, vx}}),
    };
    for (const auto& body : bodies) {
      Transformation m = t;
      m.fn = FuncDef{f.params, body, std::nullopt};
      const std::string text = print(*m.fn);
      accept(MutationOperator::AggregationFunctionSubstitution, {site},
             site + ": " + print(f) + " replaced by " + text, replaced(site, std::move(m)));
    }
  }

  void setLike(const std::string& site) {
    const Transformation& t = op(site);
    if (!isSetLike(t.kind)) return;
    const auto ins = g_.inputsOf(site);
    const std::string d1 = ins[0]->from, d2 = ins[1]->from;
    for (auto k : {TransformKind::Union, TransformKind::Intersection, TransformKind::Subtract}) {
      if (k == t.kind) continue;
      accept(MutationOperator::SetOperatorReplacement, {site},
             site + ": " + std::string(kindName(t.kind)) + "(" + d1 + ", " + d2 + ") replaced by " +
                 std::string(kindName(k)) + "(" + d1 + ", " + d2 + ")",
             replaced(site, Transformation::of(k)));
    }
    for (int keep : {0, 1}) {
      ProgramGraph m = replaced(site, Transformation::of(TransformKind::Identity));
      std::erase_if(m.edges, [&](const Edge& e) { return e.to == site && e.port != keep; });
      for (auto& e : m.edges) {
        if (e.to == site) e.port = 0;
      }
      const std::string& kept = keep == 0 ? d1 : d2;
      accept(MutationOperator::SetOperatorReplacement, {site},
             site + ": " + std::string(kindName(t.kind)) + "(" + d1 + ", " + d2 + ") replaced by identity(" +
                 kept + ")",
             std::move(m));
    }
    accept(MutationOperator::SetOperatorReplacement, {site},
           site + ": " + std::string(kindName(t.kind)) + " inputs swapped to (" + d2 + ", " + d1 + ")",
           swappedInputs(site));
  }

  ProgramGraph swappedInputs(const std::string& site) const {
    ProgramGraph m = g_;
    for (auto& e : m.edges) {
      if (e.to == site) e.port = 1 - e.port;
    }
    return m;
  }

  void other(const std::string& site) {
    const Transformation& t = op(site);
    switch (t.kind) {
      case TransformKind::Filter: {
        if (!t.fn) return;
        const FuncDef& p = *t.fn;
        const std::vector<std::pair<ExprPtr, std::string>> bodies{
            {Expr::litBool(true), "always true"},
            {Expr::litBool(false), "always false"},
            {Expr::unaryOp(UnaryOp::Not, p.body), "negated"},
        };
        for (const auto& [body, label] : bodies) {
          Transformation m = t;
          m.fn = FuncDef{p.params, body, std::nullopt};
          accept(MutationOperator::FilterPredicateSubstitution, {site},
                 site + ": predicate " + label + ", " + print(*m.fn), replaced(site, m));
        }
        break;
      }
      case TransformKind::Map:
      case TransformKind::FlatMap: {
        const Signature s = signature(site);
        if (s.inputs[0] != s.output) return;
        if (t.kind == TransformKind::Map) {
          accept(MutationOperator::MappingFunctionSubstitution, {site}, site + ": map replaced by identity",
                 replaced(site, Transformation::of(TransformKind::Identity)));
        } else if (t.fn && t.fn->params.size() == 1) {
          Transformation m = t;
          m.fn = FuncDef{t.fn->params, Expr::call(Builtin::Singleton, {Expr::var(t.fn->params[0].name)}),
                         std::nullopt};
          accept(MutationOperator::MappingFunctionSubstitution, {site},
                 site + ": flatMap function replaced by " + print(*m.fn), replaced(site, m));
        }
        break;
      }
      case TransformKind::InnerJoin:
      case TransformKind::LeftOuterJoin:
      case TransformKind::RightOuterJoin:
      case TransformKind::FullOuterJoin: {
        const auto ins = g_.inputsOf(site);
        accept(MutationOperator::JoinInputSwap, {site},
               site + ": " + std::string(kindName(t.kind)) + " inputs swapped to (" + ins[1]->from + ", " +
                   ins[0]->from + ")",
               swappedInputs(site));
        break;
      }
      case TransformKind::OrderBy:
      case TransformKind::OrderByKey: {
        Transformation m = t;
        m.descending = !t.descending;
        accept(MutationOperator::OrderFlagFlip, {site},
               site + ": " + std::string(kindName(t.kind)) + " " + (m.descending ? "ascending -> descending"
                                                                              : "descending -> ascending"),
               replaced(site, m));
        break;
      }
      default: break;
    }
  }

 private:
  const ProgramGraph& g_;
  std::map<std::string, ElemType> types_;
  std::map<std::string, int> counters_;
  std::vector<Mutant> out_;
};

void requireSite(const ProgramGraph& g, const std::string& site) {
  auto it = g.transitions.find(site);
  if (it == g.transitions.end() || !isSite(it->second)) {
    throw Error(ErrorKind::InvalidProgram, site + " is not a transformation of the program");
  }
}

}  // namespace

std::vector<Mutant> mutateDataflow(const ProgramGraph& g) {
  Generator gen(g);
  gen.replacement();
  gen.swap();
  gen.deletion();
  return gen.take();
}

std::vector<Mutant> mutateAggregation(const ProgramGraph& g, const std::string& site) {
  requireSite(g, site);
  Generator gen(g);
  gen.aggregation(site);
  return gen.take();
}

std::vector<Mutant> mutateSetLike(const ProgramGraph& g, const std::string& site) {
  requireSite(g, site);
  Generator gen(g);
  gen.setLike(site);
  return gen.take();
}

std::vector<Mutant> mutateOther(const ProgramGraph& g, const std::string& site) {
  requireSite(g, site);
  Generator gen(g);
  gen.other(site);
  return gen.take();
}

std::vector<Mutant> generateMutants(const ProgramGraph& g) {
  std::vector<Mutant> all = mutateDataflow(g);
  Generator gen(g);
  for (const auto& [id, t] : g.transitions) {
    if (!isSite(t)) continue;
    gen.aggregation(id);
    gen.setLike(id);
    gen.other(id);
  }
  for (auto& m : gen.take()) all.push_back(std::move(m));
  return all;
}

}  // namespace flowalg
