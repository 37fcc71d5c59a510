#include <set>

#include "flowalg/error.hpp"
#include "flowalg/expr.hpp"

namespace flowalg {

namespace {

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

void freeVars(const Expr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  if (e.kind == ExprKind::Var) {
    if (!bound.count(e.name)) out.insert(e.name);
    return;
  }
  if (e.kind == ExprKind::Call && e.builtin == Builtin::Bmap) {
    // kids[0] is the body (binder in scope), kids[1] the collection.
    freeVars(*e.kids[1], bound, out);
    const bool fresh = bound.insert(e.name).second;
    freeVars(*e.kids[0], bound, out);
    if (fresh) bound.erase(e.name);
    return;
  }
  for (const auto& k : e.kids) freeVars(*k, bound, out);
}

std::set<std::string> freeVarsOf(const Expr& e) {
  std::set<std::string> bound, out;
  freeVars(e, bound, out);
  return out;
}

}  // namespace

ExprPtr Expr::var(std::string name) {
  Expr e;
  e.kind = ExprKind::Var;
  e.name = std::move(name);
  return make(std::move(e));
}

ExprPtr Expr::litInt(std::int64_t v) {
  Expr e;
  e.kind = ExprKind::LitInt;
  e.intValue = v;
  return make(std::move(e));
}

ExprPtr Expr::litFloat(double v) {
  Expr e;
  e.kind = ExprKind::LitFloat;
  e.floatValue = v;
  return make(std::move(e));
}

ExprPtr Expr::litBool(bool v) {
  Expr e;
  e.kind = ExprKind::LitBool;
  e.boolValue = v;
  return make(std::move(e));
}

ExprPtr Expr::litStr(std::string v) {
  Expr e;
  e.kind = ExprKind::LitStr;
  e.name = std::move(v);
  return make(std::move(e));
}

ExprPtr Expr::unaryOp(UnaryOp op, ExprPtr operand) {
  Expr e;
  e.kind = ExprKind::Unary;
  e.unary = op;
  e.kids = {std::move(operand)};
  return make(std::move(e));
}

ExprPtr Expr::binaryOp(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  Expr e;
  e.kind = ExprKind::Binary;
  e.binary = op;
  e.kids = {std::move(lhs), std::move(rhs)};
  return make(std::move(e));
}

ExprPtr Expr::ifThenElse(ExprPtr cond, ExprPtr then, ExprPtr otherwise) {
  Expr e;
  e.kind = ExprKind::If;
  e.kids = {std::move(cond), std::move(then), std::move(otherwise)};
  return make(std::move(e));
}

ExprPtr Expr::tuple(std::vector<ExprPtr> parts) {
  Expr e;
  e.kind = ExprKind::Tuple;
  e.kids = std::move(parts);
  return make(std::move(e));
}

ExprPtr Expr::proj(ExprPtr operand, std::int64_t index) {
  Expr e;
  e.kind = ExprKind::Proj;
  e.intValue = index;
  e.kids = {std::move(operand)};
  return make(std::move(e));
}

ExprPtr Expr::call(Builtin fn, std::vector<ExprPtr> args) {
  Expr e;
  e.kind = ExprKind::Call;
  e.builtin = fn;
  e.kids = std::move(args);
  return make(std::move(e));
}

ExprPtr Expr::bmap(std::string binder, ExprPtr body, ExprPtr collection) {
  Expr e;
  e.kind = ExprKind::Call;
  e.builtin = Builtin::Bmap;
  e.name = std::move(binder);
  e.kids = {std::move(body), std::move(collection)};
  return make(std::move(e));
}

ExprPtr Expr::bagLit(std::vector<ExprPtr> elems) {
  Expr e;
  e.kind = ExprKind::BagLit;
  e.kids = std::move(elems);
  return make(std::move(e));
}

bool sameExpr(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
  switch (a.kind) {
    case ExprKind::Var:
    case ExprKind::LitStr:
      if (a.name != b.name) return false;
      break;
    case ExprKind::LitInt:
    case ExprKind::Proj:
      if (a.intValue != b.intValue) return false;
      break;
    case ExprKind::LitFloat:
      if (a.floatValue != b.floatValue) return false;
      break;
    case ExprKind::LitBool:
      if (a.boolValue != b.boolValue) return false;
      break;
    case ExprKind::Unary:
      if (a.unary != b.unary) return false;
      break;
    case ExprKind::Binary:
      if (a.binary != b.binary) return false;
      break;
    case ExprKind::Call:
      if (a.builtin != b.builtin) return false;
      if (a.builtin == Builtin::Bmap && a.name != b.name) return false;
      break;
    case ExprKind::If:
    case ExprKind::Tuple:
    case ExprKind::BagLit: break;
  }
  for (std::size_t i = 0; i < a.kids.size(); ++i) {
    if (!sameExpr(*a.kids[i], *b.kids[i])) return false;
  }
  return true;
}

bool sameFunc(const FuncDef& a, const FuncDef& b) {
  if (a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].name != b.params[i].name) return false;
  }
  return sameExpr(*a.body, *b.body);
}

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& replacements) {
  if (replacements.empty()) return e;
  if (e->kind == ExprKind::Var) {
    auto it = replacements.find(e->name);
    return it == replacements.end() ? e : it->second;
  }
  if (e->kind == ExprKind::Call && e->builtin == Builtin::Bmap) {
    ExprPtr collection = substitute(e->kids[1], replacements);
    auto inner = replacements;
    inner.erase(e->name);

    std::set<std::string> incoming;
    for (const auto& [name, repl] : inner) {
      for (auto& v : freeVarsOf(*repl)) incoming.insert(v);
    }
    std::string binder = e->name;
    ExprPtr body = e->kids[0];
    if (incoming.count(binder)) {
      // Rename the binder so it cannot capture a substituted variable.
      auto taken = freeVarsOf(*body);
      taken.insert(incoming.begin(), incoming.end());
      for (const auto& [name, repl] : inner) taken.insert(name);
      int suffix = 1;
      std::string fresh;
      do {
        fresh = binder + "_" + std::to_string(suffix++);
      } while (taken.count(fresh));
      body = substitute(body, {{binder, Expr::var(fresh)}});
      binder = fresh;
    }
    return Expr::bmap(binder, substitute(body, inner), collection);
  }
  if (e->kids.empty()) return e;
  Expr copy = *e;
  for (auto& k : copy.kids) k = substitute(k, replacements);
  return std::make_shared<const Expr>(std::move(copy));
}

FuncDef bindParams(const FuncDef& f, std::span<const ElemType> types) {
  if (types.size() != f.params.size()) {
    throw Error(ErrorKind::ArityError, "function " + print(f) + " takes " +
                                           std::to_string(f.params.size()) +
                                           " parameter(s), expected " +
                                           std::to_string(types.size()));
  }
  FuncDef out = f;
  for (std::size_t i = 0; i < types.size(); ++i) {
    auto& p = out.params[i];
    if (p.type) {
      auto u = unify(*p.type, types[i]);
      if (!u) {
        throw Error(ErrorKind::TypeError, "parameter '" + p.name + "' is annotated " +
                                              p.type->str() + " but receives " +
                                              types[i].str());
      }
      p.type = std::move(*u);
    } else {
      p.type = types[i];
    }
  }
  return out;
}

}  // namespace flowalg
