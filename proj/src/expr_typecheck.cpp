#include "flowalg/error.hpp"
#include "flowalg/expr.hpp"

namespace flowalg {

namespace {

using Env = std::map<std::string, ElemType>;

[[noreturn]] void typeError(const Expr& e, const std::string& what) {
  std::string where;
  if (e.pos.line > 0) {
    where = " at " + std::to_string(e.pos.line) + ":" + std::to_string(e.pos.column);
  }
  throw Error(ErrorKind::TypeError, what + " in '" + print(e) + "'" + where);
}

ElemType joinOrFail(const Expr& e, const ElemType& a, const ElemType& b, const char* what) {
  auto u = unify(a, b);
  if (!u) typeError(e, std::string(what) + ": " + a.str() + " vs " + b.str());
  return *u;
}

ElemType check(const Expr& e, Env& env);

ElemType checkBinary(const Expr& e, Env& env) {
  const ElemType l = check(*e.kids[0], env);
  const ElemType r = check(*e.kids[1], env);
  switch (e.binary) {
    case BinaryOp::Add:
    case BinaryOp::Sub:
    case BinaryOp::Mul:
    case BinaryOp::Div:
      if (!l.isNumeric() || !r.isNumeric()) {
        typeError(e, "arithmetic needs numeric operands, got " + l.str() + " and " + r.str());
      }
      return (l.kind == TypeKind::Float || r.kind == TypeKind::Float) ? ElemType::real()
                                                                      : ElemType::integer();
    case BinaryOp::Mod:
      if (l.kind != TypeKind::Int || r.kind != TypeKind::Int) {
        typeError(e, "'%' needs Int operands, got " + l.str() + " and " + r.str());
      }
      return ElemType::integer();
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
      if (!(l.isNumeric() && r.isNumeric())) joinOrFail(e, l, r, "comparison of different types");
      return ElemType::boolean();
    case BinaryOp::And:
    case BinaryOp::Or:
      if (l.kind != TypeKind::Bool || r.kind != TypeKind::Bool) {
        typeError(e, "logical operator needs Bool operands, got " + l.str() + " and " + r.str());
      }
      return ElemType::boolean();
  }
  typeError(e, "unknown operator");
}

ElemType checkCall(const Expr& e, Env& env) {
  switch (e.builtin) {
    case Builtin::EmptyBag: return ElemType::bag(ElemType::unknown());
    case Builtin::Singleton: return ElemType::bag(check(*e.kids[0], env));
    case Builtin::Size: {
      const ElemType t = check(*e.kids[0], env);
      if (!t.isCollection() && t.kind != TypeKind::Str) {
        typeError(e, "size needs a bag, list or string, got " + t.str());
      }
      return ElemType::integer();
    }
    case Builtin::StartsWith:
    case Builtin::Contains: {
      const ElemType a = check(*e.kids[0], env);
      const ElemType b = check(*e.kids[1], env);
      if (a.kind != TypeKind::Str || b.kind != TypeKind::Str) {
        typeError(e, "needs two Str arguments, got " + a.str() + " and " + b.str());
      }
      return ElemType::boolean();
    }
    case Builtin::Concat: {
      const ElemType a = check(*e.kids[0], env);
      const ElemType b = check(*e.kids[1], env);
      const ElemType t = joinOrFail(e, a, b, "concat of different types");
      if (t.kind != TypeKind::Str && !t.isCollection()) {
        typeError(e, "concat needs strings, bags or lists, got " + t.str());
      }
      return t;
    }
    case Builtin::Bmap: {
      const ElemType coll = check(*e.kids[1], env);
      if (!coll.isCollection()) typeError(e, "bmap needs a bag or list, got " + coll.str());
      auto saved = env.find(e.name) != env.end() ? std::optional(env.at(e.name)) : std::nullopt;
      env[e.name] = coll.elem();
      ElemType body;
      try {
        body = check(*e.kids[0], env);
      } catch (...) {
        if (saved) env[e.name] = *saved; else env.erase(e.name);
        throw;
      }
      if (saved) env[e.name] = *saved; else env.erase(e.name);
      return coll.kind == TypeKind::Bag ? ElemType::bag(body) : ElemType::list(body);
    }
  }
  typeError(e, "unknown builtin");
}

ElemType check(const Expr& e, Env& env) {
  switch (e.kind) {
    case ExprKind::Var: {
      auto it = env.find(e.name);
      if (it == env.end()) typeError(e, "unbound variable '" + e.name + "'");
      return it->second;
    }
    case ExprKind::LitInt: return ElemType::integer();
    case ExprKind::LitFloat: return ElemType::real();
    case ExprKind::LitBool: return ElemType::boolean();
    case ExprKind::LitStr: return ElemType::string();
    case ExprKind::Unary: {
      const ElemType t = check(*e.kids[0], env);
      if (e.unary == UnaryOp::Not) {
        if (t.kind != TypeKind::Bool) typeError(e, "'!' needs Bool, got " + t.str());
        return t;
      }
      if (!t.isNumeric()) typeError(e, "negation needs a number, got " + t.str());
      return t;
    }
    case ExprKind::Binary: return checkBinary(e, env);
    case ExprKind::If: {
      const ElemType c = check(*e.kids[0], env);
      if (c.kind != TypeKind::Bool) typeError(e, "condition must be Bool, got " + c.str());
      const ElemType a = check(*e.kids[1], env);
      const ElemType b = check(*e.kids[2], env);
      return joinOrFail(e, a, b, "branches differ");
    }
    case ExprKind::Tuple: {
      std::vector<ElemType> parts;
      for (const auto& k : e.kids) parts.push_back(check(*k, env));
      return ElemType::tuple(std::move(parts));
    }
    case ExprKind::Proj: {
      const ElemType t = check(*e.kids[0], env);
      if (t.kind != TypeKind::Tuple) typeError(e, "projection of non-tuple " + t.str());
      if (e.intValue < 1 || e.intValue > static_cast<std::int64_t>(t.args.size())) {
        throw Error(ErrorKind::ArityError, "projection ." + std::to_string(e.intValue) +
                                               " out of range for " + t.str() + " in '" +
                                               print(e) + "'");
      }
      return t.args[static_cast<std::size_t>(e.intValue - 1)];
    }
    case ExprKind::Call: return checkCall(e, env);
    case ExprKind::BagLit: {
      ElemType elem = ElemType::unknown();
      for (const auto& k : e.kids) elem = joinOrFail(e, elem, check(*k, env), "bag elements differ");
      return ElemType::bag(elem);
    }
  }
  typeError(e, "unknown expression");
}

}  // namespace

ElemType typecheckExpr(const Expr& e, const std::map<std::string, ElemType>& env) {
  Env scope = env;
  return check(e, scope);
}

ElemType typecheckFunc(const FuncDef& f) {
  Env env;
  for (const auto& p : f.params) {
    if (!p.type) {
      throw Error(ErrorKind::TypeError, "parameter '" + p.name + "' of " + print(f) +
                                            " has no type");
    }
    env[p.name] = *p.type;
  }
  ElemType t = check(*f.body, env);
  if (f.returnType) {
    auto u = unify(t, *f.returnType);
    if (!u) {
      throw Error(ErrorKind::TypeError, "function " + print(f) + " returns " + t.str() +
                                            ", expected " + f.returnType->str());
    }
    t = std::move(*u);
  }
  return t;
}

}  // namespace flowalg
