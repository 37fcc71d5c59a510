#include <cmath>
#include <limits>

#include "flowalg/error.hpp"
#include "flowalg/expr.hpp"

namespace flowalg {

namespace {

using Env = std::map<std::string, Value>;

[[noreturn]] void runtimeFault(ErrorKind kind, const Expr& e, const std::string& what) {
  throw Error(kind, what + " in '" + print(e) + "'");
}

double toDouble(const Value& v) {
  return v.tag() == Tag::Int ? static_cast<double>(v.asInt()) : v.asFloat();
}

Value floatResult(const Expr& e, double r) {
  if (!std::isfinite(r)) runtimeFault(ErrorKind::Overflow, e, "non-finite float result");
  return Value::real(r);
}

Value arithmetic(const Expr& e, const Value& l, const Value& r) {
  if (l.tag() == Tag::Int && r.tag() == Tag::Int) {
    const std::int64_t a = l.asInt(), b = r.asInt();
    std::int64_t out = 0;
    switch (e.binary) {
      case BinaryOp::Add:
        if (__builtin_add_overflow(a, b, &out)) runtimeFault(ErrorKind::Overflow, e, "integer overflow");
        return Value::integer(out);
      case BinaryOp::Sub:
        if (__builtin_sub_overflow(a, b, &out)) runtimeFault(ErrorKind::Overflow, e, "integer overflow");
        return Value::integer(out);
      case BinaryOp::Mul:
        if (__builtin_mul_overflow(a, b, &out)) runtimeFault(ErrorKind::Overflow, e, "integer overflow");
        return Value::integer(out);
      case BinaryOp::Div:
      case BinaryOp::Mod:
        if (b == 0) runtimeFault(ErrorKind::DivisionByZero, e, "division by zero");
        if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
          runtimeFault(ErrorKind::Overflow, e, "integer overflow");
        }
        // C++ integer division truncates toward zero.
        return Value::integer(e.binary == BinaryOp::Div ? a / b : a % b);
      default: break;
    }
  }
  const double a = toDouble(l), b = toDouble(r);
  switch (e.binary) {
    case BinaryOp::Add: return floatResult(e, a + b);
    case BinaryOp::Sub: return floatResult(e, a - b);
    case BinaryOp::Mul: return floatResult(e, a * b);
    case BinaryOp::Div:
      if (b == 0.0) runtimeFault(ErrorKind::DivisionByZero, e, "division by zero");
      return floatResult(e, a / b);
    default: break;
  }
  runtimeFault(ErrorKind::TypeError, e, "bad arithmetic operands");
}

std::strong_ordering order(const Value& l, const Value& r) {
  const bool ln = l.tag() == Tag::Int || l.tag() == Tag::Float;
  const bool rn = r.tag() == Tag::Int || r.tag() == Tag::Float;
  if (ln && rn && l.tag() != r.tag()) {
    const double a = toDouble(l), b = toDouble(r);
    return a < b ? std::strong_ordering::less
                 : (b < a ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  return compareUnchecked(l, r);
}

Value eval(const Expr& e, Env& env);

Value evalBinary(const Expr& e, Env& env) {
  if (e.binary == BinaryOp::And || e.binary == BinaryOp::Or) {
    const bool l = eval(*e.kids[0], env).asBool();
    if (e.binary == BinaryOp::And && !l) return Value::boolean(false);
    if (e.binary == BinaryOp::Or && l) return Value::boolean(true);
    return Value::boolean(eval(*e.kids[1], env).asBool());
  }
  const Value l = eval(*e.kids[0], env);
  const Value r = eval(*e.kids[1], env);
  switch (e.binary) {
    case BinaryOp::Eq: return Value::boolean(order(l, r) == 0);
    case BinaryOp::Ne: return Value::boolean(order(l, r) != 0);
    case BinaryOp::Lt: return Value::boolean(order(l, r) < 0);
    case BinaryOp::Le: return Value::boolean(order(l, r) <= 0);
    case BinaryOp::Gt: return Value::boolean(order(l, r) > 0);
    case BinaryOp::Ge: return Value::boolean(order(l, r) >= 0);
    default: return arithmetic(e, l, r);
  }
}

Value evalCall(const Expr& e, Env& env) {
  switch (e.builtin) {
    case Builtin::EmptyBag: return Value::emptyBag();
    case Builtin::Singleton: return Value::bagTrusted({eval(*e.kids[0], env)}, true);
    case Builtin::Size: {
      const Value v = eval(*e.kids[0], env);
      if (v.tag() == Tag::Str) return Value::integer(static_cast<std::int64_t>(v.asStr().size()));
      return Value::integer(static_cast<std::int64_t>(v.size()));
    }
    case Builtin::StartsWith: {
      const Value s = eval(*e.kids[0], env);
      const Value p = eval(*e.kids[1], env);
      return Value::boolean(s.asStr().starts_with(p.asStr()));
    }
    case Builtin::Contains: {
      const Value s = eval(*e.kids[0], env);
      const Value p = eval(*e.kids[1], env);
      return Value::boolean(s.asStr().find(p.asStr()) != std::string::npos);
    }
    case Builtin::Concat: {
      const Value a = eval(*e.kids[0], env);
      const Value b = eval(*e.kids[1], env);
      if (a.tag() == Tag::Str) return Value::string(a.asStr() + b.asStr());
      if (a.isBag()) return bagUnion(a, b);
      std::vector<Value> out(a.items().begin(), a.items().end());
      out.insert(out.end(), b.items().begin(), b.items().end());
      return Value::list(std::move(out));
    }
    case Builtin::Bmap: {
      const Value coll = eval(*e.kids[1], env);
      auto saved = env.find(e.name) != env.end() ? std::optional(env.at(e.name)) : std::nullopt;
      std::vector<Value> out;
      out.reserve(coll.size());
      try {
        for (const auto& x : coll.items()) {
          env.insert_or_assign(e.name, x);
          out.push_back(eval(*e.kids[0], env));
        }
      } catch (...) {
        if (saved) env.insert_or_assign(e.name, *saved); else env.erase(e.name);
        throw;
      }
      if (saved) env.insert_or_assign(e.name, *saved); else env.erase(e.name);
      return coll.isBag() ? Value::bag(std::move(out)) : Value::list(std::move(out));
    }
  }
  runtimeFault(ErrorKind::TypeError, e, "unknown builtin");
}

Value eval(const Expr& e, Env& env) {
  switch (e.kind) {
    case ExprKind::Var: {
      auto it = env.find(e.name);
      if (it == env.end()) runtimeFault(ErrorKind::TypeError, e, "unbound variable");
      return it->second;
    }
    case ExprKind::LitInt: return Value::integer(e.intValue);
    case ExprKind::LitFloat: return Value::real(e.floatValue);
    case ExprKind::LitBool: return Value::boolean(e.boolValue);
    case ExprKind::LitStr: return Value::string(e.name);
    case ExprKind::Unary: {
      const Value v = eval(*e.kids[0], env);
      if (e.unary == UnaryOp::Not) return Value::boolean(!v.asBool());
      if (v.tag() == Tag::Int) {
        if (v.asInt() == std::numeric_limits<std::int64_t>::min()) {
          runtimeFault(ErrorKind::Overflow, e, "integer overflow");
        }
        return Value::integer(-v.asInt());
      }
      return Value::real(-v.asFloat());
    }
    case ExprKind::Binary: return evalBinary(e, env);
    case ExprKind::If:
      return eval(*e.kids[0], env).asBool() ? eval(*e.kids[1], env) : eval(*e.kids[2], env);
    case ExprKind::Tuple: {
      std::vector<Value> parts;
      parts.reserve(e.kids.size());
      for (const auto& k : e.kids) parts.push_back(eval(*k, env));
      return Value::tuple(std::move(parts));
    }
    case ExprKind::Proj: {
      const Value t = eval(*e.kids[0], env);
      if (!t.isTuple() || e.intValue < 1 || e.intValue > static_cast<std::int64_t>(t.size())) {
        runtimeFault(ErrorKind::ArityError, e, "bad projection");
      }
      return t[static_cast<std::size_t>(e.intValue - 1)];
    }
    case ExprKind::Call: return evalCall(e, env);
    case ExprKind::BagLit: {
      std::vector<Value> elems;
      for (const auto& k : e.kids) elems.push_back(eval(*k, env));
      return Value::bag(std::move(elems));
    }
  }
  runtimeFault(ErrorKind::TypeError, e, "unknown expression");
}

}  // namespace

Value evalExpr(const Expr& e, const std::map<std::string, Value>& env) {
  Env scope = env;
  return eval(e, scope);
}

Value evalFunc(const FuncDef& f, std::span<const Value> args) {
  if (args.size() != f.params.size()) {
    throw Error(ErrorKind::ArityError, "function " + print(f) + " applied to " +
                                           std::to_string(args.size()) + " argument(s)");
  }
  Env env;
  for (std::size_t i = 0; i < args.size(); ++i) env.insert_or_assign(f.params[i].name, args[i]);
  return eval(*f.body, env);
}

}  // namespace flowalg
