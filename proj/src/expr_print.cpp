#include <charconv>

#include "flowalg/expr.hpp"

namespace flowalg {

namespace {

// Binding strength, loosest first.
enum Prec { kIf = 0, kOr, kAnd, kCmp, kAdd, kMul, kUnary, kPostfix, kAtom };

int precOf(const Expr& e) {
  switch (e.kind) {
    case ExprKind::If: return kIf;
    case ExprKind::Unary: return kUnary;
    case ExprKind::Proj: return kPostfix;
    case ExprKind::LitInt: return e.intValue < 0 ? kUnary : kAtom;
    case ExprKind::LitFloat: return e.floatValue < 0 ? kUnary : kAtom;
    case ExprKind::Binary:
      switch (e.binary) {
        case BinaryOp::Or: return kOr;
        case BinaryOp::And: return kAnd;
        case BinaryOp::Add:
        case BinaryOp::Sub: return kAdd;
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Mod: return kMul;
        default: return kCmp;
      }
    default: return kAtom;
  }
}

const char* binaryText(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

const char* builtinName(Builtin b) {
  switch (b) {
    case Builtin::StartsWith: return "startsWith";
    case Builtin::Contains: return "contains";
    case Builtin::Concat: return "concat";
    case Builtin::Size: return "size";
    case Builtin::Bmap: return "bmap";
    case Builtin::EmptyBag: return "emptyBag";
    case Builtin::Singleton: return "singleton";
  }
  return "?";
}

std::string floatText(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

bool isNumericLiteral(const Expr& e) {
  return e.kind == ExprKind::LitInt || e.kind == ExprKind::LitFloat;
}

void emit(std::string& out, const Expr& e, int minPrec);

void emitList(std::string& out, const std::vector<ExprPtr>& kids) {
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (i) out += ", ";
    emit(out, *kids[i], kIf);
  }
}

void emitBare(std::string& out, const Expr& e) {
  switch (e.kind) {
    case ExprKind::Var: out += e.name; return;
    case ExprKind::LitInt: out += std::to_string(e.intValue); return;
    case ExprKind::LitFloat: out += floatText(e.floatValue); return;
    case ExprKind::LitBool: out += e.boolValue ? "true" : "false"; return;
    case ExprKind::LitStr: out += quote(e.name); return;
    case ExprKind::Unary: {
      out += e.unary == UnaryOp::Not ? "!" : "-";
      const Expr& operand = *e.kids[0];
      // "-5" would read back as a literal, and "--x" is fine but "-(-5)" must keep its parens.
      if (e.unary == UnaryOp::Neg && isNumericLiteral(operand)) {
        out += "(";
        emit(out, operand, kIf);
        out += ")";
      } else {
        emit(out, operand, kUnary);
      }
      return;
    }
    case ExprKind::Binary: {
      const int p = precOf(e);
      emit(out, *e.kids[0], p);
      out += " ";
      out += binaryText(e.binary);
      out += " ";
      emit(out, *e.kids[1], p + 1);
      return;
    }
    case ExprKind::If:
      out += "if ";
      emit(out, *e.kids[0], kIf);
      out += " then ";
      emit(out, *e.kids[1], kIf);
      out += " else ";
      emit(out, *e.kids[2], kIf);
      return;
    case ExprKind::Tuple:
      out += "(";
      emitList(out, e.kids);
      out += ")";
      return;
    case ExprKind::Proj: {
      const Expr& operand = *e.kids[0];
      if (isNumericLiteral(operand)) {
        out += "(";
        emit(out, operand, kIf);
        out += ")";
      } else {
        emit(out, operand, kPostfix);
      }
      out += "." + std::to_string(e.intValue);
      return;
    }
    case ExprKind::Call:
      if (e.builtin == Builtin::EmptyBag) {
        out += "emptyBag";
        return;
      }
      out += builtinName(e.builtin);
      out += "(";
      if (e.builtin == Builtin::Bmap) {
        out += e.name + " -> ";
        emit(out, *e.kids[0], kIf);
        out += ", ";
        emit(out, *e.kids[1], kIf);
      } else {
        emitList(out, e.kids);
      }
      out += ")";
      return;
    case ExprKind::BagLit:
      if (e.kids.empty()) {
        out += "{{}}";
        return;
      }
      out += "{{";
      emitList(out, e.kids);
      out += "}}";
      return;
  }
}

void emit(std::string& out, const Expr& e, int minPrec) {
  if (precOf(e) < minPrec) {
    out += "(";
    emitBare(out, e);
    out += ")";
  } else {
    emitBare(out, e);
  }
}

}  // namespace

std::string print(const Expr& e) {
  std::string out;
  emit(out, e, kIf);
  return out;
}

std::string print(const FuncDef& f) {
  std::string out = "(";
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    if (i) out += ", ";
    out += f.params[i].name;
    if (f.params[i].type) out += ": " + f.params[i].type->str();
  }
  out += ") -> ";
  out += print(*f.body);
  return out;
}

}  // namespace flowalg
