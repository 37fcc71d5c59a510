#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowalg/types.hpp"
#include "flowalg/value.hpp"

namespace flowalg {

enum class UnaryOp { Not, Neg };

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

enum class Builtin { StartsWith, Contains, Concat, Size, Bmap, EmptyBag, Singleton };

enum class ExprKind { Var, LitInt, LitFloat, LitBool, LitStr, Unary, Binary, If, Tuple, Proj, Call, BagLit };

struct SourcePos {
  int line = 0;
  int column = 0;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Node of the user-function language. Immutable once built; subtrees are
/// shared between expressions (mutants reuse the original's nodes).
struct Expr {
  ExprKind kind = ExprKind::LitInt;
  std::string name;        // Var name, string literal, or the bmap binder
  std::int64_t intValue = 0;  // LitInt, Proj index (1-based)
  double floatValue = 0.0;
  bool boolValue = false;
  UnaryOp unary = UnaryOp::Not;
  BinaryOp binary = BinaryOp::Add;
  Builtin builtin = Builtin::Size;
  std::vector<ExprPtr> kids;
  SourcePos pos;

  static ExprPtr var(std::string name);
  static ExprPtr litInt(std::int64_t v);
  static ExprPtr litFloat(double v);
  static ExprPtr litBool(bool v);
  static ExprPtr litStr(std::string v);
  static ExprPtr unaryOp(UnaryOp op, ExprPtr operand);
  static ExprPtr binaryOp(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
  static ExprPtr ifThenElse(ExprPtr cond, ExprPtr then, ExprPtr otherwise);
  static ExprPtr tuple(std::vector<ExprPtr> parts);
  static ExprPtr proj(ExprPtr operand, std::int64_t index);
  static ExprPtr call(Builtin fn, std::vector<ExprPtr> args);
  static ExprPtr bmap(std::string binder, ExprPtr body, ExprPtr collection);
  static ExprPtr bagLit(std::vector<ExprPtr> elems);
};

/// Structural equality (source positions ignored).
bool sameExpr(const Expr& a, const Expr& b);

struct Param {
  std::string name;
  std::optional<ElemType> type;

  friend bool operator==(const Param&, const Param&) = default;
};

/// A user function `(p1, ..., pk) -> body`. Parameter types may be left
/// open in source and filled in from the transformation's input types.
struct FuncDef {
  std::vector<Param> params;
  ExprPtr body;
  std::optional<ElemType> returnType;
};

bool sameFunc(const FuncDef& a, const FuncDef& b);

ExprPtr parseExpr(std::string_view source);

/// Accepts `x -> e`, `(x, y) -> e` and annotated `(x: Int, y: Int) -> e`.
FuncDef parseFunc(std::string_view source);

/// Minimal-parenthesis rendering; `parseExpr(print(e))` rebuilds `e`.
std::string print(const Expr& e);
std::string print(const FuncDef& f);

/// Copy of `f` with every parameter typed. Conflicting annotations raise
/// TypeError.
FuncDef bindParams(const FuncDef& f, std::span<const ElemType> types);

/// Inferred type of `f`'s body; every parameter must be typed. When
/// `returnType` is set the inferred type must agree with it.
ElemType typecheckFunc(const FuncDef& f);

/// Type of `e` under a variable environment.
ElemType typecheckExpr(const Expr& e, const std::map<std::string, ElemType>& env);

Value evalFunc(const FuncDef& f, std::span<const Value> args);
Value evalExpr(const Expr& e, const std::map<std::string, Value>& env);

/// Capture-avoiding simultaneous substitution of free variables.
ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& replacements);

}  // namespace flowalg
