#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "flowalg/error.hpp"
#include "flowalg/expr.hpp"
#include "oracles.hpp"

using namespace flowalg;
using oracle::ints;

namespace {

Value run(std::string_view src, std::vector<Value> args) { return evalFunc(parseFunc(src), args); }

ElemType typeOfFunc(std::string_view src, std::vector<ElemType> params) {
  return typecheckFunc(bindParams(parseFunc(src), params));
}

ErrorKind failure(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

// Random syntax trees. Literals are non-negative because `-3` is read back
// as negation applied to 3.
ExprPtr randomExpr(oracle::Random& rng, int depth) {
  static const char* vars[] = {"x", "y", "zs"};
  if (depth == 0 || rng.integer(0, 4) == 0) {
    switch (rng.integer(0, 4)) {
      case 0: return Expr::litInt(rng.integer(0, 99));
      case 1: return Expr::litFloat(static_cast<double>(rng.integer(0, 40)) / 8.0);
      case 2: return Expr::litBool(rng.coin());
      case 3: return Expr::litStr(rng.coin() ? "a\"b" : "host");
      default: return Expr::var(vars[rng.index(3)]);
    }
  }
  static const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Mod,
                                 BinaryOp::Eq,  BinaryOp::Ne,  BinaryOp::Lt,  BinaryOp::Le,  BinaryOp::Gt,
                                 BinaryOp::Ge,  BinaryOp::And, BinaryOp::Or};
  const auto sub = [&] { return randomExpr(rng, depth - 1); };
  switch (rng.integer(0, 7)) {
    case 0: return Expr::unaryOp(rng.coin() ? UnaryOp::Not : UnaryOp::Neg, sub());
    case 1: return Expr::ifThenElse(sub(), sub(), sub());
    case 2: return Expr::tuple({sub(), sub()});
    case 3: return Expr::proj(sub(), rng.integer(1, 2));
    case 4: return Expr::call(Builtin::Size, {sub()});
    case 5: return Expr::bmap("w", sub(), sub());
    case 6: return Expr::bagLit({sub(), sub()});
    default: return Expr::binaryOp(ops[rng.index(std::size(ops))], sub(), sub());
  }
}

}  // namespace

TEST_CASE("print then parse rebuilds random expressions") {
  oracle::Random rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const ExprPtr e = randomExpr(rng, 4);
    const std::string text = print(*e);
    const ExprPtr back = parseExpr(text);
    INFO(text);
    CHECK(sameExpr(*e, *back));
    CHECK(print(*back) == text);
  }
}

TEST_CASE("function syntax forms") {
  const FuncDef f = parseFunc("(x: Int, y) -> x + y");
  REQUIRE(f.params.size() == 2);
  CHECK(f.params[0].type == ElemType::integer());
  CHECK_FALSE(f.params[1].type.has_value());
  CHECK(parseFunc("x -> x").params.size() == 1);
  CHECK(print(parseFunc("(a, b) -> a * (b + 1)")) == "(a, b) -> a * (b + 1)");
}

TEST_CASE("syntax errors carry a position") {
  try {
    (void)parseFunc("x -> (x + ");
    FAIL("no error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() > 5);
  }
  CHECK(failure([] { (void)parseExpr("1 +* 2"); }) == ErrorKind::SyntaxError);
  CHECK(failure([] { (void)parseExpr("\"open"); }) == ErrorKind::SyntaxError);
}

TEST_CASE("typing of builtins and operators") {
  CHECK(typeOfFunc("x -> x >= 3", {ElemType::integer()}) == ElemType::boolean());
  CHECK(typeOfFunc("(a, b) -> a + b", {ElemType::integer(), ElemType::real()}) == ElemType::real());
  CHECK(typeOfFunc("p -> (p.2, p.1)", {parseType("Tuple<Str,Int>")}) == parseType("Tuple<Int,Str>"));
  CHECK(typeOfFunc("s -> startsWith(s, \"h\") && !contains(s, \"b\")", {ElemType::string()}) ==
        ElemType::boolean());
  CHECK(typeOfFunc("u -> bmap(v -> (v, 1.0), u)", {parseType("Bag<Str>")}) == parseType("Bag<Tuple<Str,Float>>"));
  CHECK(typeOfFunc("x -> {{x, x}}", {ElemType::string()}) == parseType("Bag<Str>"));
  CHECK(typeOfFunc("x -> if x then emptyBag else {{1}}", {ElemType::boolean()}) == parseType("Bag<Int>"));
  CHECK(typeOfFunc("xs -> size(xs)", {parseType("Bag<Int>")}) == ElemType::integer());
}

TEST_CASE("type errors are reported before evaluation") {
  CHECK(failure([] { (void)typeOfFunc("x -> x + \"a\"", {ElemType::integer()}); }) == ErrorKind::TypeError);
  CHECK(failure([] { (void)typeOfFunc("x -> if x then 1 else 2", {ElemType::integer()}); }) == ErrorKind::TypeError);
  CHECK(failure([] { (void)typeOfFunc("p -> p.3", {parseType("Tuple<Int,Int>")}); }) != ErrorKind::Io);
  CHECK(failure([] { (void)typeOfFunc("x -> y", {ElemType::integer()}); }) == ErrorKind::TypeError);
  CHECK(failure([] { (void)typeOfFunc("x -> {{1, \"a\"}}", {ElemType::integer()}); }) != ErrorKind::Io);
  CHECK(failure([] { (void)bindParams(parseFunc("(x: Str) -> x"), std::vector{ElemType::integer()}); }) ==
        ErrorKind::TypeError);
}

TEST_CASE("integer arithmetic: truncating division, checked overflow, division by zero") {
  CHECK(run("(a, b) -> a / b", {Value::integer(-7), Value::integer(2)}) == Value::integer(-3));
  CHECK(run("(a, b) -> a % b", {Value::integer(-7), Value::integer(2)}) == Value::integer(-1));
  CHECK(run("(a, b) -> a / b", {Value::real(7.0), Value::integer(2)}) == Value::real(3.5));
  const auto big = Value::integer(std::numeric_limits<std::int64_t>::max());
  CHECK(failure([&] { (void)run("x -> x + 1", {big}); }) == ErrorKind::Overflow);
  CHECK(failure([&] { (void)run("x -> x * 2", {big}); }) == ErrorKind::Overflow);
  CHECK(failure([] { (void)run("x -> x / 0", {Value::integer(1)}); }) == ErrorKind::DivisionByZero);
  CHECK(failure([] { (void)run("x -> x / 0.0", {Value::real(1.0)}); }) == ErrorKind::DivisionByZero);
}

TEST_CASE("integer evaluation agrees with plain C++ on random operands") {
  oracle::Random rng(22);
  const FuncDef f = parseFunc("(a, b) -> if a < b then a * b - a % b else (a + b) / b");
  for (int trial = 0; trial < 500; ++trial) {
    const std::int64_t a = rng.integer(-1000, 1000), b = rng.integer(-1000, 1000);
    if (b == 0) continue;
    const std::int64_t want = a < b ? a * b - a % b : (a + b) / b;
    CHECK(evalFunc(f, std::vector{Value::integer(a), Value::integer(b)}) == Value::integer(want));
  }
}

TEST_CASE("logical operators short-circuit") {
  CHECK(run("x -> x != 0 && 10 / x > 1", {Value::integer(0)}) == Value::boolean(false));
  CHECK(run("x -> x == 0 || 10 / x > 1", {Value::integer(0)}) == Value::boolean(true));
  CHECK(run("x -> not (x > 1 and x < 5)", {Value::integer(3)}) == Value::boolean(false));
}

TEST_CASE("bag builtins") {
  CHECK(run("xs -> bmap(x -> x * 10, xs)", {ints({1, 2, 2})}) == ints({10, 20, 20}));
  CHECK(run("x -> singleton(x)", {Value::integer(4)}) == ints({4}));
  CHECK(run("xs -> size(xs)", {ints({1, 1, 1})}) == Value::integer(3));
  CHECK(run("(a, b) -> concat(a, b)", {Value::string("ab"), Value::string("c")}) == Value::string("abc"));
  CHECK(run("x -> {{x, 1, x}}", {Value::integer(2)}) == ints({1, 2, 2}));
}

TEST_CASE("wrong number of arguments is an arity error") {
  CHECK(failure([] { (void)run("(a, b) -> a", {Value::integer(1)}); }) == ErrorKind::ArityError);
}

TEST_CASE("substitution avoids capturing bound variables") {
  // Replacing y by the free variable w must rename the binder w.
  const ExprPtr e = parseExpr("bmap(w -> w + y, xs)");
  const ExprPtr s = substitute(e, {{"y", Expr::var("w")}});
  const Value got = evalExpr(*s, {{"w", Value::integer(100)}, {"xs", ints({1, 2})}});
  CHECK(got == ints({101, 102}));
  // A bound occurrence is never replaced.
  const ExprPtr t = substitute(parseExpr("bmap(y -> y, xs)"), {{"y", Expr::litInt(7)}});
  CHECK(evalExpr(*t, {{"xs", ints({1, 2})}}) == ints({1, 2}));
}

TEST_CASE("simultaneous substitution swaps variables") {
  const ExprPtr e = parseExpr("x - y");
  const ExprPtr s = substitute(e, {{"x", Expr::var("y")}, {"y", Expr::var("x")}});
  CHECK(print(*s) == "y - x");
}
