#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flowalg/codec.hpp"
#include "flowalg/error.hpp"
#include "oracles.hpp"

using namespace flowalg;
using oracle::ints;

namespace {

bool throwsKind(ErrorKind kind, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace

TEST_CASE("canonical order is a total order on same-typed values") {
  oracle::Random rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const ElemType t = rng.type();
    const Value a = rng.value(t), b = rng.value(t), c = rng.value(t);
    const auto ab = canonicalCompare(a, b), ba = canonicalCompare(b, a);
    CHECK((ab == 0) == (ba == 0));
    CHECK((ab < 0) == (ba > 0));
    CHECK((ab == 0) == (a == b));
    if (ab <= 0 && canonicalCompare(b, c) <= 0) CHECK(canonicalCompare(a, c) <= 0);
  }
}

TEST_CASE("comparing values of different types is a type mismatch") {
  CHECK(throwsKind(ErrorKind::TypeMismatch, [] { (void)canonicalCompare(Value::integer(1), Value::string("1")); }));
  CHECK(throwsKind(ErrorKind::TypeMismatch, [] { (void)Value::bag({Value::integer(1), Value::real(1.0)}); }));
  CHECK_FALSE(Value::integer(1) == Value::real(1.0));
}

TEST_CASE("bag equality ignores insertion order but not multiplicity") {
  CHECK(ints({3, 1, 2, 1}) == ints({1, 1, 2, 3}));
  CHECK_FALSE(ints({1, 2}) == ints({1, 1, 2}));
  CHECK(multisetEqual(ints({2, 2, 5}), ints({5, 2, 2})));
  CHECK_FALSE(Value::list({Value::integer(1), Value::integer(2)}) ==
              Value::list({Value::integer(2), Value::integer(1)}));
}

TEST_CASE("bag union is a commutative monoid with the empty bag as unit") {
  oracle::Random rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const ElemType t = ElemType::bag(rng.type(1));
    const Value x = rng.value(t, 6), y = rng.value(t, 6), z = rng.value(t, 6);
    CHECK(bagUnion(x, y) == bagUnion(y, x));
    CHECK(bagUnion(bagUnion(x, y), z) == bagUnion(x, bagUnion(y, z)));
    CHECK(bagUnion(x, Value::emptyBag()) == x);
    CHECK(bagUnion(x, y).size() == x.size() + y.size());
  }
}

TEST_CASE("NaN is rejected and negative zero folds into zero") {
  CHECK(throwsKind(ErrorKind::InvalidValue, [] { (void)Value::real(std::nan("")); }));
  const Value z = Value::real(-0.0);
  CHECK_FALSE(std::signbit(z.asFloat()));
  CHECK(z == Value::real(0.0));
  CHECK(encodeValue(z).dump() == "0.0");
}

TEST_CASE("tuples need at least two components") {
  CHECK_THROWS_AS((void)Value::tuple({Value::integer(1)}), Error);
}

TEST_CASE("approximate equality uses an absolute tolerance on floats only") {
  const Value a = Value::bag({Value::real(1.0), Value::real(2.0)});
  const Value b = Value::bag({Value::real(1.0 + 1e-13), Value::real(2.0)});
  CHECK_FALSE(a == b);
  CHECK(approxEqual(a, b, 1e-12));
  CHECK_FALSE(approxEqual(a, b, 1e-14));
  CHECK_FALSE(approxEqual(Value::integer(1), Value::integer(2), 10.0));
}

TEST_CASE("typeOf and conformsTo") {
  const Value v = Value::tuple({Value::string("a"), ints({1, 2})});
  CHECK(typeOf(v) == parseType("Tuple<Str,Bag<Int>>"));
  CHECK(typeOf(Value::emptyBag()) == ElemType::bag(ElemType::unknown()));
  CHECK(conformsTo(Value::emptyBag(), parseType("Bag<Tuple<Int,Str>>")));
  CHECK_FALSE(conformsTo(Value::integer(1), ElemType::real()));
}

TEST_CASE("type grammar round-trips and accepts aliases") {
  oracle::Random rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const ElemType t = rng.type(3);
    CHECK(parseType(t.str()) == t);
  }
  CHECK(parseType("Bag<Tuple<String, Double>>") == parseType("Bag<Tuple<Str,Float>>"));
  CHECK(unify(parseType("Bag<Int>"), ElemType::bag(ElemType::unknown())) == parseType("Bag<Int>"));
  CHECK_FALSE(unify(ElemType::integer(), ElemType::real()).has_value());
}

TEST_CASE("dataset codec round-trips random datasets") {
  oracle::Random rng(14);
  for (int trial = 0; trial < 300; ++trial) {
    const ElemType t = rng.coin() ? ElemType::bag(rng.type()) : ElemType::list(rng.type());
    const Value d = rng.value(t, 6);
    const auto json = encodeDataset(d);
    CHECK(decodeDataset(json, t) == d);
    CHECK(encodeDataset(decodeDataset(json, t)).dump() == json.dump());
  }
}

TEST_CASE("decoding widens integers where floats are declared and checks the type") {
  const auto j = nlohmann::json::parse("[1, 2.5]");
  const Value d = decodeDataset(j, parseType("Bag<Float>"));
  CHECK(d == Value::bag({Value::real(1.0), Value::real(2.5)}));
  CHECK_THROWS_AS((void)decodeDataset(nlohmann::json::parse("[1, \"x\"]"), parseType("Bag<Int>")), Error);
  const Value t = decodeDataset(nlohmann::json::parse(R"([{"tuple": ["a", {"list": [2, 1]}]}])"),
                                parseType("Bag<Tuple<Str,List<Int>>>"));
  CHECK(t[0][1] == Value::list({Value::integer(2), Value::integer(1)}));
}

TEST_CASE("serialization is canonical: element order does not depend on construction order") {
  const Value a = Value::bag({Value::string("b"), Value::string("a"), Value::string("c")});
  CHECK(encodeDataset(a).dump() == R"(["a","b","c"])");
}
