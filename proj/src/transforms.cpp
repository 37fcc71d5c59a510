#include "flowalg/transforms.hpp"

#include <array>

#include "flowalg/error.hpp"

namespace flowalg {

namespace {

struct KindInfo {
  TransformKind kind;
  const char* name;
  int arity;
};

constexpr std::array<KindInfo, 22> kKinds{{
    {TransformKind::Map, "map", 1},
    {TransformKind::FlatMap, "flatMap", 1},
    {TransformKind::Filter, "filter", 1},
    {TransformKind::GroupBy, "groupBy", 1},
    {TransformKind::GroupByKey, "groupByKey", 1},
    {TransformKind::Union, "union", 2},
    {TransformKind::Intersection, "intersection", 2},
    {TransformKind::Subtract, "subtract", 2},
    {TransformKind::Distinct, "distinct", 1},
    {TransformKind::Reduce, "reduce", 1},
    {TransformKind::ReduceByKey, "reduceByKey", 1},
    {TransformKind::InnerJoin, "innerJoin", 2},
    {TransformKind::LeftOuterJoin, "leftOuterJoin", 2},
    {TransformKind::RightOuterJoin, "rightOuterJoin", 2},
    {TransformKind::FullOuterJoin, "fullOuterJoin", 2},
    {TransformKind::OrderBy, "orderBy", 1},
    {TransformKind::OrderByKey, "orderByKey", 1},
    {TransformKind::Iterate, "iterate", 1},
    {TransformKind::IterateWithCondition, "iterateWithCondition", 1},
    {TransformKind::Identity, "identity", 1},
    {TransformKind::LoopGuard, "loopGuard", 1},
    {TransformKind::LoopSelect, "loopSelect", 2},
}};

const KindInfo& info(TransformKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k;
  }
  throw Error(ErrorKind::InvalidProgram, "unknown transformation kind");
}

[[noreturn]] void sigError(const Transformation& t, const std::string& what) {
  throw Error(ErrorKind::TypeError, std::string(kindName(t.kind)) + ": " + what);
}

const ElemType& bagElem(const Transformation& t, const ElemType& place) {
  if (place.kind != TypeKind::Bag) sigError(t, "expects a Bag dataset, got " + place.str());
  return place.elem();
}

// Splits Tuple<k,v>; Unknown stays Unknown on both sides.
std::pair<ElemType, ElemType> keyed(const Transformation& t, const ElemType& elem) {
  if (elem.kind == TypeKind::Unknown) return {ElemType::unknown(), ElemType::unknown()};
  if (elem.kind != TypeKind::Tuple || elem.args.size() != 2) {
    sigError(t, "expects key/value pairs, got elements of type " + elem.str());
  }
  return {elem.args[0], elem.args[1]};
}

const FuncDef& needFn(const Transformation& t) {
  if (!t.fn) sigError(t, "missing function parameter");
  return *t.fn;
}

ElemType checkFn(const Transformation& t, std::vector<ElemType> params,
                 std::optional<ElemType> ret) {
  FuncDef f = bindParams(needFn(t), params);
  if (ret) f.returnType = std::move(ret);
  return typecheckFunc(f);
}

Value single(Value v) { return Value::bagTrusted({std::move(v)}, true); }

const FuncDef& fnOf(const Transformation& t) {
  if (!t.fn) throw Error(ErrorKind::InvalidProgram, std::string(kindName(t.kind)) + " needs a function");
  return *t.fn;
}

}  // namespace

std::string_view kindName(TransformKind kind) { return info(kind).name; }

std::optional<TransformKind> kindFromName(std::string_view name) {
  for (const auto& k : kKinds) {
    if (name == k.name) return k.kind;
  }
  return std::nullopt;
}

int arity(TransformKind kind) { return info(kind).arity; }

bool isSetLike(TransformKind kind) {
  return kind == TransformKind::Union || kind == TransformKind::Intersection ||
         kind == TransformKind::Subtract;
}

bool isJoin(TransformKind kind) {
  return kind == TransformKind::InnerJoin || kind == TransformKind::LeftOuterJoin ||
         kind == TransformKind::RightOuterJoin || kind == TransformKind::FullOuterJoin;
}

bool isAggregation(TransformKind kind) {
  return kind == TransformKind::Reduce || kind == TransformKind::ReduceByKey;
}

std::string Transformation::str() const {
  std::string out(kindName(kind));
  std::vector<std::string> args;
  if (fn) args.push_back(print(*fn));
  if (kind == TransformKind::OrderBy || kind == TransformKind::OrderByKey) {
    args.push_back(descending ? "desc" : "asc");
  }
  if (kind == TransformKind::Iterate || kind == TransformKind::IterateWithCondition) {
    args.push_back("n=" + std::to_string(n));
  }
  if (args.empty()) return out;
  out += "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += args[i];
  }
  return out + ")";
}

bool sameTransformation(const Transformation& a, const Transformation& b) {
  if (a.kind != b.kind || a.descending != b.descending || a.n != b.n) return false;
  if (a.fn.has_value() != b.fn.has_value()) return false;
  return !a.fn || sameFunc(*a.fn, *b.fn);
}

ElemType outputType(const Transformation& t, std::span<const ElemType> inputs) {
  if (static_cast<int>(inputs.size()) != arity(t.kind)) {
    sigError(t, "takes " + std::to_string(arity(t.kind)) + " input(s), got " +
                    std::to_string(inputs.size()));
  }
  switch (t.kind) {
    case TransformKind::Identity: return inputs[0];
    case TransformKind::Map: {
      const ElemType& a = bagElem(t, inputs[0]);
      return ElemType::bag(checkFn(t, {a}, std::nullopt));
    }
    case TransformKind::FlatMap: {
      const ElemType& a = bagElem(t, inputs[0]);
      ElemType r = checkFn(t, {a}, ElemType::bag(ElemType::unknown()));
      return r;
    }
    case TransformKind::Filter: {
      const ElemType& a = bagElem(t, inputs[0]);
      checkFn(t, {a}, ElemType::boolean());
      return inputs[0];
    }
    case TransformKind::GroupBy: {
      const ElemType& a = bagElem(t, inputs[0]);
      ElemType key = checkFn(t, {a}, std::nullopt);
      return ElemType::bag(ElemType::tuple({key, ElemType::bag(a)}));
    }
    case TransformKind::GroupByKey: {
      auto [k, v] = keyed(t, bagElem(t, inputs[0]));
      return ElemType::bag(ElemType::tuple({k, ElemType::bag(v)}));
    }
    case TransformKind::Union:
    case TransformKind::Intersection:
    case TransformKind::Subtract:
    case TransformKind::LoopSelect: {
      const ElemType& a = bagElem(t, inputs[0]);
      const ElemType& b = bagElem(t, inputs[1]);
      auto u = unify(a, b);
      if (!u) {
        throw Error(ErrorKind::TypeMismatch, std::string(kindName(t.kind)) +
                                                 ": element types differ: " + a.str() +
                                                 " vs " + b.str());
      }
      return ElemType::bag(*u);
    }
    case TransformKind::Distinct: bagElem(t, inputs[0]); return inputs[0];
    case TransformKind::Reduce: {
      const ElemType& a = bagElem(t, inputs[0]);
      return ElemType::bag(checkFn(t, {a, a}, a));
    }
    case TransformKind::ReduceByKey: {
      auto [k, v] = keyed(t, bagElem(t, inputs[0]));
      ElemType r = checkFn(t, {v, v}, v);
      return ElemType::bag(ElemType::tuple({k, r}));
    }
    case TransformKind::InnerJoin:
    case TransformKind::LeftOuterJoin:
    case TransformKind::RightOuterJoin:
    case TransformKind::FullOuterJoin: {
      auto [kx, a] = keyed(t, bagElem(t, inputs[0]));
      auto [ky, b] = keyed(t, bagElem(t, inputs[1]));
      auto k = unify(kx, ky);
      if (!k) {
        throw Error(ErrorKind::TypeMismatch, std::string(kindName(t.kind)) +
                                                 ": key types differ: " + kx.str() + " vs " +
                                                 ky.str());
      }
      ElemType left = a, right = b;
      if (t.kind == TransformKind::LeftOuterJoin || t.kind == TransformKind::FullOuterJoin) {
        right = ElemType::bag(b);
      }
      if (t.kind == TransformKind::RightOuterJoin || t.kind == TransformKind::FullOuterJoin) {
        left = ElemType::bag(a);
      }
      return ElemType::bag(ElemType::tuple({*k, ElemType::tuple({left, right})}));
    }
    case TransformKind::OrderBy: return ElemType::list(bagElem(t, inputs[0]));
    case TransformKind::OrderByKey: {
      const ElemType& a = bagElem(t, inputs[0]);
      keyed(t, a);
      return ElemType::list(a);
    }
    case TransformKind::LoopGuard:
      bagElem(t, inputs[0]);
      checkFn(t, {inputs[0]}, ElemType::boolean());
      return inputs[0];
    case TransformKind::Iterate:
    case TransformKind::IterateWithCondition:
      sigError(t, "iterations are declared as loop subnets, not as single transitions");
  }
  sigError(t, "unknown kind");
}

Value applyMap(const FuncDef& f, const Value& d) {
  return algebra::flatmap([&](const Value& x) { return single(evalFunc(f, std::span(&x, 1))); }, d);
}

Value applyFlatMap(const FuncDef& f, const Value& d) { return algebra::flatmap(f, d); }

Value applyFilter(const FuncDef& p, const Value& d) {
  return algebra::flatmap(
      [&](const Value& x) {
        return evalFunc(p, std::span(&x, 1)).asBool() ? single(x) : Value::emptyBag();
      },
      d);
}

Value applyGroupBy(const FuncDef& k, const Value& d) {
  return algebra::groupby(algebra::flatmap(
      [&](const Value& x) { return single(Value::tuple({evalFunc(k, std::span(&x, 1)), x})); },
      d));
}

Value applyGroupByKey(const Value& d) { return algebra::groupby(d); }

Value applyUnion(const Value& dx, const Value& dy) { return bagUnion(dx, dy); }

Value applyIntersection(const Value& dx, const Value& dy) {
  if (!unify(typeOf(dx), typeOf(dy))) {
    throw Error(ErrorKind::TypeMismatch, "intersection of " + typeOf(dx).str() + " and " + typeOf(dy).str());
  }
  return algebra::flatmap(
      [&](const Value& x) {
        const bool found = algebra::someAll(
            algebra::Quantifier::Exists, [&](const Value& y) { return x == y; }, dy);
        return found ? single(x) : Value::emptyBag();
      },
      dx);
}

Value applySubtract(const Value& dx, const Value& dy) {
  if (!unify(typeOf(dx), typeOf(dy))) {
    throw Error(ErrorKind::TypeMismatch, "subtract of " + typeOf(dx).str() + " and " + typeOf(dy).str());
  }
  return algebra::flatmap(
      [&](const Value& x) {
        const bool absent = algebra::someAll(
            algebra::Quantifier::Forall, [&](const Value& y) { return !(x == y); }, dy);
        return absent ? single(x) : Value::emptyBag();
      },
      dx);
}

Value applyDistinct(const Value& d) {
  const Value keyed = algebra::flatmap([](const Value& x) { return single(Value::tuple({x, x})); }, d);
  return algebra::flatmap([](const Value& kg) { return single(kg[0]); }, algebra::groupby(keyed));
}

Value applyReduce(const FuncDef& f, const Value& d) { return single(algebra::reduce(f, d)); }

Value applyReduceByKey(const FuncDef& f, const Value& d) {
  return algebra::flatmap(
      [&](const Value& kg) { return single(Value::tuple({kg[0], algebra::reduce(f, kg[1])})); },
      algebra::groupby(d));
}

namespace {

// The four joins share the cogroup-then-flatmap skeleton; `perKey` builds the
// result bag for one key from its two groups.
template <class PerKey>
Value joinVia(const Value& dx, const Value& dy, PerKey perKey) {
  return algebra::flatmap(
      [&](const Value& entry) {
        const Value& k = entry[0];
        const Value& groups = entry[1];
        return perKey(k, groups[0], groups[1]);
      },
      algebra::cogroup(dx, dy));
}

Value crossWith(const Value& k, const Value& xs, const Value& ys, bool wrapLeft, bool wrapRight) {
  return algebra::flatmap(
      [&](const Value& x) {
        return algebra::flatmap(
            [&](const Value& y) {
              return single(Value::tuple({k, Value::tuple({wrapLeft ? single(x) : x,
                                                           wrapRight ? single(y) : y})}));
            },
            ys);
      },
      xs);
}

}  // namespace

Value applyInnerJoin(const Value& dx, const Value& dy) {
  return joinVia(dx, dy, [](const Value& k, const Value& xs, const Value& ys) {
    return crossWith(k, xs, ys, false, false);
  });
}

Value applyLeftOuterJoin(const Value& dx, const Value& dy) {
  return joinVia(dx, dy, [](const Value& k, const Value& xs, const Value& ys) {
    if (ys.empty()) {
      return algebra::flatmap(
          [&](const Value& x) { return single(Value::tuple({k, Value::tuple({x, Value::emptyBag()})})); },
          xs);
    }
    return crossWith(k, xs, ys, false, true);
  });
}

Value applyRightOuterJoin(const Value& dx, const Value& dy) {
  return joinVia(dx, dy, [](const Value& k, const Value& xs, const Value& ys) {
    if (xs.empty()) {
      return algebra::flatmap(
          [&](const Value& y) { return single(Value::tuple({k, Value::tuple({Value::emptyBag(), y})})); },
          ys);
    }
    return crossWith(k, xs, ys, true, false);
  });
}

Value applyFullOuterJoin(const Value& dx, const Value& dy) {
  return joinVia(dx, dy, [](const Value& k, const Value& xs, const Value& ys) {
    if (!xs.empty() && ys.empty()) {
      return algebra::flatmap(
          [&](const Value& x) {
            return single(Value::tuple({k, Value::tuple({single(x), Value::emptyBag()})}));
          },
          xs);
    }
    if (xs.empty() && !ys.empty()) {
      return algebra::flatmap(
          [&](const Value& y) {
            return single(Value::tuple({k, Value::tuple({Value::emptyBag(), single(y)})}));
          },
          ys);
    }
    return crossWith(k, xs, ys, true, true);
  });
}

Value applyOrderBy(bool descending, const Value& d) {
  const Value keyed = algebra::flatmap([](const Value& x) { return single(Value::tuple({x, x})); }, d);
  const Value sorted = algebra::orderby(keyed, descending);
  std::vector<Value> out;
  out.reserve(sorted.size());
  for (const auto& kv : sorted.items()) out.push_back(kv[0]);
  return Value::list(std::move(out));
}

Value applyOrderByKey(bool descending, const Value& d) { return algebra::orderby(d, descending); }

Value applyIterate(const algebra::StepFunction& st, std::int64_t n, const Value& d) {
  if (n < 0) throw Error(ErrorKind::NegativeIterations, "iterate with n = " + std::to_string(n));
  return algebra::repeat(st, [](const Value&) { return true; }, n, d);
}

Value applyIterateWithCondition(const algebra::StepFunction& st, const FuncDef& p, std::int64_t n,
                                const Value& d) {
  if (n < 0) throw Error(ErrorKind::NegativeIterations, "iterateWithCondition with n = " + std::to_string(n));
  return algebra::repeat(
      st, [&](const Value& x) { return evalFunc(p, std::span(&x, 1)).asBool(); }, n, d);
}

Value apply(const Transformation& t, std::span<const Value> inputs) {
  if (static_cast<int>(inputs.size()) != arity(t.kind)) {
    throw Error(ErrorKind::ArityError, std::string(kindName(t.kind)) + " applied to " +
                                           std::to_string(inputs.size()) + " dataset(s)");
  }
  switch (t.kind) {
    case TransformKind::Identity: return inputs[0];
    case TransformKind::Map: return applyMap(fnOf(t), inputs[0]);
    case TransformKind::FlatMap: return applyFlatMap(fnOf(t), inputs[0]);
    case TransformKind::Filter: return applyFilter(fnOf(t), inputs[0]);
    case TransformKind::GroupBy: return applyGroupBy(fnOf(t), inputs[0]);
    case TransformKind::GroupByKey: return applyGroupByKey(inputs[0]);
    case TransformKind::Union: return applyUnion(inputs[0], inputs[1]);
    case TransformKind::Intersection: return applyIntersection(inputs[0], inputs[1]);
    case TransformKind::Subtract: return applySubtract(inputs[0], inputs[1]);
    case TransformKind::Distinct: return applyDistinct(inputs[0]);
    case TransformKind::Reduce: return applyReduce(fnOf(t), inputs[0]);
    case TransformKind::ReduceByKey: return applyReduceByKey(fnOf(t), inputs[0]);
    case TransformKind::InnerJoin: return applyInnerJoin(inputs[0], inputs[1]);
    case TransformKind::LeftOuterJoin: return applyLeftOuterJoin(inputs[0], inputs[1]);
    case TransformKind::RightOuterJoin: return applyRightOuterJoin(inputs[0], inputs[1]);
    case TransformKind::FullOuterJoin: return applyFullOuterJoin(inputs[0], inputs[1]);
    case TransformKind::OrderBy: return applyOrderBy(t.descending, inputs[0]);
    case TransformKind::OrderByKey: return applyOrderByKey(t.descending, inputs[0]);
    case TransformKind::LoopGuard:
      return inputs[0];  // the executor consults the predicate itself
    case TransformKind::LoopSelect: return inputs[1];
    case TransformKind::Iterate:
    case TransformKind::IterateWithCondition:
      throw Error(ErrorKind::InvalidProgram, "iterations run through their loop subnet");
  }
  throw Error(ErrorKind::InvalidProgram, "unknown transformation kind");
}

FuncDef aggregationFunction(AggregationKind kind) {
  switch (kind) {
    case AggregationKind::Max: return parseFunc("(x, y) -> if x > y then x else y");
    case AggregationKind::Min: return parseFunc("(x, y) -> if x < y then x else y");
    case AggregationKind::Sum: return parseFunc("(x, y) -> x + y");
  }
  throw Error(ErrorKind::InvalidProgram, "unknown aggregation");
}

Value derivedAggregation(AggregationKind kind, const Value& d) {
  if (!d.empty()) {
    const TypeKind k = typeOf(d[0]).kind;
    if (k != TypeKind::Int && k != TypeKind::Float) {
      throw Error(ErrorKind::TypeMismatch, "aggregation needs numeric data, got " + d.str());
    }
  }
  return applyReduce(aggregationFunction(kind), d);
}

}  // namespace flowalg
