#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "flowalg/algebra.hpp"
#include "flowalg/expr.hpp"
#include "flowalg/types.hpp"
#include "flowalg/value.hpp"

namespace flowalg {

enum class TransformKind {
  Map,
  FlatMap,
  Filter,
  GroupBy,
  GroupByKey,
  Union,
  Intersection,
  Subtract,
  Distinct,
  Reduce,
  ReduceByKey,
  InnerJoin,
  LeftOuterJoin,
  RightOuterJoin,
  FullOuterJoin,
  OrderBy,
  OrderByKey,
  Iterate,
  IterateWithCondition,
  Identity,
  // Only produced by unfolding a conditional loop: LoopGuard evaluates the
  // loop predicate on its input, LoopSelect picks the body result or, when
  // the guard stopped the iteration, the value that entered it.
  LoopGuard,
  LoopSelect,
};

std::string_view kindName(TransformKind kind);
std::optional<TransformKind> kindFromName(std::string_view name);

/// Number of input datasets: 2 for set-like operators, joins and LoopSelect.
int arity(TransformKind kind);

bool isSetLike(TransformKind kind);
bool isJoin(TransformKind kind);
bool isAggregation(TransformKind kind);

/// A transformation with its parameters. `fn` holds the user function
/// (f, p or k depending on the kind).
struct Transformation {
  TransformKind kind = TransformKind::Identity;
  std::optional<FuncDef> fn;
  bool descending = false;
  std::int64_t n = 0;

  static Transformation of(TransformKind kind) { return Transformation{kind, std::nullopt, false, 0}; }
  static Transformation withFn(TransformKind kind, FuncDef f) {
    return Transformation{kind, std::move(f), false, 0};
  }

  /// Human-readable form such as `filter((x) -> x >= 3)`.
  std::string str() const;
};

bool sameTransformation(const Transformation& a, const Transformation& b);

/// Output dataset type of `t` applied to datasets of the given types, or a
/// TypeError/TypeMismatch naming the problem. Also type-checks the user
/// function with its parameters bound from the inputs.
ElemType outputType(const Transformation& t, std::span<const ElemType> inputs);

/// Evaluates `t` on its input datasets. Iterate kinds are driven by the
/// dataflow executor through applyIterate* instead.
Value apply(const Transformation& t, std::span<const Value> inputs);

Value applyMap(const FuncDef& f, const Value& d);
Value applyFlatMap(const FuncDef& f, const Value& d);
Value applyFilter(const FuncDef& p, const Value& d);
Value applyGroupBy(const FuncDef& k, const Value& d);
Value applyGroupByKey(const Value& d);
Value applyUnion(const Value& dx, const Value& dy);
Value applyIntersection(const Value& dx, const Value& dy);
Value applySubtract(const Value& dx, const Value& dy);
Value applyDistinct(const Value& d);
/// Singleton bag holding the fold, so the result is still a dataset.
Value applyReduce(const FuncDef& f, const Value& d);
Value applyReduceByKey(const FuncDef& f, const Value& d);
Value applyInnerJoin(const Value& dx, const Value& dy);
Value applyLeftOuterJoin(const Value& dx, const Value& dy);
Value applyRightOuterJoin(const Value& dx, const Value& dy);
Value applyFullOuterJoin(const Value& dx, const Value& dy);
Value applyOrderBy(bool descending, const Value& d);
Value applyOrderByKey(bool descending, const Value& d);
Value applyIterate(const algebra::StepFunction& st, std::int64_t n, const Value& d);
Value applyIterateWithCondition(const algebra::StepFunction& st, const FuncDef& p,
                                std::int64_t n, const Value& d);

enum class AggregationKind { Max, Min, Sum };

/// The reduce function for a derived aggregation over `elem`-typed data:
/// max/min pick with a comparison, sum adds.
FuncDef aggregationFunction(AggregationKind kind);
Value derivedAggregation(AggregationKind kind, const Value& d);

}  // namespace flowalg
