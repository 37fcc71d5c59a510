#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "flowalg/expr.hpp"
#include "flowalg/value.hpp"

// Kernel operations of the bag algebra. Every transformation in
// transforms.hpp is expressed through these.
namespace flowalg::algebra {

using ElementFn = std::function<Value(const Value&)>;
using BinaryFn = std::function<Value(const Value&, const Value&)>;
using ElementPredicate = std::function<bool(const Value&)>;

/// An endotyped pipeline Bag(t) -> Bag(t); the body of an iteration.
using StepFunction = std::function<Value(const Value&)>;
using BagPredicate = std::function<bool(const Value&)>;

/// Union of `f(x)` over the elements of `bag`; `f` must return bags.
/// Errors raised by `f` are rethrown with the offending element attached.
Value flatmap(const ElementFn& f, const Value& bag);
Value flatmap(const FuncDef& f, const Value& bag);

/// Bag(Tuple(k,a)) -> Bag(Tuple(k,Bag(a))), one pair per distinct key.
Value groupby(const Value& bag);

/// Bag(Tuple(k,a)) x Bag(Tuple(k,b)) -> Bag(Tuple(k,Tuple(Bag(a),Bag(b)))).
Value cogroup(const Value& left, const Value& right);

/// Folds `f` over the bag in canonical element order. EmptyReduce on {{ }}.
Value reduce(const BinaryFn& f, const Value& bag);
Value reduce(const FuncDef& f, const Value& bag);

/// Bag(Tuple(k,a)) -> List(Tuple(k,a)) ordered by key; equal keys keep the
/// canonical order of the whole pair. `descending` reverses the key order only.
Value orderby(const Value& bag, bool descending = false);

/// if n <= 0 or !p(X) then X else repeat(f, p, n - 1, f(X)).
/// Failures are rethrown naming the 1-based iteration that raised them.
Value repeat(const StepFunction& f, const BagPredicate& p, std::int64_t n, Value bag);

enum class Quantifier { Exists, Forall };

/// Or-fold (Exists) or and-fold (Forall) of `p` over the bag; the empty bag
/// yields the fold identity.
bool someAll(Quantifier q, const ElementPredicate& p, const Value& bag);
bool someAll(Quantifier q, const FuncDef& p, const Value& bag);

/// Spot-checks commutativity and associativity of `f` on pairs and triples
/// drawn from `bag` with a seeded generator. Returns a description of the
/// first counterexample. Floats are compared with a relative tolerance
/// because reassociating float sums is not exact.
std::optional<std::string> checkReduceLaws(const BinaryFn& f, const Value& bag,
                                           std::size_t samples = 16,
                                           std::uint64_t seed = 0x5eed);

}  // namespace flowalg::algebra
