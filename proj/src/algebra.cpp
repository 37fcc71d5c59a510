#include "flowalg/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "flowalg/error.hpp"

namespace flowalg::algebra {

namespace {

void requireBag(const Value& v, const char* op) {
  if (!v.isBag()) {
    throw Error(ErrorKind::TypeMismatch, std::string(op) + " expects a bag, got " + v.str());
  }
}

const Value& requirePair(const Value& v, const char* op) {
  if (!v.isTuple() || v.size() != 2) {
    throw Error(ErrorKind::TypeMismatch,
                std::string(op) + " expects key/value pairs, got element " + v.str());
  }
  return v;
}

bool looselyEqual(const Value& a, const Value& b) {
  if (a.tag() == Tag::Float && b.tag() == Tag::Float) {
    const double x = a.asFloat(), y = b.asFloat();
    return std::fabs(x - y) <= 1e-9 * std::max({1.0, std::fabs(x), std::fabs(y)});
  }
  if (a.tag() != b.tag() || !a.isSequence()) return a == b;
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!looselyEqual(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

Value flatmap(const ElementFn& f, const Value& bag) {
  requireBag(bag, "flatmap");
  std::vector<Value> out;
  for (const auto& x : bag.items()) {
    Value part;
    try {
      part = f(x);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (on element " + x.str() + ")");
    }
    if (!part.isBag()) {
      throw Error(ErrorKind::TypeMismatch, "flatmap function returned non-bag " + part.str());
    }
    out.insert(out.end(), part.items().begin(), part.items().end());
  }
  return Value::bag(std::move(out));
}

Value flatmap(const FuncDef& f, const Value& bag) {
  return flatmap([&](const Value& x) { return evalFunc(f, std::span(&x, 1)); }, bag);
}

Value groupby(const Value& bag) {
  requireBag(bag, "groupby");
  // Stored canonical order sorts pairs by key first, so groups are runs.
  std::vector<Value> groups;
  const auto items = bag.items();
  std::size_t i = 0;
  while (i < items.size()) {
    const Value& key = requirePair(items[i], "groupby")[0];
    std::vector<Value> members;
    std::size_t j = i;
    while (j < items.size() && compareUnchecked(requirePair(items[j], "groupby")[0], key) == 0) {
      members.push_back(items[j][1]);
      ++j;
    }
    groups.push_back(Value::tuple({key, Value::bagTrusted(std::move(members), true)}));
    i = j;
  }
  return Value::bagTrusted(std::move(groups), true);
}

Value cogroup(const Value& left, const Value& right) {
  requireBag(left, "cogroup");
  requireBag(right, "cogroup");
  if (!left.empty() && !right.empty()) {
    const ElemType lk = typeOf(requirePair(left[0], "cogroup")[0]);
    const ElemType rk = typeOf(requirePair(right[0], "cogroup")[0]);
    if (!unify(lk, rk)) {
      throw Error(ErrorKind::TypeMismatch,
                  "cogroup keys disagree: " + lk.str() + " vs " + rk.str());
    }
  }
  const Value lg = groupby(left);
  const Value rg = groupby(right);
  const auto ls = lg.items();
  const auto rs = rg.items();
  std::vector<Value> out;
  std::size_t i = 0, j = 0;
  while (i < ls.size() || j < rs.size()) {
    std::strong_ordering c = std::strong_ordering::equal;
    if (i == ls.size()) c = std::strong_ordering::greater;
    else if (j == rs.size()) c = std::strong_ordering::less;
    else c = compareUnchecked(ls[i][0], rs[j][0]);

    if (c < 0) {
      out.push_back(Value::tuple({ls[i][0], Value::tuple({ls[i][1], Value::emptyBag()})}));
      ++i;
    } else if (c > 0) {
      out.push_back(Value::tuple({rs[j][0], Value::tuple({Value::emptyBag(), rs[j][1]})}));
      ++j;
    } else {
      out.push_back(Value::tuple({ls[i][0], Value::tuple({ls[i][1], rs[j][1]})}));
      ++i;
      ++j;
    }
  }
  return Value::bagTrusted(std::move(out), true);
}

Value reduce(const BinaryFn& f, const Value& bag) {
  requireBag(bag, "reduce");
  if (bag.empty()) throw Error(ErrorKind::EmptyReduce, "reduce of an empty bag");
  Value acc = bag[0];
  for (std::size_t i = 1; i < bag.size(); ++i) {
    try {
      acc = f(acc, bag[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (reducing " + acc.str() + " with " +
                                bag[i].str() + ")");
    }
  }
  return acc;
}

Value reduce(const FuncDef& f, const Value& bag) {
  return reduce(
      [&](const Value& a, const Value& b) {
        const Value args[] = {a, b};
        return evalFunc(f, args);
      },
      bag);
}

Value orderby(const Value& bag, bool descending) {
  requireBag(bag, "orderby");
  std::vector<Value> out(bag.items().begin(), bag.items().end());
  for (const auto& v : out) requirePair(v, "orderby");
  // Input is already in canonical order, so a stable sort on the key alone
  // leaves equal keys ordered by their values.
  std::stable_sort(out.begin(), out.end(), [descending](const Value& a, const Value& b) {
    const auto c = compareUnchecked(a[0], b[0]);
    return descending ? c > 0 : c < 0;
  });
  return Value::list(std::move(out));
}

Value repeat(const StepFunction& f, const BagPredicate& p, std::int64_t n, Value bag) {
  for (std::int64_t iteration = 1; n > 0; ++iteration, --n) {
    try {
      if (!p(bag)) break;
      bag = f(bag);
    } catch (const Error& e) {
      throw Error(e.kind(), "iteration " + std::to_string(iteration) + ": " + e.what());
    }
  }
  return bag;
}

bool someAll(Quantifier q, const ElementPredicate& p, const Value& bag) {
  requireBag(bag, "some/all");
  for (const auto& x : bag.items()) {
    const bool holds = p(x);
    if (q == Quantifier::Exists && holds) return true;
    if (q == Quantifier::Forall && !holds) return false;
  }
  return q == Quantifier::Forall;
}

bool someAll(Quantifier q, const FuncDef& p, const Value& bag) {
  return someAll(q, [&](const Value& x) { return evalFunc(p, std::span(&x, 1)).asBool(); }, bag);
}

std::optional<std::string> checkReduceLaws(const BinaryFn& f, const Value& bag,
                                           std::size_t samples, std::uint64_t seed) {
  requireBag(bag, "reduce");
  if (bag.size() < 2) return std::nullopt;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, bag.size() - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    const Value& a = bag[pick(rng)];
    const Value& b = bag[pick(rng)];
    const Value& c = bag[pick(rng)];
    try {
      if (!looselyEqual(f(a, b), f(b, a))) {
        return "not commutative: f(" + a.str() + ", " + b.str() + ") != f(" + b.str() + ", " +
               a.str() + ")";
      }
      if (!looselyEqual(f(f(a, b), c), f(a, f(b, c)))) {
        return "not associative on (" + a.str() + ", " + b.str() + ", " + c.str() + ")";
      }
    } catch (const Error&) {
      // Evaluation failures surface through the real fold.
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace flowalg::algebra
