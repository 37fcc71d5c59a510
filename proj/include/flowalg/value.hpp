#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "flowalg/types.hpp"

namespace flowalg {

enum class Tag : std::uint8_t { Int, Float, Bool, Str, Tuple, Bag, List };

/// An immutable, dynamically tagged datum.
///
/// Bags are kept sorted under the canonical order, so two bags are equal as
/// multisets exactly when their element sequences are equal. Copies share
/// the element storage.
class Value {
 public:
  Value() : Value(integer(0)) {}

  static Value integer(std::int64_t v);
  /// Rejects NaN (InvalidValue) and folds -0.0 into 0.0.
  static Value real(double v);
  static Value boolean(bool v);
  static Value string(std::string v);
  /// Arity must be at least 2.
  static Value tuple(std::vector<Value> parts);
  /// Sorts the elements and checks that they share one element type.
  static Value bag(std::vector<Value> elems);
  static Value list(std::vector<Value> elems);
  static Value emptyBag() { return bag({}); }
  static Value emptyList() { return list({}); }

  /// Skips the homogeneity check; elements are still sorted unless
  /// `alreadySorted` holds. Used by kernels whose inputs were already typed.
  static Value bagTrusted(std::vector<Value> elems, bool alreadySorted = false);

  Tag tag() const noexcept { return tag_; }
  bool isBag() const noexcept { return tag_ == Tag::Bag; }
  bool isList() const noexcept { return tag_ == Tag::List; }
  bool isTuple() const noexcept { return tag_ == Tag::Tuple; }
  bool isSequence() const noexcept {
    return tag_ == Tag::Tuple || tag_ == Tag::Bag || tag_ == Tag::List;
  }

  std::int64_t asInt() const;
  double asFloat() const;
  bool asBool() const;
  const std::string& asStr() const;

  /// Elements of a tuple, bag or list.
  std::span<const Value> items() const;
  std::size_t size() const { return items().size(); }
  bool empty() const { return items().empty(); }
  const Value& operator[](std::size_t i) const { return items()[i]; }

  /// Human-readable rendering: {{..}} for bags, [..] for lists, (..) for tuples.
  std::string str() const;

 private:
  using Seq = std::shared_ptr<const std::vector<Value>>;
  Value(Tag tag, std::variant<std::int64_t, double, bool, std::string, Seq> data)
      : tag_(tag), data_(std::move(data)) {}

  Tag tag_;
  std::variant<std::int64_t, double, bool, std::string, Seq> data_;
};

/// The canonical total order. Requires equal element types and throws
/// TypeMismatch otherwise.
std::strong_ordering canonicalCompare(const Value& a, const Value& b);

/// Canonical order without the up-front type check; still throws
/// TypeMismatch when it meets two differently tagged components.
std::strong_ordering compareUnchecked(const Value& a, const Value& b);

/// Structural equality; values of different types are simply unequal.
bool operator==(const Value& a, const Value& b);

/// Equality where every pair of corresponding floats may differ by at most
/// `tolerance` (absolute). Bags are compared on their canonical sequences.
bool approxEqual(const Value& a, const Value& b, double tolerance);

Value bagUnion(const Value& x, const Value& y);
bool multisetEqual(const Value& x, const Value& y);

/// Type of a value; empty collections yield `Unknown` element types.
ElemType typeOf(const Value& v);

/// True if `v` can inhabit `declared` (Ints are not implicitly Floats).
bool conformsTo(const Value& v, const ElemType& declared);

}  // namespace flowalg
