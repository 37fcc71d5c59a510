#include "flowalg/value.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flowalg/error.hpp"

namespace flowalg {

namespace {

std::string_view tagName(Tag t) {
  switch (t) {
    case Tag::Int: return "Int";
    case Tag::Float: return "Float";
    case Tag::Bool: return "Bool";
    case Tag::Str: return "Str";
    case Tag::Tuple: return "Tuple";
    case Tag::Bag: return "Bag";
    case Tag::List: return "List";
  }
  return "?";
}

[[noreturn]] void mismatch(const Value& a, const Value& b) {
  throw Error(ErrorKind::TypeMismatch, "cannot compare " + std::string(tagName(a.tag())) +
                                           " with " + std::string(tagName(b.tag())) + " (" +
                                           a.str() + " vs " + b.str() + ")");
}

std::strong_ordering compareSeq(std::span<const Value> a, std::span<const Value> b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto c = compareUnchecked(a[i], b[i]);
    if (c != 0) return c;
  }
  return a.size() <=> b.size();
}

void sortCanonical(std::vector<Value>& elems) {
  std::sort(elems.begin(), elems.end(),
            [](const Value& x, const Value& y) { return compareUnchecked(x, y) < 0; });
}

void renderFloat(std::ostringstream& os, double d) {
  std::ostringstream tmp;
  tmp.precision(17);
  tmp << d;
  std::string s = tmp.str();
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  os << s;
}

void render(std::ostringstream& os, const Value& v) {
  switch (v.tag()) {
    case Tag::Int: os << v.asInt(); return;
    case Tag::Float: renderFloat(os, v.asFloat()); return;
    case Tag::Bool: os << (v.asBool() ? "true" : "false"); return;
    case Tag::Str: os << '"' << v.asStr() << '"'; return;
    case Tag::Tuple:
    case Tag::Bag:
    case Tag::List: {
      const char* open = v.isTuple() ? "(" : v.isBag() ? "{{" : "[";
      const char* close = v.isTuple() ? ")" : v.isBag() ? "}}" : "]";
      os << open;
      bool first = true;
      for (const auto& e : v.items()) {
        if (!first) os << ", ";
        first = false;
        render(os, e);
      }
      os << close;
      return;
    }
  }
}

}  // namespace

Value Value::integer(std::int64_t v) { return Value(Tag::Int, v); }

Value Value::real(double v) {
  if (std::isnan(v)) throw Error(ErrorKind::InvalidValue, "NaN is not a valid Float value");
  if (v == 0.0) v = 0.0;
  return Value(Tag::Float, v);
}

Value Value::boolean(bool v) { return Value(Tag::Bool, v); }

Value Value::string(std::string v) { return Value(Tag::Str, std::move(v)); }

Value Value::tuple(std::vector<Value> parts) {
  if (parts.size() < 2) {
    throw Error(ErrorKind::ArityError, "tuples need at least two components");
  }
  return Value(Tag::Tuple, std::make_shared<const std::vector<Value>>(std::move(parts)));
}

Value Value::bag(std::vector<Value> elems) {
  ElemType t = ElemType::unknown();
  for (const auto& e : elems) {
    auto u = unify(t, typeOf(e));
    if (!u) {
      throw Error(ErrorKind::TypeMismatch, "heterogeneous bag: element " + e.str() +
                                               " does not have type " + t.str());
    }
    t = std::move(*u);
  }
  return bagTrusted(std::move(elems));
}

Value Value::bagTrusted(std::vector<Value> elems, bool alreadySorted) {
  if (!alreadySorted) sortCanonical(elems);
  return Value(Tag::Bag, std::make_shared<const std::vector<Value>>(std::move(elems)));
}

Value Value::list(std::vector<Value> elems) {
  return Value(Tag::List, std::make_shared<const std::vector<Value>>(std::move(elems)));
}

std::int64_t Value::asInt() const {
  if (tag_ != Tag::Int) throw Error(ErrorKind::TypeMismatch, "expected Int, got " + str());
  return std::get<std::int64_t>(data_);
}

double Value::asFloat() const {
  if (tag_ != Tag::Float) throw Error(ErrorKind::TypeMismatch, "expected Float, got " + str());
  return std::get<double>(data_);
}

bool Value::asBool() const {
  if (tag_ != Tag::Bool) throw Error(ErrorKind::TypeMismatch, "expected Bool, got " + str());
  return std::get<bool>(data_);
}

const std::string& Value::asStr() const {
  if (tag_ != Tag::Str) throw Error(ErrorKind::TypeMismatch, "expected Str, got " + str());
  return std::get<std::string>(data_);
}

std::span<const Value> Value::items() const {
  if (!isSequence()) {
    throw Error(ErrorKind::TypeMismatch, "expected a tuple or collection, got " + str());
  }
  return *std::get<Seq>(data_);
}

std::string Value::str() const {
  std::ostringstream os;
  render(os, *this);
  return os.str();
}

std::strong_ordering compareUnchecked(const Value& a, const Value& b) {
  if (a.tag() != b.tag()) mismatch(a, b);
  switch (a.tag()) {
    case Tag::Int: return a.asInt() <=> b.asInt();
    case Tag::Float: {
      // No NaN can be constructed, so the partial order is total here.
      const double x = a.asFloat(), y = b.asFloat();
      return x < y ? std::strong_ordering::less
                   : (y < x ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    case Tag::Bool: return a.asBool() <=> b.asBool();
    case Tag::Str: return a.asStr().compare(b.asStr()) <=> 0;
    case Tag::Tuple:
      if (a.size() != b.size()) mismatch(a, b);
      return compareSeq(a.items(), b.items());
    case Tag::Bag:
    case Tag::List: return compareSeq(a.items(), b.items());
  }
  return std::strong_ordering::equal;
}

std::strong_ordering canonicalCompare(const Value& a, const Value& b) {
  if (!unify(typeOf(a), typeOf(b))) {
    throw Error(ErrorKind::TypeMismatch, "cannot compare " + a.str() + " of type " +
                                             typeOf(a).str() + " with " + b.str() +
                                             " of type " + typeOf(b).str());
  }
  return compareUnchecked(a, b);
}

bool operator==(const Value& a, const Value& b) {
  if (a.tag() != b.tag()) return false;
  switch (a.tag()) {
    case Tag::Int: return a.asInt() == b.asInt();
    case Tag::Float: return a.asFloat() == b.asFloat();
    case Tag::Bool: return a.asBool() == b.asBool();
    case Tag::Str: return a.asStr() == b.asStr();
    default: break;
  }
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] == b[i])) return false;
  }
  return true;
}

bool approxEqual(const Value& a, const Value& b, double tolerance) {
  if (tolerance <= 0.0) return a == b;
  if (a.tag() != b.tag()) return false;
  switch (a.tag()) {
    case Tag::Float: return std::fabs(a.asFloat() - b.asFloat()) <= tolerance;
    case Tag::Int:
    case Tag::Bool:
    case Tag::Str: return a == b;
    default: break;
  }
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!approxEqual(a[i], b[i], tolerance)) return false;
  }
  return true;
}

Value bagUnion(const Value& x, const Value& y) {
  if (!x.isBag() || !y.isBag()) {
    throw Error(ErrorKind::TypeMismatch, "bag union needs two bags");
  }
  if (!unify(typeOf(x), typeOf(y))) {
    throw Error(ErrorKind::TypeMismatch, "bag union of " + typeOf(x).str() + " and " +
                                             typeOf(y).str());
  }
  std::vector<Value> out;
  out.reserve(x.size() + y.size());
  std::merge(x.items().begin(), x.items().end(), y.items().begin(), y.items().end(),
             std::back_inserter(out),
             [](const Value& p, const Value& q) { return compareUnchecked(p, q) < 0; });
  return Value::bagTrusted(std::move(out), true);
}

bool multisetEqual(const Value& x, const Value& y) {
  if (!x.isBag() || !y.isBag()) return false;
  // Both sides are stored in canonical order.
  return x == y;
}

ElemType typeOf(const Value& v) {
  switch (v.tag()) {
    case Tag::Int: return ElemType::integer();
    case Tag::Float: return ElemType::real();
    case Tag::Bool: return ElemType::boolean();
    case Tag::Str: return ElemType::string();
    case Tag::Tuple: {
      std::vector<ElemType> parts;
      for (const auto& p : v.items()) parts.push_back(typeOf(p));
      return ElemType::tuple(std::move(parts));
    }
    case Tag::Bag:
    case Tag::List: {
      ElemType elem = ElemType::unknown();
      for (const auto& e : v.items()) {
        auto u = unify(elem, typeOf(e));
        if (!u) {
          throw Error(ErrorKind::TypeMismatch, "heterogeneous collection " + v.str());
        }
        elem = std::move(*u);
      }
      return v.isBag() ? ElemType::bag(std::move(elem)) : ElemType::list(std::move(elem));
    }
  }
  return ElemType::unknown();
}

bool conformsTo(const Value& v, const ElemType& declared) {
  try {
    return unify(typeOf(v), declared).has_value();
  } catch (const Error&) {
    return false;
  }
}

}  // namespace flowalg
