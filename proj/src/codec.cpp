#include "flowalg/codec.hpp"

#include <fstream>
#include <sstream>

#include "flowalg/error.hpp"

namespace flowalg {

using nlohmann::json;

json encodeValue(const Value& v) {
  switch (v.tag()) {
    case Tag::Int: return v.asInt();
    case Tag::Float: return v.asFloat();
    case Tag::Bool: return v.asBool();
    case Tag::Str: return v.asStr();
    case Tag::Tuple:
    case Tag::Bag:
    case Tag::List: {
      json arr = json::array();
      for (const auto& e : v.items()) arr.push_back(encodeValue(e));
      if (v.isTuple()) return json{{"tuple", std::move(arr)}};
      if (v.isList()) return json{{"list", std::move(arr)}};
      return arr;
    }
  }
  return nullptr;
}

namespace {

[[noreturn]] void badJson(const json& j, const std::string& why) {
  throw Error(ErrorKind::InvalidValue, "cannot decode " + j.dump() + ": " + why);
}

const json& wrapped(const json& j, const char* key) {
  if (j.size() != 1 || !j.contains(key) || !j.at(key).is_array()) {
    badJson(j, std::string("expected {\"") + key + "\": [...]}");
  }
  return j.at(key);
}

Value decodeImpl(const json& j, const ElemType* expected) {
  const TypeKind want = expected ? expected->kind : TypeKind::Unknown;
  auto childType = [&](std::size_t i) -> const ElemType* {
    if (!expected || expected->kind == TypeKind::Unknown) return nullptr;
    if (want == TypeKind::Tuple) return i < expected->args.size() ? &expected->args[i] : nullptr;
    return &expected->args[0];
  };

  switch (j.type()) {
    case json::value_t::number_integer:
      if (want == TypeKind::Float) return Value::real(static_cast<double>(j.get<std::int64_t>()));
      return Value::integer(j.get<std::int64_t>());
    case json::value_t::number_unsigned: {
      const auto u = j.get<std::uint64_t>();
      if (want == TypeKind::Float) return Value::real(static_cast<double>(u));
      if (u > static_cast<std::uint64_t>(INT64_MAX)) badJson(j, "integer out of range");
      return Value::integer(static_cast<std::int64_t>(u));
    }
    case json::value_t::number_float: return Value::real(j.get<double>());
    case json::value_t::boolean: return Value::boolean(j.get<bool>());
    case json::value_t::string: return Value::string(j.get<std::string>());
    case json::value_t::array: {
      std::vector<Value> elems;
      elems.reserve(j.size());
      for (const auto& e : j) elems.push_back(decodeImpl(e, childType(0)));
      if (want == TypeKind::List) return Value::list(std::move(elems));
      return Value::bag(std::move(elems));
    }
    case json::value_t::object: {
      if (j.contains("tuple")) {
        const json& arr = wrapped(j, "tuple");
        if (arr.size() < 2) badJson(j, "tuples need at least two components");
        std::vector<Value> parts;
        for (std::size_t i = 0; i < arr.size(); ++i) parts.push_back(decodeImpl(arr[i], childType(i)));
        return Value::tuple(std::move(parts));
      }
      if (j.contains("list")) {
        const json& arr = wrapped(j, "list");
        std::vector<Value> elems;
        for (const auto& e : arr) elems.push_back(decodeImpl(e, childType(0)));
        return Value::list(std::move(elems));
      }
      badJson(j, "unknown object form");
    }
    default: badJson(j, "unsupported JSON kind");
  }
}

}  // namespace

Value decodeValue(const json& j) { return decodeImpl(j, nullptr); }

Value decodeValue(const json& j, const ElemType& expected) {
  Value v = decodeImpl(j, &expected);
  if (!conformsTo(v, expected)) {
    throw Error(ErrorKind::TypeMismatch,
                "value " + v.str() + " does not have type " + expected.str());
  }
  return v;
}

Value decodeDataset(const json& j, const ElemType& declared) {
  if (!declared.isCollection()) {
    throw Error(ErrorKind::TypeMismatch, "dataset type must be Bag<..> or List<..>, got " +
                                             declared.str());
  }
  if (!j.is_array()) badJson(j, "a dataset file must hold one top-level array");
  return decodeValue(j, declared);
}

json encodeDataset(const Value& dataset) {
  json arr = json::array();
  for (const auto& e : dataset.items()) arr.push_back(encodeValue(e));
  return arr;
}

std::string datasetToString(const Value& dataset) { return encodeDataset(dataset).dump(); }

json readJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Io, path.string() + ": invalid JSON: " + e.what());
  }
}

void writeTextFile(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace flowalg
